"""One-dimensional double phase experiments.

The equation ``(phi'(x, |u'|) u'/|u'|)' = 0`` with
``phi'(x, t) = max{t^(p-1), a(x) t^(q-1)}`` and ``a(x) = max{-x, 0}^alpha``
reduces, for increasing ``u``, to ``phi'(x, u') = c``.  Its solutions are
closed form: affine with slope ``c^(1/(p-1))`` right of ``-x0`` and a power
profile left of it.  This module builds those solutions and measures the
Harnack quotient, norms, energies and the inequalities they are tested on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.special import gamma

from .analysis import (GridFunction, ess_bounds, integral_mean_power, lebesgue_norm,
                       modular)
from .errors import DomainError, PreconditionError
from .extended import INF, parse_extended, to_float
from .phi import Ball, Coefficient, DoublePhase, GrowthField, PhiFunction, Power, PsiR
from .table import ExperimentTable

FIGURE_C_VALUES = (1.01, 1.1, 1.2, 1.3, 1.4)
FIGURE_PARAMS = dict(p=1.1, q=2.0, alpha=0.5)


@dataclass(frozen=True)
class DPParams:
    """Exponents, Hoelder exponent of the coefficient, flux level and interval."""

    p: float
    q: float
    alpha: float
    c: float
    x_left: float = -1.0
    x_right: float = 1.0

    def __post_init__(self):
        if not self.p > 1:
            raise DomainError("p must exceed 1")
        if not self.q >= self.p:
            raise DomainError("q must be at least p")
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")
        if not self.c > 0:
            raise DomainError("c must be positive")
        if not self.x_left < self.x_right:
            raise DomainError("x_left must be below x_right")

    @classmethod
    def from_x0(cls, p, q, alpha, x0, **kw) -> "DPParams":
        """Parameters whose transition point is ``x0`` (``q > p``)."""
        if not (q > p and x0 > 0):
            raise DomainError("from_x0 needs q > p and x0 > 0")
        c = x0 ** (-alpha * (p - 1) / (q - p))
        return cls(p, q, alpha, c, **kw)

    @property
    def coefficient(self) -> Coefficient:
        return Coefficient.degenerate(self.alpha)

    @property
    def phi(self) -> DoublePhase:
        return DoublePhase(self.p, self.q, self.coefficient, form="max")

    @property
    def x0(self) -> float:
        return self.c ** (-(self.q - self.p) / (self.alpha * (self.p - 1)))

    @property
    def alpha2(self) -> float:
        return 1.0 - self.alpha / (self.q - 1.0)


@dataclass(frozen=True)
class ExactDPSolution:
    """Closed-form solution of ``phi'(x, u') = c`` with ``u(x_left) = 0``."""

    params: DPParams
    x0: float
    alpha2: float

    @property
    def x_left(self) -> float:
        return self.params.x_left

    @property
    def slope(self) -> float:
        """``u'`` on the p-phase side, ``c^(1/(p-1))``."""
        return self.params.c ** (1.0 / (self.params.p - 1.0))

    @property
    def degenerate_present(self) -> bool:
        return self.x_left < -self.x0

    def du(self, x):
        x = np.asarray(x, dtype=float)
        P = self.params
        with np.errstate(divide="ignore"):
            left = (P.c * np.abs(x) ** (-P.alpha)) ** (1.0 / (P.q - 1.0))
        return np.where(x >= -self.x0, self.slope, left)

    def _left_profile(self, x):
        # c^(1/(q-1)) * int_{x_left}^{x} |y|^(-alpha/(q-1)) dy on x <= -x0,
        # written as |x|^a2 expm1(a2 log(|x_left|/|x|))/a2 to survive a2 -> 0
        P, a2 = self.params, self.alpha2
        ax = np.abs(x)
        log_ratio = np.log(abs(self.x_left) / ax)
        if a2 == 0:
            shape = log_ratio
        else:
            shape = ax ** a2 * np.expm1(a2 * log_ratio) / a2
        return P.c ** (1.0 / (P.q - 1.0)) * shape

    def u(self, x):
        x = np.asarray(x, dtype=float)
        if not self.degenerate_present:
            out = (x - self.x_left) * self.slope
        else:
            xl = np.minimum(x, -self.x0)
            u_kink = float(self._left_profile(np.array(-self.x0)))
            out = np.where(x <= -self.x0, self._left_profile(xl),
                           u_kink + (x + self.x0) * self.slope)
        return float(out) if out.ndim == 0 else out

    def u_quadrature(self, x):
        """``int_{x_left}^{x} u'`` by adaptive quadrature (independent of :meth:`u`)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        order = np.argsort(x)
        xs = x[order]
        knots = np.concatenate([[self.x_left], xs])
        kink = -self.x0
        pieces = np.empty(xs.size)
        P, slope = self.params, self.slope
        gain, power = P.c ** (1.0 / (P.q - 1.0)), -P.alpha / (P.q - 1.0)

        def f(y):
            # scalar u' in plain floats; quad calls this thousands of times
            return slope if y >= kink else gain * abs(y) ** power
        for i in range(xs.size):
            a, b = knots[i], knots[i + 1]
            if b <= a:
                pieces[i] = 0.0
                continue
            pts = [kink] if a < kink < b else None
            pieces[i] = integrate.quad(f, a, b, points=pts, epsabs=1e-15, epsrel=1e-13,
                                       limit=200)[0]
        out = np.empty_like(x)
        out[order] = np.cumsum(pieces)
        return out

    def phi_prime_residual(self, x):
        """``phi'(x, u'(x)) - c``; zero for an exact solution."""
        return np.asarray(self.params.phi.derivative(x, self.du(x))) - self.params.c

    def renormalized(self, x_left: float) -> "ExactDPSolution":
        """Same equation, zero boundary value moved to ``x_left``."""
        return solve_double_phase_1d(replace(self.params, x_left=x_left))

    def grid(self, lo: float, hi: float, node_count: int) -> GridFunction:
        return GridFunction.from_function(self.u, lo, hi, node_count, df=self.du)


def solve_double_phase_1d(params: DPParams) -> ExactDPSolution:
    return ExactDPSolution(params, params.x0, params.alpha2)


def harnack_quotient(sol: ExactDPSolution, r: float) -> float:
    """``u(-x0+r)/u(-x0)`` for the solution renormalized to ``u(-x0-2r) = 0``.

    With ``rho = r/x0`` this is ``1 + alpha2 rho / ((1+2 rho)^alpha2 - 1)``.
    """
    if not r > 0:
        raise DomainError("r must be positive")
    return quotient_from_rho(r / sol.x0, sol.alpha2)


def quotient_from_rho(rho: float, alpha2: float) -> float:
    if not rho > 0:
        raise DomainError("rho must be positive")
    lp = math.log1p(2.0 * rho)
    if alpha2 == 0:
        return 1.0 + rho / lp
    return 1.0 + alpha2 * rho / math.expm1(alpha2 * lp)


def energy(sol: ExactDPSolution, r: float) -> float:
    """``int_{B(-x0, 2r)} u' phi'(x, u') = c u(-x0+2r)`` with ``u(-x0-2r) = 0``.

    The work density ``t phi'(x,t)`` is equivalent to ``phi(x,t)`` within
    the factors ``p`` and ``q``, so this is the energy up to those constants.
    """
    if not r > 0:
        raise DomainError("r must be positive")
    base = sol.renormalized(-sol.x0 - 2.0 * r)
    return energy_between(base, -sol.x0 - 2.0 * r, -sol.x0 + 2.0 * r)


def energy_between(sol: ExactDPSolution, lo: float, hi: float) -> float:
    """``int_lo^hi u' phi'(x, u') = c (u(hi) - u(lo))``, since ``phi'(x, u') = c``."""
    if not hi > lo:
        raise DomainError("need lo < hi")
    return sol.params.c * (float(sol.u(hi)) - float(sol.u(lo)))


def energy_quadrature(sol: ExactDPSolution, r: float, node_count: int = 20001,
                      density: str = "work") -> float:
    """Simpson value of the energy over ``B(-x0, 2r)``.

    ``density="work"`` integrates ``u' phi'(x, u')`` (matches :func:`energy`);
    ``density="phi"`` integrates ``phi(x, u')`` itself.
    """
    base = sol.renormalized(-sol.x0 - 2.0 * r)
    lo, hi = -sol.x0 - 2.0 * r, -sol.x0 + 2.0 * r
    du = GridFunction.from_function(base.du, lo, hi, node_count)
    phi = sol.params.phi
    return modular(phi.work_function() if density == "work" else phi, du)


# --------------------------------------------------------------------------
# sweeps


def classify_growth(x0s: Sequence[float], values: Sequence[float], log_power: float):
    """Fitted x0-exponent of ``values / log(1/x0)^log_power`` and its verdict.

    The sequence tends to 0 (``"bounded"``) when the fitted exponent is
    positive and to infinity (``"diverging"``) otherwise.
    """
    x0s = np.asarray(x0s, dtype=float)
    vals = np.asarray(values, dtype=float)
    y = np.log(vals) - log_power * np.log(np.log(1.0 / x0s))
    slope = float(np.polyfit(np.log(x0s), y, 1)[0])
    return slope, ("bounded" if slope > 0 else "diverging")


def s_lower(s, n: int = 1):
    """``s_* = n s/(n+s)``; ``n`` when ``s`` is infinite."""
    s = parse_extended(s)
    return float(n) if s is INF else n * s / (n + s)


class SweepRow(NamedTuple):
    x0: float
    c: float
    r: float
    rho: float
    harnack_quotient: float
    norm_ls: float
    predicted: float
    weak_harnack: float
    energy: float
    hyp31_ratio: float
    hyp32_mean: float


def sweep_point(p, q, alpha, s, x0, node_count: int = 4001, ell0: float = 1.0,
                beta_exp: float = 1.0, with_diagnostics: bool = True) -> SweepRow:
    """All measured quantities of the counterexample at one ``x0``.

    The radius is ``r = x0 log(1/x0)`` and the solution is normalized by
    ``u(-x0-2r) = 0``.
    """
    if not 0 < x0 < 1:
        raise DomainError("x0 must lie in (0, 1) so that log(1/x0) > 0")
    s = parse_extended(s)
    r = x0 * math.log(1.0 / x0)
    params = DPParams.from_x0(p, q, alpha, x0, x_left=-x0 - 2 * r, x_right=-x0 + 2 * r)
    sol = solve_double_phase_1d(params)
    node_count += 1 - node_count % 2
    u = sol.grid(-x0 - 2 * r, -x0 + 2 * r, node_count)
    norm = lebesgue_norm(u, s)
    exponent = 1.0 + (0.0 if s is INF else 1.0 / s) - alpha / (q - p)
    log_power = 1.0 + (0.0 if s is INF else 1.0 / s)
    predicted = x0 ** exponent * math.log(1.0 / x0) ** log_power
    whr = weak_harnack_ratio(u, r, -x0, ell0)
    v31 = b32 = float("nan")
    if with_diagnostics:
        omega = Power(s_lower(s))
        hq = hypothesis_quantities(params.phi, omega, u, Ball(-x0, r), beta_exp)
        v31, b32 = hq.lhs_31 / hq.rhs_31, hq.value_32
    return SweepRow(x0, params.c, r, r / x0, harnack_quotient(sol, r), norm, predicted,
                    whr, energy(sol, r), v31, b32)


def sharpness_sweep(p, q, alpha, s, x0_sequence, node_count: int = 4001,
                    ell0: float = 1.0, with_diagnostics: bool = True) -> ExperimentTable:
    """Counterexample sweep along ``x0 -> 0`` with ``r = x0 log(1/x0)``.

    The L^s norm on ``B(-x0, 2r)`` behaves like
    ``x0^(1+1/s-alpha/(q-p)) log(1/x0)^(1+1/s)``; the table's metadata
    carries the fitted x0-exponent and the bounded/diverging verdict.
    """
    s = parse_extended(s)
    x0s = [float(v) for v in x0_sequence]
    if not x0s:
        raise DomainError("empty x0 sequence")
    if any(not 0 < v < 1 for v in x0s):
        raise DomainError("x0 must lie in (0, 1)")
    table = ExperimentTable(list(SweepRow._fields) + ["norm_ratio"])
    for x0 in x0s:
        row = sweep_point(p, q, alpha, s, x0, node_count, ell0,
                          with_diagnostics=with_diagnostics)
        table.append(list(row) + [row.norm_ls / row.predicted])
    log_power = 1.0 + (0.0 if s is INF else 1.0 / s)
    exponent = 1.0 + (0.0 if s is INF else 1.0 / s) - alpha / (q - p)
    meta = dict(p=p, q=q, alpha=alpha, s=str(s) if s is INF else s, n=1,
                predicted_exponent=exponent, node_count=node_count, ell0=ell0)
    if len(x0s) >= 2:
        fitted, label = classify_growth(x0s, table.column("norm_ls"), log_power)
        meta.update(fitted_exponent=fitted, classification=label)
    else:
        meta.update(classification="bounded" if exponent > 0 else "diverging")
    table.metadata.update(meta)
    return table


# --------------------------------------------------------------------------
# supersolutions and Caccioppoli


def hat_function(like: GridFunction, lo: float, peak: float, hi: float,
                 height: float = 1.0) -> GridFunction:
    """Piecewise-linear hat supported in ``[lo, hi]`` on the grid of ``like``."""
    if not lo < peak < hi:
        raise DomainError("hat needs lo < peak < hi")
    x = like.nodes
    h = np.where(x <= peak, (x - lo) / (peak - lo), (hi - x) / (hi - peak))
    return like.with_values(height * np.clip(h, 0.0, None))


def solution_envelope(first: ExactDPSolution, second: ExactDPSolution, x_cross: float,
                      lo: float, hi: float, node_count: int, kind: str = "min") -> GridFunction:
    """Pointwise min (a supersolution) or max of two solutions crossing at ``x_cross``.

    ``first`` is shifted by a constant so that both agree at ``x_cross``.
    Adding a constant keeps a solution a solution.
    """
    shift = float(second.u(x_cross)) - float(first.u(x_cross))
    x = np.linspace(lo, hi, node_count)
    u1, u2 = first.u(x) + shift, second.u(x)
    d1, d2 = first.du(x), second.du(x)
    pick_first = (u1 <= u2) if kind == "min" else (u1 >= u2)
    if kind not in ("min", "max"):
        raise DomainError("kind must be 'min' or 'max'")
    return GridFunction(lo, hi, np.where(pick_first, u1, u2), np.where(pick_first, d1, d2))


def verify_supersolution(field: GrowthField, u: GridFunction, h: GridFunction) -> float:
    """``int f(x, u') h' dx`` for a non-negative test function vanishing at the ends.

    ``h`` is taken as its piecewise-linear interpolant, so ``h'`` is constant
    on each cell and the flux is integrated by the trapezoid rule from its
    node values.  Exact solutions give zero up to rounding.
    """
    if (u.x_lo, u.x_hi, u.node_count) != (h.x_lo, h.x_hi, h.node_count):
        raise PreconditionError("u and h must share a grid")
    scale = max(1.0, float(np.max(np.abs(h.values))))
    if abs(h.values[0]) > 1e-14 * scale or abs(h.values[-1]) > 1e-14 * scale:
        raise PreconditionError("test function must vanish at the interval ends")
    if np.any(h.values < -1e-14 * scale):
        raise PreconditionError("test function must be non-negative")
    flux = np.asarray(field.flux(u.nodes, u.gradient().values))
    return float(np.sum(0.5 * (flux[:-1] + flux[1:]) * np.diff(h.values)))


@dataclass(frozen=True)
class CaccioppoliConfig:
    """Exponents and cutoff of the Caccioppoli test on ``ball``.

    The cutoff is 1 on ``B(center, sigma R)`` and falls linearly to 0 at
    the sphere, so ``|eta'| = 1/((1-sigma) R)``.
    """

    ell: float
    s_exponent: float
    sigma: float
    ball: Ball
    p1: float
    cutoff: Optional[Callable] = None

    def __post_init__(self):
        if not self.ell > 1.0 / self.p1:
            raise PreconditionError(f"ell must exceed 1/p1 = {1.0 / self.p1:g}")
        if not 0 < self.sigma < 1:
            raise PreconditionError("sigma must lie in (0, 1)")

    def eta(self, x):
        if self.cutoff is not None:
            return np.asarray(self.cutoff(x), dtype=float)
        R, c = self.ball.radius, float(self.ball.center)
        d = np.abs(np.asarray(x, dtype=float) - c)
        return np.clip((R - d) / ((1.0 - self.sigma) * R), 0.0, 1.0)

    def cutoff_violation(self, x) -> float:
        """Largest violation of the cutoff bounds at the given nodes."""
        x = np.asarray(x, dtype=float)
        eta = self.eta(x)
        R, c = self.ball.radius, float(self.ball.center)
        d = np.abs(x - c)
        worst = 0.0
        worst = max(worst, float(np.max(np.where(d <= self.sigma * R, 1.0 - eta, 0.0))))
        worst = max(worst, float(np.max(np.where(d >= R, eta, 0.0))))
        worst = max(worst, float(np.max(eta - 1.0)), float(np.max(-eta)))
        slope = np.abs(np.diff(eta) / np.diff(x))
        worst = max(worst, float(np.max(slope)) - 2.0 / ((1.0 - self.sigma) * R))
        return worst


class CaccioppoliResult(NamedTuple):
    lhs: float
    rhs_integral: float
    ratio: float
    prefactor: float


def verify_caccioppoli(phi: PhiFunction, psi: Callable, u: GridFunction,
                       cfg: CaccioppoliConfig, growth: GrowthField) -> CaccioppoliResult:
    """Both sides of the Caccioppoli inequality on ``cfg.ball``.

    ``lhs = int phi(x,|u'|) psi(v)^-ell eta^s`` and
    ``rhs_integral = int psi(v)^-ell phi(x, v) eta^(s-q)`` with ``v = (u+R)/R``.
    ``prefactor`` is the explicit part ``(s Lambda/((1-sigma)(p1 ell - 1) nu))^q``
    of the constant; the remaining factor depends on L_q only.
    """
    if phi.declared_exponents is None:
        raise PreconditionError("phi needs declared exponents")
    q = phi.declared_exponents[1]
    if cfg.s_exponent < q:
        raise PreconditionError("s must be at least q")
    w = u.restrict(cfg.ball)
    if np.any(w.values < 0):
        raise PreconditionError("u must be non-negative on the ball")
    x = w.nodes
    R = cfg.ball.radius
    v = (w.values + R) / R
    du = np.abs(w.gradient().values)
    eta = cfg.eta(x)
    weight = np.asarray(psi(v)) ** (-cfg.ell)
    lhs_density = np.asarray(phi(x, du)) * weight * eta ** cfg.s_exponent
    rhs_density = weight * np.asarray(phi(x, v)) * eta ** (cfg.s_exponent - q)
    dx = w.spacing
    lhs = float(integrate.simpson(lhs_density, dx=dx))
    rhs = float(integrate.simpson(rhs_density, dx=dx))
    prefactor = (cfg.s_exponent * growth.lam
                 / ((1 - cfg.sigma) * (cfg.p1 * cfg.ell - 1) * growth.nu)) ** q
    return CaccioppoliResult(lhs, rhs, lhs / rhs if rhs > 0 else float("inf"), prefactor)


def caccioppoli_experiment(c_low: float = 1.1, c_high: float = 1.3,
                           x_cross: float = -0.5, ball: Ball = Ball(-0.5, 0.4),
                           node_count: int = 20001, ell: float = 1.0, sigma: float = 0.5,
                           p: float = 1.1, q: float = 2.0, alpha: float = 0.5):
    """Caccioppoli ratio for the supersolution ``min(u_{c_low} + k, u_{c_high})``."""
    lo, hi = ball.interval
    first = solve_double_phase_1d(DPParams(p, q, alpha, c_low))
    second = solve_double_phase_1d(DPParams(p, q, alpha, c_high))
    u = solution_envelope(first, second, x_cross, lo, hi, node_count, "min")
    phi = first.params.phi
    psi = PsiR(phi, ball)
    cfg = CaccioppoliConfig(ell, q, sigma, ball, p1=psi.p)
    return verify_caccioppoli(phi, psi, u, cfg, GrowthField.canonical(phi)), u


# --------------------------------------------------------------------------
# weak Harnack quantities


def weak_harnack_ratio(u: GridFunction, R: float, center: float, ell0: float,
                       plus_R: bool = True) -> float:
    """``(mean_{B_2R} (u+R)^ell0)^(1/ell0) / (ess inf_{B_R} u + R)``.

    ``plus_R=False`` gives the variant without the ``+R`` shifts (diagnostic
    only; no inequality is claimed for it).
    """
    if not (R > 0 and ell0 > 0):
        raise DomainError("R and ell0 must be positive")
    big, small = Ball(center, 2 * R), Ball(center, R)
    w = u.restrict(big)
    if np.any(w.values < 0):
        raise PreconditionError("u must be non-negative on B_2R")
    shift = R if plus_R else 0.0
    top = integral_mean_power(w + shift, ell0)
    return top / (ess_bounds(u, small)[0] + shift)


class HypothesisQuantities(NamedTuple):
    lhs_31: float
    rhs_31: float
    value_32: float


def hypothesis_quantities(phi: PhiFunction, omega: PhiFunction, u: GridFunction,
                          ball: Ball, beta_exp: float, n_samples: int = 64) -> HypothesisQuantities:
    """The two integral hypotheses of the weak Harnack theorem on ``ball``.

    ``lhs_31 = omega^-_B(mean_B (u+R)/R)`` against ``rhs_31 = 1/|B|`` (so the
    hypothesis holds with ``d = lhs_31/rhs_31``), and
    ``value_32 = mean_B (phi(x, v)/phi^-_B(v))^beta`` with ``v = (u+R)/R``.
    """
    if beta_exp < 1:
        raise DomainError("beta must be at least 1")
    w = u.restrict(ball)
    if np.any(w.values < 0):
        raise PreconditionError("u must be non-negative")
    R = ball.radius
    v = (w.values + R) / R
    xs = np.union1d(ball.samples(n_samples), w.nodes)
    mean_v = float(integrate.simpson(v, dx=w.spacing)) / (w.x_hi - w.x_lo)
    lhs = float(omega.lower_envelope(xs)(np.array([mean_v]))[0])
    phi_minus = phi.lower_envelope(xs)(v)
    if np.any(phi_minus <= 0):
        raise DomainError("phi^- vanishes at a sampled value (degenerate ball)")
    ratio = (np.asarray(phi(w.nodes, v)) / phi_minus) ** beta_exp
    value = float(integrate.simpson(ratio, dx=w.spacing)) / (w.x_hi - w.x_lo)
    return HypothesisQuantities(lhs, 1.0 / ball.measure, value)


# --------------------------------------------------------------------------
# the radial p-Laplace example


def limiting_exponent(p: float, n: int):
    """``n(p-1)/(n-p)`` for ``p < n``, :data:`INF` otherwise."""
    if not p > 1:
        raise DomainError("p must exceed 1")
    if n < 1:
        raise DomainError("dimension must be >= 1")
    return n * (p - 1.0) / (n - p) if p < n else INF


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n."""
    return float(2.0 * math.pi ** (n / 2) / gamma(n / 2))


@dataclass
class NonintegrabilityReport:
    p: float
    n: int
    ell: object
    eps: List[float]
    integrals: List[float] = field(default_factory=list)
    slopes: List[float] = field(default_factory=list)
    differences: List[float] = field(default_factory=list)
    branch: str = "finite"
    sup_values: List[float] = field(default_factory=list)


def radial_power_integral(gamma_exp: float, n: int, eps: float) -> float:
    """``int_{eps<|x|<1} |x|^-gamma_exp dx`` by quadrature in ``log(1/|x|)``."""
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    k = n - gamma_exp
    L = math.log(1.0 / eps)
    val = integrate.quad(lambda y: math.exp(-k * y), 0.0, L, epsabs=0, epsrel=1e-13,
                         limit=400)[0]
    return sphere_area(n) * val


def p_laplace_nonintegrability(p: float, n: int, eps_sequence: Sequence[float],
                               ell: Optional[float] = None) -> NonintegrabilityReport:
    """Partial integrals of ``u_p^ell`` over ``eps < |x| < 1``.

    ``u_p(x) = |x|^(-(n-p)/(p-1))``.  At ``ell = ell(p)`` the integrand is
    ``|x|^-n`` and the partial integrals grow like ``|S^(n-1)| log(1/eps)``;
    ``slopes`` records the growth rate against ``log(1/eps)``.
    """
    if not p > 1:
        raise DomainError("p must exceed 1")
    eps = [float(e) for e in eps_sequence]
    limit = limiting_exponent(p, n)
    if limit is INF:
        report = NonintegrabilityReport(p, n, INF, eps, branch="infinite")
        if p == n:
            # the fundamental solution is logarithmic at p = n
            report.sup_values = [math.log(1.0 / e) for e in eps]
        else:
            report.sup_values = [1.0 for _ in eps]
        return report
    ell = limit if ell is None else float(ell)
    gamma_exp = ell * (n - p) / (p - 1.0)
    report = NonintegrabilityReport(p, n, ell, eps)
    report.integrals = [radial_power_integral(gamma_exp, n, e) for e in eps]
    logs = [math.log(1.0 / e) for e in eps]
    for i in range(1, len(eps)):
        d = report.integrals[i] - report.integrals[i - 1]
        report.differences.append(abs(d))
        report.slopes.append(d / (logs[i] - logs[i - 1]))
    return report
