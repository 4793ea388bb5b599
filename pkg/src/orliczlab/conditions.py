"""Sampling checkers for the structural conditions on Phi-functions.

Each checker evaluates the defining inequality on deterministic samples,
extracts the best constant, and decides by watching how that constant
moves when the sampling is pushed further (wider t-range, finer x, smaller
balls).  A constant that settles gives ``holds``; one that keeps drifting
toward its degenerate value gives ``fails``.  When the decision itself
changes under a 2x refinement the verdict is ``inconclusive``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, PreconditionError
from .phi import Ball, PhiFunction, Power, log_grid

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
CONDITIONS = ("A0", "A1Omega", "A1S", "A1", "AIncP", "ADecQ")

BETA_STEPS_PER_OCTAVE = 8
BETA_MIN_LOG2 = -64
WITNESS_RTOL = 1e-3


@dataclass
class ConditionReport:
    """Verdict and witness constants of one condition check.

    ``margin`` is a signed stability score: positive values point toward
    ``holds`` and negative ones toward ``fails``.  ``details`` keeps the
    per-level and per-ball numbers the verdict was derived from.
    """

    condition: str
    verdict: str
    witness_beta: Optional[float] = None
    witness_L: Optional[float] = None
    worst_sample: Optional[Dict[str, Any]] = None
    margin: float = 0.0
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def as_row(self) -> Dict[str, Any]:
        return {"condition": self.condition, "verdict": self.verdict,
                "witness_beta": self.witness_beta, "witness_L": self.witness_L,
                "margin": self.margin}


@dataclass(frozen=True)
class Sampling:
    """Deterministic x and t samples for the pointwise conditions.

    The x-samples are ``x_count`` equal strata of ``[x_lo, x_hi]`` plus
    points graded geometrically toward both ends down to a relative
    distance ``grading_depth``; the ends themselves are included when
    ``include_endpoints`` is set.
    """

    x_lo: float = -1.0
    x_hi: float = 1.0
    x_count: int = 64
    t_range: Tuple[float, float] = (1e-8, 1e8)
    per_decade: int = 32
    grading_depth: float = 1e-12
    include_endpoints: bool = True

    def __post_init__(self):
        if not self.x_hi >= self.x_lo:
            raise DomainError("x_hi must be at least x_lo")
        if not 0 < self.t_range[0] < self.t_range[1]:
            raise DomainError("t_range needs 0 < lo < hi")
        if self.x_count < 1 or self.per_decade < 1:
            raise DomainError("sample counts must be positive")
        if not 0 < self.grading_depth < 0.5:
            raise DomainError("grading_depth must lie in (0, 0.5)")

    @property
    def xs(self) -> np.ndarray:
        lo, hi = self.x_lo, self.x_hi
        if hi == lo:
            return np.array([lo])
        width = hi - lo
        mids = lo + width * (np.arange(self.x_count) + 0.5) / self.x_count
        n_grade = max(2, int(round(-math.log10(self.grading_depth) * 2)))
        graded = np.geomspace(self.grading_depth, 0.5, n_grade)
        pts = [mids, lo + width * graded, hi - width * graded]
        if self.include_endpoints:
            pts.append(np.array([lo, hi]))
        return np.unique(np.concatenate(pts))

    @property
    def ts(self) -> np.ndarray:
        return log_grid(*self.t_range, self.per_decade)

    def refined(self) -> "Sampling":
        """Twice the density, the t-range squared and the grading squared."""
        lo, hi = self.t_range
        return replace(self, x_count=2 * self.x_count, per_decade=2 * self.per_decade,
                       t_range=(lo * lo if lo < 1 else lo, hi * hi if hi > 1 else hi),
                       grading_depth=self.grading_depth ** 2)


def _xs_for(phi: PhiFunction, sampling: Sampling) -> np.ndarray:
    return sampling.xs if phi.x_dependent else np.array([sampling.x_lo])


def beta_grid_floor(beta: float) -> float:
    """Largest ``2^(-k/8)`` not above ``beta`` (0 below ``2^-64``)."""
    if beta >= 1:
        return 1.0
    if beta <= 0:
        return 0.0
    k = math.ceil(-BETA_STEPS_PER_OCTAVE * math.log2(beta) - 1e-9)
    if k > -BETA_MIN_LOG2 * BETA_STEPS_PER_OCTAVE:
        return 0.0
    return 2.0 ** (-k / BETA_STEPS_PER_OCTAVE)


def _settle(values: Sequence[float], rtol: float = WITNESS_RTOL) -> str:
    """Verdict from a witness measured at two sampling levels."""
    a, b = values
    if not (np.isfinite(a) and np.isfinite(b)) or a <= 0 or b <= 0:
        return FAILS
    return HOLDS if abs(b / a - 1.0) <= rtol else FAILS


def _three_level(measure, sampling: Sampling):
    """Run ``measure`` at three sampling levels; compare the two verdicts."""
    levels = [sampling, sampling.refined(), sampling.refined().refined()]
    results = [measure(s) for s in levels]
    w = [r[0] for r in results]
    first, second = _settle(w[:2]), _settle(w[1:])
    verdict = first if first == second else INCONCLUSIVE
    return verdict, results, first, second


# --------------------------------------------------------------------------
# (aInc)_p and (aDec)_q


def _almost_monotone_constant(phi: PhiFunction, exponent: float, sampling: Sampling,
                              increasing: bool):
    xs = _xs_for(phi, sampling)
    ts = sampling.ts
    with np.errstate(divide="ignore"):
        lg = np.log(np.asarray(phi(xs[:, None], ts[None, :]))) - exponent * np.log(ts)[None, :]
    if not np.all(np.isfinite(lg)):
        bad = np.argwhere(~np.isfinite(lg))[0]
        return math.inf, {"x": float(xs[bad[0]]), "t": float(ts[bad[1]])}
    if increasing:
        # sup over t1 < t2 of g(t1)/g(t2): running max from the left
        run = np.maximum.accumulate(lg, axis=1)
        gap = run - lg
    else:
        # sup over t1 < t2 of g(t2)/g(t1): running max from the right
        run = np.maximum.accumulate(lg[:, ::-1], axis=1)[:, ::-1]
        gap = run - lg
    i, j = np.unravel_index(np.argmax(gap), gap.shape)
    row = lg[i]
    if increasing:
        k = int(np.argmax(row[: j + 1]))
        t1, t2 = ts[k], ts[j]
    else:
        k = j + int(np.argmax(row[j:]))
        t1, t2 = ts[j], ts[k]
    L = float(np.exp(max(gap[i, j], 0.0)))
    return L, {"x": float(xs[i]), "t1": float(t1), "t2": float(t2)}


def _check_almost_monotone(phi, exponent, sampling, increasing, name) -> ConditionReport:
    if not exponent > 0:
        raise DomainError("exponent must be positive")
    sampling = sampling or Sampling()
    verdict, results, first, second = _three_level(
        lambda s: _almost_monotone_constant(phi, exponent, s, increasing), sampling)
    L_values = [r[0] for r in results]
    witness = L_values[-1] if verdict == HOLDS else None
    drift = math.log(L_values[-1] / L_values[0]) if all(map(math.isfinite, L_values)) else math.inf
    return ConditionReport(name, verdict, witness_L=witness, worst_sample=results[-1][1],
                           margin=0.0 - drift,
                           details={"L_levels": L_values, "level_verdicts": [first, second],
                                    "exponent": exponent})


def check_aInc(phi: PhiFunction, p: float, sampling: Optional[Sampling] = None) -> ConditionReport:
    """(aInc)_p: ``phi(x,t1)/t1^p <= L phi(x,t2)/t2^p`` for ``t1 < t2``."""
    return _check_almost_monotone(phi, p, sampling, True, "AIncP")


def check_aDec(phi: PhiFunction, q: float, sampling: Optional[Sampling] = None) -> ConditionReport:
    """(aDec)_q: ``phi(x,t2)/t2^q <= L phi(x,t1)/t1^q`` for ``t1 < t2``."""
    return _check_almost_monotone(phi, q, sampling, False, "ADecQ")


def estimate_exponent_range(phi: PhiFunction, sampling: Optional[Sampling] = None,
                            t_range: Tuple[float, float] = (1e-3, 1e3)) -> Tuple[float, float]:
    """Inf and sup of ``t phi'(x,t)/phi(x,t)`` over the samples."""
    sampling = sampling or Sampling(t_range=t_range)
    xs = _xs_for(phi, sampling)
    ts = log_grid(*t_range, sampling.per_decade)
    X, T = xs[:, None], ts[None, :]
    ratio = T * np.asarray(phi.derivative(X, T)) / np.asarray(phi(X, T))
    return float(np.min(ratio)), float(np.max(ratio))


# --------------------------------------------------------------------------
# (A0)


def _a0_beta(phi: PhiFunction, sampling: Sampling):
    xs = _xs_for(phi, sampling)
    # largest beta with phi(x, beta) <= 1 <= phi(x, 1/beta) at one x is
    # min(inv(x, 1), 1/inv(x, 1)) up to plateaus; the grid search is exact
    ks = np.arange(0, -BETA_MIN_LOG2 * BETA_STEPS_PER_OCTAVE + 1)
    betas = 2.0 ** (-ks / BETA_STEPS_PER_OCTAVE)
    low = np.asarray(phi(xs[:, None], betas[None, :]))
    high = np.asarray(phi(xs[:, None], 1.0 / betas[None, :]))
    ok = (low <= 1.0) & (high >= 1.0)
    good = ok.all(axis=0)
    if not good.any():
        per_x = ok.any(axis=1)
        worst = int(np.argmin(per_x)) if not per_x.all() else 0
        return 0.0, {"x": float(xs[worst])}
    k = int(np.argmax(good))
    beta = float(betas[k])
    # the x that blocks the next finer beta
    worst = None
    if k > 0:
        blocked = ~ok[:, k - 1]
        worst = float(xs[int(np.argmax(blocked))])
    return beta, {"x": worst}


def check_a0(phi: PhiFunction, sampling: Optional[Sampling] = None) -> ConditionReport:
    """(A0): a grid ``beta`` with ``phi(x, beta) <= 1 <= phi(x, 1/beta)`` for all x."""
    sampling = sampling or Sampling()
    verdict, results, first, second = _three_level(lambda s: _a0_beta(phi, s), sampling)
    betas = [r[0] for r in results]
    witness = betas[-1] if verdict == HOLDS else None
    drift = math.log(betas[0] / betas[-1]) if betas[-1] > 0 else math.inf
    return ConditionReport("A0", verdict, witness_beta=witness, worst_sample=results[-1][1],
                           margin=0.0 - drift,
                           details={"beta_levels": betas, "level_verdicts": [first, second]})


# --------------------------------------------------------------------------
# (A1-omega)


@dataclass(frozen=True)
class A1SearchSpec:
    """Ball family and sampling density for the (A1-omega) search."""

    ball_family: Tuple[Ball, ...]
    t_per_decade: int = 16
    x_samples: int = 64
    s_star: Optional[float] = None

    def __post_init__(self):
        if not self.ball_family:
            raise DomainError("empty ball family")
        object.__setattr__(self, "ball_family", tuple(self.ball_family))

    @classmethod
    def dyadic(cls, center: float = 0.0, k_min: int = 1, k_max: int = 12, **kw) -> "A1SearchSpec":
        """Balls ``B(center, 2^-k)`` for ``k = k_min..k_max``."""
        return cls(tuple(Ball(center, 2.0 ** -k) for k in range(k_min, k_max + 1)), **kw)

    def refined(self) -> "A1SearchSpec":
        return replace(self, t_per_decade=2 * self.t_per_decade, x_samples=2 * self.x_samples)


def _ball_beta(phi: PhiFunction, omega: PhiFunction, ball: Ball, spec: A1SearchSpec):
    """Largest beta with ``phi^+_B(beta t) <= phi^-_B(t)`` on the ball's window."""
    xs = ball.samples(spec.x_samples)
    xw = xs if omega.x_dependent else xs[:1]
    # inverse of the lower envelope: max over x of the pointwise inverses
    t_lo = float(np.max(omega.inverse(xw, np.full(xw.shape, 1.0))))
    t_hi = float(np.max(omega.inverse(xw, np.full(xw.shape, 1.0 / ball.measure))))
    if not t_hi >= t_lo:
        return None
    ts = np.unique(np.concatenate([[t_lo, t_hi], log_grid(t_lo, t_hi, spec.t_per_decade)
                                   if t_hi > t_lo else []]))
    xp = xs if phi.x_dependent else xs[:1]
    vals = np.asarray(phi(xp[:, None], ts[None, :]))
    lower = vals.min(axis=0)
    y_arg = vals.argmin(axis=0)
    # inverse of the upper envelope: min over x of the pointwise inverses
    inv = np.asarray(phi.inverse(xp[:, None], np.broadcast_to(lower, vals.shape)))
    upper_inv = inv.min(axis=0)
    x_arg = inv.argmin(axis=0)
    ratios = np.minimum(upper_inv / ts, 1.0)
    j = int(np.argmin(ratios))
    worst = {"x": float(xp[x_arg[j]]), "y": float(xp[y_arg[j]]), "t": float(ts[j]),
             "ball": (float(ball.center), ball.radius)}
    return float(ratios[j]), worst


def _a1_measure(phi, omega, spec):
    betas, worst, skipped = [], [], []
    for ball in spec.ball_family:
        res = _ball_beta(phi, omega, ball, spec)
        if res is None:
            skipped.append((float(ball.center), ball.radius))
            continue
        betas.append(res[0])
        worst.append(res[1])
    return betas, worst, skipped


def _a1_trend(betas: Sequence[float]):
    """Decide from the per-ball betas ordered by decreasing radius.

    ``delta_k = log(beta_{k-1}/beta_k)`` is the loss of beta per halving of
    the radius.  If the losses die out geometrically the betas converge to a
    positive limit, which is extrapolated; if they persist the betas tend to 0.
    """
    b = np.asarray(betas, dtype=float)
    if b.size == 0:
        return HOLDS, 1.0, 1.0
    if b.min() < 2.0 ** BETA_MIN_LOG2:
        return FAILS, 0.0, -1.0
    delta = -np.diff(np.log(b))
    if delta.size == 0 or np.all(delta <= 1e-9):
        return HOLDS, float(b.min()), 1.0
    tail = delta[-4:]
    if np.all(tail > 1e-12) and tail.size >= 2:
        ratios = tail[1:] / tail[:-1]
        ratio = float(ratios.max())
        if ratio < 0.995:
            remaining = tail[-1] * ratio / (1.0 - ratio)
            return HOLDS, float(b.min() * math.exp(-remaining)), 1.0 - ratio
        return FAILS, 0.0, 1.0 - ratio
    # losses oscillate between zero and positive values
    if np.all(tail <= 1e-9):
        return HOLDS, float(b.min()), 1.0
    return FAILS, 0.0, -1.0


def check_a1_omega(phi: PhiFunction, omega: PhiFunction, spec: A1SearchSpec,
                   condition: str = "A1Omega", check_omega_a0: bool = True) -> ConditionReport:
    """(A1-omega): one beta with ``phi(x, beta t) <= phi(y, t)`` on every window.

    For each ball the window ``{t : omega^-_B(t) in [1, 1/|B|]}`` is found by
    inverting the envelope of omega; balls with an empty window are skipped.
    The verdict comes from the trend of the per-ball optimal beta as the
    radii shrink, and is ``inconclusive`` if it changes when the x and t
    samples are doubled.
    """
    if check_omega_a0:
        lo = min(b.interval[0] for b in spec.ball_family)
        hi = max(b.interval[1] for b in spec.ball_family)
        a0 = check_a0(omega, Sampling(lo, hi, x_count=32, per_decade=8))
        if a0.verdict == FAILS:
            raise PreconditionError("omega does not satisfy (A0)")
    levels = []
    for s in (spec, spec.refined()):
        betas, worst, skipped = _a1_measure(phi, omega, s)
        verdict, witness, margin = _a1_trend(betas)
        levels.append((verdict, witness, margin, betas, worst, skipped))
    v0, v1 = levels[0][0], levels[1][0]
    verdict = v0 if v0 == v1 else INCONCLUSIVE
    _, witness, margin, betas, worst, skipped = levels[1]
    worst_sample = None
    if worst:
        worst_sample = worst[int(np.argmin(betas))]
    return ConditionReport(
        condition, verdict,
        witness_beta=beta_grid_floor(min(witness, levels[0][1])) if verdict == HOLDS else None,
        worst_sample=worst_sample, margin=margin,
        details={"ball_betas": betas, "skipped_balls": skipped,
                 "level_verdicts": [v0, v1], "s_star": spec.s_star})


def check_a1s(phi: PhiFunction, s: float, spec: A1SearchSpec) -> ConditionReport:
    """(A1-s): the instance ``omega(t) = t^s``."""
    if not s > 0:
        raise DomainError("s must be positive")
    return check_a1_omega(phi, Power(s), spec, condition="A1S", check_omega_a0=False)


def check_a1(phi: PhiFunction, spec: A1SearchSpec) -> ConditionReport:
    """(A1): the instance ``omega = phi``."""
    return check_a1_omega(phi, phi, spec, condition="A1")


def double_phase_a1_rule(p: float, q: float, alpha: float, n: int = 1, s=None) -> bool:
    """Closed-form verdict: ``alpha >= (n/p)(q-p)``, or ``(n/s)(q-p)`` for (A1-s)."""
    denom = p if s is None else s
    return alpha >= n / denom * (q - p)
