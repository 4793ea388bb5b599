"""Generalized Orlicz (Musielak-Orlicz) Phi-functions.

A Phi-function is a map ``phi(x, t)`` that is non-decreasing in ``t >= 0``
with ``phi(x, 0) = 0``.  The classes here evaluate such functions on numpy
arrays (``x`` and ``t`` broadcast against each other) and provide the
left-continuous inverse, the convex conjugate, the x-free auxiliary
function built from the infimum over a ball, and the Sobolev conjugate.

Built-in families
-----------------
``Power``              scale * t**p
``VariableExponent``   a(x) * t**p(x)
``DoublePhase``        t**p + a(x) t**q  (``form="sum"``), or the function
                       whose t-derivative is max{t**(p-1), a(x) t**(q-1)}
                       (``form="max"``)
``PowerLog``           t**p(x) * log(e + t)
``Custom``             any user evaluator
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gamma

from .errors import DomainError, NoConvergence, UnsupportedOperation

ArrayLike = Union[float, np.ndarray, Sequence[float]]

DEFAULT_PER_DECADE = 512
DEFAULT_T_RANGE = (1e-8, 1e8)
INVERSE_RTOL = 1e-12
CONJUGATE_RTOL = 1e-10

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def log_grid(lo: float, hi: float, per_decade: int = DEFAULT_PER_DECADE) -> np.ndarray:
    """Deterministic log-spaced grid on ``[lo, hi]`` with both endpoints."""
    if not (0 < lo < hi):
        raise DomainError(f"log grid needs 0 < lo < hi, got {lo}, {hi}")
    n = max(2, int(math.ceil(math.log10(hi / lo) * per_decade)) + 1)
    return np.geomspace(lo, hi, n)


def _scalarize(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


def _as_t(t, name="t", strict=False) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    bad = t <= 0 if strict else t < 0
    if np.any(bad):
        bound = "positive" if strict else "non-negative"
        raise DomainError(f"{name} must be {bound}")
    return t


def _as_x(x) -> np.ndarray:
    return np.asarray(0.0 if x is None else x, dtype=float)


# --------------------------------------------------------------------------
# coefficients


@dataclass(frozen=True)
class Coefficient:
    """A non-negative coefficient ``a(x)`` with optional Hoelder data."""

    func: Callable[[np.ndarray], np.ndarray]
    holder_exponent: Optional[float] = None
    holder_constant: Optional[float] = None
    name: str = "custom"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = np.asarray(self.func(x), dtype=float)
        return np.broadcast_to(v, x.shape) if v.shape != x.shape else v

    @classmethod
    def constant(cls, value: float) -> "Coefficient":
        if value < 0:
            raise DomainError("coefficient must be non-negative")
        return cls(lambda x: np.full_like(x, value, dtype=float), 1.0, 0.0,
                   name=f"const({value})")

    @classmethod
    def degenerate(cls, alpha: float) -> "Coefficient":
        """``max{-x, 0}**alpha``: vanishes for x >= 0."""
        if alpha <= 0:
            raise DomainError("alpha must be positive")
        return cls(lambda x: np.maximum(-x, 0.0) ** alpha,
                   min(alpha, 1.0), 1.0 if alpha <= 1 else None,
                   name=f"max(-x,0)^{alpha}")

    @classmethod
    def abs_power(cls, alpha: float) -> "Coefficient":
        """``|x|**alpha``: vanishes only at the origin."""
        if alpha <= 0:
            raise DomainError("alpha must be positive")
        return cls(lambda x: np.abs(x) ** alpha,
                   min(alpha, 1.0), 1.0 if alpha <= 1 else None,
                   name=f"|x|^{alpha}")

    def holder_ratio(self, xs: ArrayLike) -> float:
        """Largest ``|a(x)-a(y)| / |x-y|**alpha`` over sampled pairs."""
        if self.holder_exponent is None:
            raise UnsupportedOperation("no Hoelder exponent declared")
        xs = np.unique(np.asarray(xs, dtype=float))
        a = self(xs)
        dx = np.abs(xs[:, None] - xs[None, :])
        da = np.abs(a[:, None] - a[None, :])
        off = dx > 0
        return float(np.max(da[off] / dx[off] ** self.holder_exponent))


def _coefficient(value) -> Coefficient:
    if isinstance(value, Coefficient):
        return value
    if callable(value):
        return Coefficient(value)
    return Coefficient.constant(float(value))


# --------------------------------------------------------------------------
# generic numerics


def generalized_inverse(f: Callable[[np.ndarray], np.ndarray], y: ArrayLike,
                        rtol: float = INVERSE_RTOL) -> np.ndarray:
    """Smallest ``t`` with ``f(t) >= y`` for a non-decreasing ``f``, elementwise.

    ``f`` maps an array of ``t`` (same shape as ``y``) to values.  The
    bracket is grown geometrically, then bisected in log scale until the
    relative width is below ``rtol``; the upper end is returned, so
    ``f(result) >= y`` always holds.  ``y = 0`` maps to 0.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("inverse is defined for y >= 0")
    out = np.zeros_like(y)
    live = y > 0
    if not np.any(live):
        return out

    def fv(t):
        full = np.ones_like(y)
        full[live] = t
        with np.errstate(all="ignore"):
            v = np.asarray(f(full), dtype=float)
        v = np.broadcast_to(v, y.shape)[live]
        return np.where(np.isnan(v), np.inf, v)

    target = y[live]
    hi = np.ones_like(target)
    for _ in range(250):
        short = (fv(hi) < target) & (hi < 1e300)
        if not short.any():
            break
        hi = np.where(short, hi * 16.0, hi)
    if np.any(fv(hi) < target):
        raise NoConvergence("could not bracket the inverse", partial={"upper": hi})
    lo = hi / 16.0
    for _ in range(250):
        over = (fv(lo) >= target) & (lo > 1e-300)
        if not over.any():
            break
        hi = np.where(over, lo, hi)
        lo = np.where(over, lo / 16.0, lo)
    for _ in range(200):
        if np.all(hi - lo <= rtol * hi):
            break
        mid = np.sqrt(lo * hi)
        mid = np.where(mid <= lo, 0.5 * (lo + hi), mid)
        up = fv(mid) >= target
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    out[live] = hi
    return out


def _golden_max(h: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray,
                rtol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized golden-section maximization of a unimodal ``h`` on ``[lo, hi]``."""
    a, b = lo.copy(), hi.copy()
    for _ in range(300):
        if np.all(b - a <= rtol * np.maximum(b, 1e-300)):
            break
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        left = h(c) >= h(d)
        b = np.where(left, d, b)
        a = np.where(left, a, c)
    s = 0.5 * (a + b)
    return s, h(s)


# --------------------------------------------------------------------------
# Phi-functions


class PhiFunction:
    """Base class for Phi-functions ``phi(x, t)``.

    Subclasses implement ``_value`` and may override ``_derivative``,
    ``_inverse`` and ``_conjugate`` with closed forms.
    """

    x_dependent = True
    declared_exponents: Optional[Tuple[float, float]] = None

    def _check_declared(self):
        if self.declared_exponents is not None:
            p, q = self.declared_exponents
            if not (0 < p <= q):
                raise DomainError(f"declared exponents need 0 < p <= q, got {(p, q)}")

    def __call__(self, x, t):
        t = _as_t(t)
        with np.errstate(over="ignore", invalid="ignore"):
            v = self._value(_as_x(x), t)
        v = np.where(t == 0, 0.0, v)
        return _scalarize(v)

    eval = __call__

    def derivative(self, x, t):
        """t-derivative ``phi'(x, t)`` for ``t > 0``."""
        t = _as_t(t, strict=True)
        return _scalarize(self._derivative(_as_x(x), t))

    def inverse(self, x, y):
        """Left-continuous inverse: smallest ``t`` with ``phi(x, t) >= y``."""
        y = _as_t(y, "y")
        x = _as_x(x)
        x, y = np.broadcast_arrays(x, y)
        out = self._inverse(np.array(x), np.array(y))
        return _scalarize(np.where(y == 0, 0.0, out))

    def conjugate(self, x, t):
        """Convex conjugate ``sup_{s >= 0} (s t - phi(x, s))``."""
        t = _as_t(t)
        if self.declared_exponents is not None and self.declared_exponents[0] <= 1:
            raise UnsupportedOperation(
                "conjugate needs superlinear growth (declared p > 1)")
        x = _as_x(x)
        x, t = np.broadcast_arrays(x, t)
        return _scalarize(self._conjugate(np.array(x), np.array(t)))

    # defaults -----------------------------------------------------------

    def _value(self, x, t):
        raise NotImplementedError

    def _derivative(self, x, t):
        raise UnsupportedOperation(f"{type(self).__name__} has no analytic derivative")

    def _inverse(self, x, y):
        return generalized_inverse(lambda t: self(x, t), y)

    def _conjugate(self, x, t, chunk: int = 256):
        flat_x, flat_t = x.ravel(), t.ravel()
        out = np.zeros(flat_t.shape)
        for start in range(0, flat_t.size, chunk):
            sl = slice(start, start + chunk)
            out[sl] = self._conjugate_chunk(flat_x[sl], flat_t[sl])
        return out.reshape(t.shape)

    def _conjugate_chunk(self, x, t):
        lo_exp, hi_exp = -12, 12
        xc = x[:, None]
        tc = t[:, None]

        def gain(s):
            with np.errstate(all="ignore"):
                v = tc * s - self._value(xc, s)
            return np.where(np.isnan(v), -np.inf, v)

        while True:
            s = np.logspace(lo_exp, hi_exp, 8 * (hi_exp - lo_exp) + 1)[None, :]
            vals = gain(s)
            k = np.argmax(vals, axis=1)
            best = vals[np.arange(len(t)), k]
            at_top = (k == s.shape[1] - 1) & (t > 0)
            at_bottom = (k == 0) & (best > 0)
            if at_top.any():
                if hi_exp >= 300:
                    raise UnsupportedOperation(
                        "conjugate is infinite or beyond 1e300 (sup not attained)")
                hi_exp = min(hi_exp + 48, 300)
                continue
            if at_bottom.any() and lo_exp > -300:
                lo_exp = max(lo_exp - 48, -300)
                continue
            break
        s = s[0]
        k = np.clip(k, 1, len(s) - 2)
        lo, hi = s[k - 1], s[k + 1]

        def gain_1d(sv):
            with np.errstate(all="ignore"):
                v = t * sv - self._value(x, sv)
            return np.where(np.isnan(v), -np.inf, v)

        _, refined = _golden_max(gain_1d, lo, hi, CONJUGATE_RTOL)
        return np.maximum(np.maximum(refined, best), 0.0)

    # derived functions --------------------------------------------------

    def conjugate_function(self) -> "Custom":
        """The conjugate as a Phi-function in its own right."""
        declared = None
        if self.declared_exponents is not None:
            p, q = self.declared_exponents
            if p > 1:
                declared = (q / (q - 1), p / (p - 1))
        return Custom(lambda x, t: self.conjugate(x, t), declared_exponents=declared,
                      x_dependent=self.x_dependent, name=f"({self!r})*")

    def work_function(self) -> "Custom":
        """``t * phi'(x, t)``, equivalent to phi within the factor range [p, q]."""

        def work(x, t):
            t = np.asarray(t, dtype=float)
            safe = np.where(t > 0, t, 1.0)
            return np.where(t > 0, safe * self._derivative(x, safe), 0.0)

        return Custom(work, declared_exponents=self.declared_exponents,
                      x_dependent=self.x_dependent, name=f"t*{self!r}'")

    def lower_envelope(self, xs: ArrayLike) -> Callable:
        """``t -> min over xs of phi(x, t)``, the sampled infimum over a set."""
        return _Envelope(self, np.asarray(xs, dtype=float).ravel(), np.min)

    def upper_envelope(self, xs: ArrayLike) -> Callable:
        """``t -> max over xs of phi(x, t)``, the sampled supremum over a set."""
        return _Envelope(self, np.asarray(xs, dtype=float).ravel(), np.max)


class _Envelope:
    def __init__(self, phi, xs, reduce):
        self.phi, self.xs, self.reduce = phi, xs, reduce

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        xs = self.xs if self.phi.x_dependent else self.xs[:1]
        xs = xs.reshape((-1,) + (1,) * t.ndim)
        return self.reduce(np.asarray(self.phi(xs, t[None, ...])), axis=0)


class Power(PhiFunction):
    """``scale * t**p``, independent of x."""

    x_dependent = False

    def __init__(self, p: float, scale: float = 1.0):
        if p <= 0 or scale <= 0:
            raise DomainError("Power needs p > 0 and scale > 0")
        self.p, self.scale = float(p), float(scale)
        self.declared_exponents = (self.p, self.p)

    def __repr__(self):
        return f"Power({self.p:g})" if self.scale == 1 else f"Power({self.p:g}, scale={self.scale:g})"

    def _value(self, x, t):
        return np.broadcast_to(self.scale * t ** self.p, np.broadcast_shapes(x.shape, t.shape))

    def _derivative(self, x, t):
        return np.broadcast_to(self.scale * self.p * t ** (self.p - 1),
                               np.broadcast_shapes(x.shape, t.shape))

    def _inverse(self, x, y):
        return (y / self.scale) ** (1.0 / self.p)

    def _conjugate(self, x, t):
        p, k = self.p, self.scale
        return t * (1.0 - 1.0 / p) * (t / (k * p)) ** (1.0 / (p - 1.0))


class VariableExponent(PhiFunction):
    """``a(x) * t**p(x)`` (weight ``a`` defaults to 1)."""

    def __init__(self, exponent, weight=None,
                 declared_exponents: Optional[Tuple[float, float]] = None):
        self.exponent = _coefficient(exponent)
        self.weight = None if weight is None else _coefficient(weight)
        self.declared_exponents = declared_exponents
        self._check_declared()

    def __repr__(self):
        w = "" if self.weight is None else f", weight={self.weight.name}"
        return f"VariableExponent({self.exponent.name}{w})"

    def _a(self, x):
        return 1.0 if self.weight is None else self.weight(x)

    def _value(self, x, t):
        return self._a(x) * t ** self.exponent(x)

    def _derivative(self, x, t):
        px = self.exponent(x)
        return self._a(x) * px * t ** (px - 1.0)

    def _inverse(self, x, y):
        a = self._a(x)
        with np.errstate(divide="ignore"):
            return (y / a) ** (1.0 / self.exponent(x))


class PowerLog(PhiFunction):
    """``t**p(x) * log(e + t)``."""

    def __init__(self, exponent, declared_exponents: Optional[Tuple[float, float]] = None):
        self.exponent = _coefficient(exponent)
        self.declared_exponents = declared_exponents
        self._check_declared()

    def __repr__(self):
        return f"PowerLog({self.exponent.name})"

    def _value(self, x, t):
        return t ** self.exponent(x) * np.log(math.e + t)

    def _derivative(self, x, t):
        px = self.exponent(x)
        return px * t ** (px - 1.0) * np.log(math.e + t) + t ** px / (math.e + t)


class DoublePhase(PhiFunction):
    """Double phase function with exponents ``p <= q`` and coefficient ``a``.

    ``form="sum"`` gives ``t**p + a(x) t**q``.  ``form="max"`` gives the
    function with ``phi(x, 0) = 0`` and ``phi'(x, t) = max{t**(p-1), a(x) t**(q-1)}``,
    equivalent to the sum form up to constants; its value, derivative and
    inverse are all closed form.
    """

    def __init__(self, p: float, q: float, a, form: str = "sum"):
        if not (0 < p <= q):
            raise DomainError(f"DoublePhase needs 0 < p <= q, got p={p}, q={q}")
        if form not in ("sum", "max"):
            raise DomainError("form must be 'sum' or 'max'")
        self.p, self.q = float(p), float(q)
        self.a = _coefficient(a)
        self.form = form
        self.declared_exponents = (self.p, self.q)

    def __repr__(self):
        return f"DoublePhase(p={self.p:g}, q={self.q:g}, a={self.a.name}, form={self.form!r})"

    def crossover(self, x):
        """``t`` where ``t**(p-1) = a(x) t**(q-1)`` (infinite where a = 0)."""
        a = self.a(_as_x(x))
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(a > 0, a ** (-1.0 / (self.q - self.p)), np.inf) \
                if self.q > self.p else np.full_like(a, np.inf)

    def _value(self, x, t):
        p, q = self.p, self.q
        a = self.a(x)
        aq = np.where(a > 0, a * t ** q, 0.0)
        if self.form == "sum":
            return t ** p + aq
        if q == p:
            return np.maximum(1.0, a) * t ** p / p
        tc = self.crossover(x)
        upper = tc ** p * (1.0 / p - 1.0 / q) + aq / q
        return np.where(t <= tc, t ** p / p, upper)

    def _derivative(self, x, t):
        p, q = self.p, self.q
        a = self.a(x)
        aq = np.where(a > 0, a * t ** (q - 1.0), 0.0)
        if self.form == "sum":
            return p * t ** (p - 1.0) + q * aq
        return np.maximum(t ** (p - 1.0), aq)

    def _inverse(self, x, y):
        if self.form == "sum":
            return super()._inverse(x, y)
        p, q = self.p, self.q
        a = self.a(x)
        if q == p:
            return (p * y / np.maximum(1.0, a)) ** (1.0 / p)
        tc = self.crossover(x)
        knee = tc ** p / p
        with np.errstate(all="ignore"):
            upper = ((y - tc ** p * (1.0 / p - 1.0 / q)) * q / a) ** (1.0 / q)
        return np.where(y <= knee, (p * y) ** (1.0 / p), upper)


class Custom(PhiFunction):
    """Wraps a user evaluator ``func(x, t)`` (vectorized over numpy arrays)."""

    def __init__(self, func, derivative=None, inverse=None,
                 declared_exponents: Optional[Tuple[float, float]] = None,
                 x_dependent: bool = True, name: str = "custom"):
        self.func = func
        self._deriv = derivative
        self._inv = inverse
        self.declared_exponents = declared_exponents
        self.x_dependent = x_dependent
        self.name = name
        self._check_declared()

    def __repr__(self):
        return f"Custom({self.name})"

    def _value(self, x, t):
        return np.asarray(self.func(x, t), dtype=float)

    def _derivative(self, x, t):
        if self._deriv is None:
            return super()._derivative(x, t)
        return np.asarray(self._deriv(x, t), dtype=float)

    def _inverse(self, x, y):
        if self._inv is None:
            return super()._inverse(x, y)
        return np.asarray(self._inv(x, y), dtype=float)


# --------------------------------------------------------------------------
# balls and growth fields


@dataclass(frozen=True)
class Ball:
    """Open ball ``B(center, radius)`` in R^dim; an interval when dim = 1."""

    center: Union[float, Tuple[float, ...]]
    radius: float
    dim: int = 1

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("ball radius must be positive")
        if self.dim < 1:
            raise DomainError("ball dimension must be >= 1")
        if self.dim > 1 and len(np.atleast_1d(self.center)) != self.dim:
            raise DomainError("center does not match the dimension")

    @classmethod
    def from_interval(cls, lo: float, hi: float) -> "Ball":
        return cls(0.5 * (lo + hi), 0.5 * (hi - lo))

    @property
    def measure(self) -> float:
        n = self.dim
        return math.pi ** (n / 2) / gamma(n / 2 + 1) * self.radius ** n

    @property
    def interval(self) -> Tuple[float, float]:
        if self.dim != 1:
            raise UnsupportedOperation("interval is only defined in 1D")
        c = float(self.center)
        return c - self.radius, c + self.radius

    def samples(self, count: int = 64) -> np.ndarray:
        """Deterministic stratified points of the closed ball (1D).

        ``count`` strata of equal width; the nodes include both endpoints and
        the center.
        """
        lo, hi = self.interval
        count = max(2, int(count))
        count += count % 2
        return np.linspace(lo, hi, count + 1)

    def scaled(self, factor: float) -> "Ball":
        return Ball(self.center, self.radius * factor, self.dim)


@dataclass(frozen=True)
class GrowthField:
    """Vector field ``f(x, xi) = phi'(x, |xi|) xi/|xi|`` with growth constants.

    ``nu`` and ``lam`` are the constants of the two-sided growth bound
    ``nu phi(x,|xi|) <= f.xi`` and ``|f| |xi| <= lam phi(x,|xi|)``.
    """

    phi: PhiFunction
    nu: float
    lam: float

    def __post_init__(self):
        if not (0 < self.nu <= self.lam):
            raise DomainError("growth constants need 0 < nu <= lambda")

    @classmethod
    def canonical(cls, phi: PhiFunction) -> "GrowthField":
        if phi.declared_exponents is None:
            raise DomainError("canonical field needs declared exponents")
        if isinstance(phi, DoublePhase) and phi.form == "sum":
            return cls(phi, 1.0, phi.q)
        p, q = phi.declared_exponents
        return cls(phi, p, q)

    def flux(self, x, xi):
        xi = np.asarray(xi, dtype=float)
        mag = np.abs(xi)
        safe = np.where(mag > 0, mag, 1.0)
        return _scalarize(np.where(mag > 0, self.phi.derivative(x, safe) * np.sign(xi), 0.0))

    def bound_violation(self, x, xi) -> float:
        """Largest relative violation of the growth bounds over sampled (x, xi)."""
        x, xi = np.broadcast_arrays(np.asarray(x, float), np.asarray(xi, float))
        f = np.asarray(self.flux(x, xi))
        ph = np.asarray(self.phi(x, np.abs(xi)))
        scale = np.maximum(ph, 1e-300)
        low = (self.nu * ph - f * xi) / scale
        high = (np.abs(f) * np.abs(xi) - self.lam * ph) / scale
        return float(max(np.max(low), np.max(high)))


# --------------------------------------------------------------------------
# the auxiliary x-free function on a ball


def psi_sandwich_constants(p: float, q: float, L_p: float = 1.0, L_q: float = 1.0):
    """Constants ``(c1, c2)`` with ``c1 phi_B^-(t) <= psi_r(t) <= c2 phi_B^-(t)``.

    Upper: the running supremum of ``phi^-(s)/s^p`` over ``s <= tau <= t`` is at most
    ``L_p phi^-(t)/t^p``, so ``psi_r(t) <= (L_p/p) phi^-(t)``.
    Lower: integrating over ``[t/2, t]`` only gives
    ``psi_r(t) >= (2^p - 1)/p * phi^-(t/2) >= (2^p - 1)/(p 2^q L_q) phi^-(t)``.
    """
    return (2.0 ** p - 1.0) / (p * 2.0 ** q * L_q), L_p / p


class PsiR:
    """``psi_r(t) = int_0^t tau^(p-1) sup_{0<s<=tau} phi_B^-(s)/s^p dtau``.

    ``phi_B^-`` is the infimum of ``phi(x, .)`` over stratified samples of the
    ball.  The running supremum is tabulated on a log grid (``per_decade``
    nodes per decade) and interpolated linearly between nodes; the outer
    integral of the interpolant is exact, so the only discretization knob is
    the grid density.  Below the first node the supremum is held constant.
    """

    def __init__(self, phi: PhiFunction, ball: Ball, p: Optional[float] = None,
                 n_samples: int = 64, per_decade: int = DEFAULT_PER_DECADE,
                 t_range: Tuple[float, float] = DEFAULT_T_RANGE):
        if p is None:
            if phi.declared_exponents is None:
                raise DomainError("psi_r needs the (aInc) exponent p")
            p = phi.declared_exponents[0]
        if p < 1:
            raise DomainError("psi_r needs p >= 1")
        self.phi, self.ball, self.p = phi, ball, float(p)
        self.xs = ball.samples(n_samples)
        if self.xs.size == 0:
            raise DomainError("empty sampling")
        self.per_decade = per_decade
        self.phi_minus = phi.lower_envelope(self.xs)
        self._lock = threading.Lock()
        self._build(*t_range)

    def __repr__(self):
        return f"PsiR({self.phi!r}, {self.ball!r})"

    def _build(self, lo, hi):
        s = log_grid(lo, hi, self.per_decade)
        p = self.p
        g = self.phi_minus(s) / s ** p
        if not np.all(np.isfinite(g)):
            raise NoConvergence("phi^- is not finite on the grid", partial=None)
        m = np.maximum.accumulate(g)
        slope = np.diff(m) / np.diff(s)
        seg = self._segment(s[:-1], s[1:], m[:-1], slope)
        cum = np.concatenate([[m[0] * s[0] ** p / p], m[0] * s[0] ** p / p + np.cumsum(seg)])
        self._s, self._m, self._slope, self._cum = s, m, slope, cum

    def _segment(self, a, b, ma, k):
        p = self.p
        return (ma - k * a) * (b ** p - a ** p) / p + k * (b ** (p + 1) - a ** (p + 1)) / (p + 1)

    def _ensure(self, t_max):
        with self._lock:
            if t_max > self._s[-1]:
                hi = 10.0 ** math.ceil(math.log10(t_max) + 1)
                self._build(self._s[0], hi)

    def sup_ratio(self, t):
        """The running supremum ``sup_{s<=t} phi^-(s)/s^p`` (interpolated)."""
        t = _as_t(t)
        self._ensure(float(np.max(t, initial=0.0)))
        s, m = self._s, self._m
        return _scalarize(np.interp(t, s, m, left=m[0]))

    def __call__(self, t):
        t = _as_t(t)
        self._ensure(float(np.max(t, initial=0.0)))
        s, m, slope, cum = self._s, self._m, self._slope, self._cum
        p = self.p
        idx = np.clip(np.searchsorted(s, t, side="right") - 1, 0, len(s) - 2)
        below = t < s[0]
        inside = cum[idx] + self._segment(s[idx], np.maximum(t, s[idx]), m[idx], slope[idx])
        out = np.where(below, m[0] * t ** p / p, inside)
        return _scalarize(out)

    def derivative(self, t):
        t = _as_t(t, strict=True)
        return _scalarize(t ** (self.p - 1) * np.asarray(self.sup_ratio(t)))


def psi_r(phi: PhiFunction, ball: Ball, t, n_samples: int = 64,
          per_decade: int = DEFAULT_PER_DECADE, p: Optional[float] = None):
    """Evaluate the auxiliary function of ``phi`` on ``ball`` at ``t``."""
    t_arr = _as_t(t)
    hi = max(DEFAULT_T_RANGE[1], float(np.max(t_arr, initial=0.0)) * 10)
    return PsiR(phi, ball, p=p, n_samples=n_samples, per_decade=per_decade,
                t_range=(DEFAULT_T_RANGE[0], hi))(t_arr)


def sobolev_conjugate_inverse(omega: PhiFunction, t, n: int):
    """``(omega#)^{-1}(t) = t^(-1/n) omega^{-1}(t)`` for an x-independent omega."""
    t = _as_t(t, strict=True)
    if n < 1:
        raise DomainError("dimension must be >= 1")
    if omega.declared_exponents is not None and omega.declared_exponents[1] > n:
        raise DomainError("omega must satisfy (Dec)_n for its Sobolev conjugate to exist")
    return _scalarize(t ** (-1.0 / n) * np.asarray(omega.inverse(None, t)))
