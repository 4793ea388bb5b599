"""Modulars, Luxemburg and Lebesgue norms, and integral means on 1D grids."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import optimize
from scipy.integrate import simpson

from .errors import DomainError, NoConvergence
from .extended import INF, parse_extended
from .phi import Ball, PhiFunction

CLIP_FLOOR = 1e-300


class ClippingWarning(UserWarning):
    """A negative-power mean met zero values and clipped them."""


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a function at the uniform nodes of ``[x_lo, x_hi]``.

    ``derivative`` optionally carries exact derivative values at the same
    nodes; :meth:`gradient` prefers them over finite differences.
    """

    x_lo: float
    x_hi: float
    values: np.ndarray
    derivative: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise DomainError("a grid function needs at least two nodes")
        if not self.x_hi > self.x_lo:
            raise DomainError("interval must have x_hi > x_lo")
        if not np.all(np.isfinite(values)):
            raise DomainError("grid values must be finite")
        object.__setattr__(self, "values", values)
        if self.derivative is not None:
            d = np.asarray(self.derivative, dtype=float)
            if d.shape != values.shape:
                raise DomainError("derivative must match values")
            object.__setattr__(self, "derivative", d)

    @classmethod
    def from_function(cls, f: Callable, x_lo: float, x_hi: float, node_count: int,
                      df: Optional[Callable] = None) -> "GridFunction":
        x = np.linspace(x_lo, x_hi, node_count)
        d = None if df is None else np.asarray(df(x), dtype=float)
        return cls(x_lo, x_hi, np.asarray(f(x), dtype=float), d)

    @property
    def node_count(self) -> int:
        return self.values.size

    @property
    def spacing(self) -> float:
        return (self.x_hi - self.x_lo) / (self.node_count - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_lo, self.x_hi, self.node_count)

    def with_values(self, values, derivative=None) -> "GridFunction":
        return GridFunction(self.x_lo, self.x_hi, values, derivative)

    def __abs__(self):
        d = None if self.derivative is None else np.sign(self.values) * self.derivative
        return self.with_values(np.abs(self.values), d)

    def __mul__(self, k: float):
        d = None if self.derivative is None else k * self.derivative
        return self.with_values(k * self.values, d)

    __rmul__ = __mul__

    def __add__(self, c: float):
        return self.with_values(self.values + c, self.derivative)

    def gradient(self) -> "GridFunction":
        """Derivative as a grid function: exact if known, else central differences."""
        if self.derivative is not None:
            return self.with_values(self.derivative)
        return self.with_values(np.gradient(self.values, self.spacing, edge_order=1))

    def integrate(self) -> float:
        return float(simpson(self.values, dx=self.spacing))

    def restrict(self, ball: Ball) -> "GridFunction":
        """Nodes lying in the closed ball (the ball must fit in the interval)."""
        lo, hi = ball.interval
        tol = 1e-6 * self.spacing
        if lo < self.x_lo - tol or hi > self.x_hi + tol:
            raise DomainError(f"ball {ball.interval} exceeds the grid [{self.x_lo}, {self.x_hi}]")
        x = self.nodes
        inside = (x >= lo - tol) & (x <= hi + tol)
        if inside.sum() < 2:
            raise DomainError("ball contains fewer than two grid nodes")
        idx = np.flatnonzero(inside)
        d = None if self.derivative is None else self.derivative[idx]
        return GridFunction(float(x[idx[0]]), float(x[idx[-1]]), self.values[idx], d)


def _integral(x_lo, x_hi, y) -> float:
    return float(simpson(y, dx=(x_hi - x_lo) / (len(y) - 1)))


def modular(phi: PhiFunction, u: GridFunction) -> float:
    """``int phi(x, |u(x)|) dx`` by composite Simpson."""
    return _integral(u.x_lo, u.x_hi, np.asarray(phi(u.nodes, np.abs(u.values))))


def luxemburg_norm(phi: PhiFunction, u: GridFunction, rtol: float = 1e-10) -> float:
    """``inf{lam > 0 : modular(phi, u/lam) <= 1}`` by bracketing and Brent's method."""
    if not np.any(u.values):
        return 0.0
    x, a = u.nodes, np.abs(u.values)

    def rho(lam):
        with np.errstate(over="ignore"):
            v = _integral(u.x_lo, u.x_hi, np.asarray(phi(x, a / lam)))
        return np.inf if np.isnan(v) else v

    hi = float(np.max(a))
    for _ in range(2000):
        if rho(hi) <= 1.0:
            break
        hi *= 2.0
        if hi > 1e300:
            raise NoConvergence("no finite bracket for the Luxemburg norm", partial=hi)
    lo = hi / 2.0
    for _ in range(2000):
        if rho(lo) > 1.0:
            break
        hi, lo = lo, lo / 2.0
        if lo < 1e-300:
            return hi
    # rho is non-increasing in lam; root of log(rho) in log(lam), capped so
    # infinite values only slow Brent down to bisection
    def g(log_lam):
        return min(math.log(max(rho(math.exp(log_lam)), 1e-300)), 700.0)

    left, right = math.log(lo), math.log(hi)
    g_left, g_right = g(left), g(right)
    # exp(log(.)) may move an endpoint by an ulp; then the root sits at that endpoint
    if g_right >= 0.0:
        return hi
    if g_left <= 0.0:
        return math.exp(left)
    root = optimize.brentq(g, left, right, xtol=1e-300, rtol=rtol / 4, maxiter=400)
    lam = math.exp(root)
    # return the admissible side of the bracket
    for _ in range(8):
        if rho(lam) <= 1.0:
            return lam
        lam *= 1.0 + rtol / 4
    return min(lam, hi)


def sobolev_norm(phi: PhiFunction, u: GridFunction) -> float:
    """``||u||_phi + ||u'||_phi``."""
    return luxemburg_norm(phi, u) + luxemburg_norm(phi, u.gradient())


def lebesgue_norm(u: GridFunction, s, normalized: bool = False) -> float:
    """``(int |u|^s)^(1/s)``, or the averaged version; ``s = INF`` gives the max."""
    s = parse_extended(s)
    if s is INF:
        return float(np.max(np.abs(u.values)))
    if s <= 0:
        raise DomainError("s must be positive; use integral_mean_power for s <= 0")
    total = _integral(u.x_lo, u.x_hi, np.abs(u.values) ** s)
    if normalized:
        total /= u.x_hi - u.x_lo
    return float(total ** (1.0 / s))


def integral_mean_power(u: GridFunction, ell: float, ball: Optional[Ball] = None) -> float:
    """``(mean over ball of u^ell)^(1/ell)`` for ``ell`` of either sign."""
    if ell == 0:
        raise DomainError("ell must be non-zero")
    w = u if ball is None else u.restrict(ball)
    vals = w.values
    if np.any(vals < 0):
        raise DomainError("integral means of powers need u >= 0")
    if ell < 0 and np.any(vals <= 0):
        warnings.warn("zero values clipped for a negative-power mean", ClippingWarning)
        vals = np.maximum(vals, CLIP_FLOOR)
    if vals.min() == vals.max():
        # every power mean of a constant is the constant; skip the rounding
        return float(vals[0])
    mean = _integral(w.x_lo, w.x_hi, vals ** ell) / (w.x_hi - w.x_lo)
    return float(mean ** (1.0 / ell))


def ess_bounds(u: GridFunction, ball: Ball) -> Tuple[float, float]:
    """Node minimum and maximum inside the closed ball."""
    lo, hi = ball.interval
    x = u.nodes
    tol = 1e-6 * u.spacing
    inside = (x >= lo - tol) & (x <= hi + tol)
    if not inside.any():
        raise DomainError("ball contains no grid nodes")
    v = u.values[inside]
    return float(v.min()), float(v.max())


def holder_check(phi: PhiFunction, u: GridFunction, v: GridFunction) -> float:
    """``int |u||v| / (||u||_phi ||v||_phi*)``; at most 2 for any Phi-function."""
    if (u.x_lo, u.x_hi, u.node_count) != (v.x_lo, v.x_hi, v.node_count):
        raise DomainError("u and v must share a grid")
    su, sv = float(np.max(np.abs(u.values))), float(np.max(np.abs(v.values)))
    if su == 0 or sv == 0:
        return 0.0
    # the ratio is invariant under scaling u and v; normalize to avoid underflow
    u, v = u.with_values(u.values / su), v.with_values(v.values / sv)
    num = _integral(u.x_lo, u.x_hi, np.abs(u.values) * np.abs(v.values))
    nu = luxemburg_norm(phi, u)
    nv = luxemburg_norm(phi.conjugate_function(), v)
    if nu == 0 or nv == 0:
        return 0.0
    return num / (nu * nv)
