"""A dedicated positive-infinity value for extended-real quantities.

Exponents such as the limiting integrability exponent or the Lebesgue
index ``s`` may be infinite.  They are represented by :data:`INF` rather
than ``float('inf')`` so that code paths handling the infinite case are
explicit.
"""

from __future__ import annotations

import numbers


class _Infinity:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __float__(self):
        return float("inf")

    def __reduce__(self):
        return (_Infinity, ())

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("orliczlab.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()


def is_inf(value) -> bool:
    return value is INF


def parse_extended(value) -> "float | _Infinity":
    """Convert user input (``'inf'``, ``float('inf')``, numbers) to an extended real."""
    if value is INF:
        return INF
    if isinstance(value, str):
        if value.strip().lower() in {"inf", "infinity", "oo", "∞"}:
            return INF
        value = float(value)
    if isinstance(value, numbers.Real):
        value = float(value)
        if value == float("inf"):
            return INF
        return value
    raise TypeError(f"cannot interpret {value!r} as an extended real")


def to_float(value) -> float:
    return float("inf") if value is INF else float(value)
