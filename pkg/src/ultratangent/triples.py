"""Triple exponents, betweenness exponent, metric betweenness and the class M.

Argument convention for a triple (x, y, z): the middle point is last.
The exponent s(x, y, z) is the root of d(x,z)**s + d(z,y)**s = d(x,y)**s,
which exists and is unique in [1, inf) when both legs d(x,z), d(z,y)
are strictly shorter than the long side d(x,y); otherwise it is inf.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from . import _backend
from .metric_core import DEFAULT_TOL, Check, FiniteMetricSpace, ToleranceConfig

__all__ = [
    "INFINITY",
    "TripleExponent",
    "PlusTriple",
    "BetweennessExponent",
    "NotMetricTripleError",
    "DegenerateTripleError",
    "solve_s_exponent",
    "triple_s",
    "betweenness_exponent",
    "lies_between",
    "is_in_M_class",
    "enumerate_plus_triples",
    "nonincreasing_rearrangement",
    "power_sum",
]

INFINITY = math.inf


class NotMetricTripleError(ValueError):
    pass


class DegenerateTripleError(ValueError):
    pass


class TripleExponent(NamedTuple):
    value: float
    residual: float = 0.0

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)


class PlusTriple(NamedTuple):
    """(i, j, k) with d(i,k) >= d(i,j) >= d(j,k) > 0."""

    i: int
    j: int
    k: int


class BetweennessExponent(NamedTuple):
    value: float
    triple: tuple[int, int, int] | None  # (x, y, z), z the middle point


def solve_s_exponent(a: float, b: float, c: float, tol: ToleranceConfig = DEFAULT_TOL) -> TripleExponent:
    """Exponent of the metric triple with legs ``a``, ``b`` and long side ``c``.

    >>> solve_s_exponent(0.6, 0.8, 1.0).value
    2.0
    """
    if not (a > 0 and b > 0 and c > 0):
        raise DegenerateTripleError(f"distances must be positive, got ({a}, {b}, {c})")
    if a + b < c * (1 - tol.rel_eq):
        raise NotMetricTripleError(f"{a} + {b} < {c}: not a metric triple")
    s, r = _backend.kernels.solve_s(float(a), float(b), float(c), tol.rel_eq)
    return TripleExponent(s, r)


def _distinct(*idx: int) -> None:
    if len(set(idx)) != len(idx):
        raise ValueError(f"indices must be distinct, got {idx}")


def triple_s(space: FiniteMetricSpace, x: int, y: int, z: int, tol: ToleranceConfig = DEFAULT_TOL) -> TripleExponent:
    _distinct(x, y, z)
    a, b, c = space.d(x, z), space.d(z, y), space.d(x, y)
    if max(a, b) >= c * (1 - tol.rel_eq) or min(a, b) <= 0:
        return TripleExponent(INFINITY, 0.0)
    return solve_s_exponent(a, b, c, tol)


def betweenness_exponent(space: FiniteMetricSpace, tol: ToleranceConfig = DEFAULT_TOL) -> BetweennessExponent:
    """Infimum of s over all ordered triples of distinct points.

    Only the ordering whose long side is the strict maximum of the three
    distances can be finite, so one root per unordered triple is enough.
    """
    if space.n < 3:
        return BetweennessExponent(INFINITY, None)
    s, x, y, z = _backend.kernels.betweenness(space.dist, tol.rel_eq)
    if math.isinf(s):
        return BetweennessExponent(INFINITY, None)
    return BetweennessExponent(float(s), (int(x), int(y), int(z)))


def lies_between(space: FiniteMetricSpace, x: int, y: int, z: int, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff d(x,z) = d(x,y) + d(y,z), i.e. ``y`` lies between ``x`` and ``z``."""
    _distinct(x, y, z)
    lhs = space.d(x, z)
    rhs = space.d(x, y) + space.d(y, z)
    return abs(lhs - rhs) <= tol.rel_eq * max(lhs, rhs)


def is_in_M_class(space: FiniteMetricSpace, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    """Every triple, ordered by distance, is additive.

    Returns ``(ok, witness)``; the witness (x, y, z) is in X+3 order and
    has d(x,z) != d(x,y) + d(y,z).
    """
    if space.n < 3:
        return Check(True, None)
    w = _backend.kernels.m_class_witness(space.dist, tol.rel_eq)
    return Check(w is None, w)


def enumerate_plus_triples(space: FiniteMetricSpace) -> list[PlusTriple]:
    """All ordered (i, j, k) with d(i,k) >= d(i,j) >= d(j,k) > 0 (ties included)."""
    d = space.dist
    n = space.n
    out: list[PlusTriple] = []
    for j in range(n):
        # rows i, columns k, middle j fixed
        dij = d[:, j][:, None]
        djk = d[j, :][None, :]
        ok = (d >= dij) & (dij >= djk) & (djk > 0)
        ok[j, :] = False
        ok[:, j] = False
        np.fill_diagonal(ok, False)
        out.extend(PlusTriple(int(i), j, int(k)) for i, k in zip(*np.nonzero(ok)))
    out.sort()
    return out


def nonincreasing_rearrangement(v: Sequence[float]) -> np.ndarray:
    return np.sort(np.asarray(v, dtype=np.float64))[::-1]


def power_sum(x: Sequence[float], t: float) -> float:
    """(sum x_i**t)**(1/t) for positive entries; ``t = inf`` gives max(x)."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.size == 0 or not np.all(arr > 0):
        raise ValueError("power_sum needs a nonempty vector of positive entries")
    if not t > 0:
        raise ValueError(f"power_sum exponent must be positive, got {t}")
    top = float(arr.max())
    if math.isinf(t):
        return top
    # factor out the max so large t does not overflow
    return top * float(np.sum((arr / top) ** t)) ** (1.0 / t)
