"""Finite metric spaces: validation, ultrametric test, snowflake transform.

Distances are stored densely as read-only float64 matrices.  Every
comparison of two distances uses a relative slack scaled by the larger
side of the comparison, because distances in the generated examples
span dozens of orders of magnitude.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _backend

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "FiniteMetricSpace",
    "PointedSpace",
    "Violation",
    "StructureError",
    "MetricViolationError",
    "SnowflakeError",
    "Check",
    "check_metric",
    "validate_metric",
    "is_ultrametric",
    "snowflake",
    "from_points",
    "ball_indices",
    "restrict_to_ball",
]


class StructureError(ValueError):
    """Input cannot be interpreted as a distance matrix at all."""


class MetricViolationError(ValueError):
    """A square matrix failed one or more metric axioms."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        head = "; ".join(str(v) for v in violations[:5])
        more = f" (+{len(violations) - 5} more)" if len(violations) > 5 else ""
        super().__init__(f"{len(violations)} metric axiom violation(s): {head}{more}")


class SnowflakeError(ValueError):
    """d**t is not a metric; ``triple`` is (x, z, y) with d(x,z)**t > d(x,y)**t + d(y,z)**t."""

    def __init__(self, t: float, triple: tuple[int, int, int], lhs: float, rhs: float):
        self.t = t
        self.triple = triple
        super().__init__(
            f"d**{t:g} violates the triangle inequality at {triple}: {lhs:.6g} > {rhs:.6g}"
        )


@dataclass(frozen=True)
class ToleranceConfig:
    rel_eq: float = 1e-9
    root_tol: float = 1e-12
    zero_dist: float = 1e-9

    def __post_init__(self):
        for name in ("rel_eq", "root_tol", "zero_dist"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.rel_eq < 1:
            raise ValueError("rel_eq must be < 1")

    def as_dict(self) -> dict:
        return {"rel_eq": self.rel_eq, "root_tol": self.root_tol, "zero_dist": self.zero_dist}


DEFAULT_TOL = ToleranceConfig()


class Violation(NamedTuple):
    """One failed axiom.  ``where`` holds the offending indices."""

    kind: str  # "diagonal", "negative", "zero", "asymmetry", "triangle", "nonfinite"
    where: tuple[int, ...]
    detail: str

    def __str__(self):
        return f"{self.kind} at {self.where}: {self.detail}"

    def as_dict(self) -> dict:
        return {"kind": self.kind, "where": list(self.where), "detail": self.detail}


class Check(NamedTuple):
    ok: bool
    witness: tuple[int, int, int] | None


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """``labels`` and a validated symmetric distance matrix ``dist``.

    Build instances through :func:`validate_metric` or the generators;
    the constructor itself only checks shapes.
    """

    labels: tuple[str, ...]
    dist: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.array(self.dist, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise StructureError(f"distance matrix must be square, got shape {d.shape}")
        if len(self.labels) != d.shape[0]:
            raise StructureError(f"{len(self.labels)} labels for a {d.shape[0]}-point matrix")
        if len(set(self.labels)) != len(self.labels):
            raise StructureError("labels must be unique")
        d.setflags(write=False)
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        object.__setattr__(self, "dist", d)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise KeyError(f"no point labelled {label!r}") from None

    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    def subspace(self, indices: Sequence[int]) -> FiniteMetricSpace:
        idx = np.asarray(list(indices), dtype=np.intp)
        return FiniteMetricSpace(tuple(self.labels[i] for i in idx), self.dist[np.ix_(idx, idx)])

    def as_dict(self) -> dict:
        return {"labels": list(self.labels), "dist": self.dist.tolist()}


@dataclass(frozen=True)
class PointedSpace:
    space: FiniteMetricSpace
    base: int

    def __post_init__(self):
        if not 0 <= self.base < self.space.n:
            raise IndexError(f"base index {self.base} outside a {self.space.n}-point space")

    def dp(self, i: int) -> float:
        return float(self.space.dist[i, self.base])


def _as_square(matrix) -> np.ndarray:
    try:
        d = np.array(matrix, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise StructureError(f"distance matrix is not numeric: {exc}") from None
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise StructureError(f"distance matrix must be square, got shape {d.shape}")
    return d


def check_metric(matrix, tol: ToleranceConfig = DEFAULT_TOL) -> list[Violation]:
    """List every axiom violation of a square matrix (empty list means a metric).

    Triangle failures are reported as (x, z, y) meaning
    d(x,z) > d(x,y) + d(y,z), each unordered x < z once.
    """
    d = _as_square(matrix)
    n = d.shape[0]
    out: list[Violation] = []
    if not np.all(np.isfinite(d)):
        for i, j in zip(*np.nonzero(~np.isfinite(d))):
            out.append(Violation("nonfinite", (int(i), int(j)), f"entry {d[i, j]}"))
        return out
    for i in np.nonzero(np.diag(d) != 0)[0]:
        out.append(Violation("diagonal", (int(i), int(i)), f"d = {d[i, i]:.17g}"))
    off = ~np.eye(n, dtype=bool)
    for i, j in zip(*np.nonzero((d < 0) & off)):
        out.append(Violation("negative", (int(i), int(j)), f"d = {d[i, j]:.17g}"))
    for i, j in zip(*np.nonzero((d == 0) & off)):
        if i < j:
            out.append(Violation("zero", (int(i), int(j)), "distinct points at distance 0"))
    scale = np.maximum(np.abs(d), np.abs(d.T))
    asym = np.abs(d - d.T) > tol.rel_eq * scale
    for i, j in zip(*np.nonzero(np.triu(asym, 1))):
        out.append(
            Violation("asymmetry", (int(i), int(j)), f"{d[i, j]:.17g} != {d[j, i]:.17g}")
        )
    # triangle: d[x,z] <= d[x,y] + d[y,z]; one pass per middle point y
    for y in range(n):
        rhs = d[:, y][:, None] + d[y, :][None, :]
        bad = d > rhs + tol.rel_eq * np.maximum(d, rhs)
        bad[y, :] = False
        bad[:, y] = False
        bad = np.triu(bad, 1)
        for x, z in zip(*np.nonzero(bad)):
            out.append(
                Violation(
                    "triangle",
                    (int(x), int(z), y),
                    f"{d[x, z]:.17g} > {d[x, y]:.17g} + {d[y, z]:.17g}",
                )
            )
    order = {"nonfinite": 0, "diagonal": 1, "negative": 2, "zero": 3, "asymmetry": 4, "triangle": 5}
    out.sort(key=lambda v: (order[v.kind], v.where))
    return out


def validate_metric(
    matrix, labels: Sequence[str] | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> FiniteMetricSpace:
    """Return a :class:`FiniteMetricSpace` or raise :class:`MetricViolationError`.

    >>> validate_metric([[0, 1], [1, 0]]).n
    2
    """
    d = _as_square(matrix)
    violations = check_metric(d, tol)
    if violations:
        raise MetricViolationError(violations)
    if labels is None:
        labels = [str(i) for i in range(d.shape[0])]
    # symmetrize exactly so downstream code can rely on d[i,j] == d[j,i]
    d = np.maximum(d, d.T)
    return FiniteMetricSpace(tuple(labels), d)


def is_ultrametric(space: FiniteMetricSpace, tol: ToleranceConfig = DEFAULT_TOL) -> Check:
    """Ultra-triangle test; the witness (x, y, z) has d(x,y) > max(d(x,z), d(y,z))."""
    w = _backend.kernels.ultrametric_witness(space.dist, tol.rel_eq)
    return Check(w is None, w)


def snowflake(space: FiniteMetricSpace, t: float, tol: ToleranceConfig = DEFAULT_TOL) -> FiniteMetricSpace:
    """The space with distances d**t.

    For t <= 1 this always succeeds.  For t > 1 the triangle inequality
    is rechecked and :class:`SnowflakeError` names the first failure.
    """
    if not t > 0:
        raise ValueError(f"snowflake exponent must be positive, got {t}")
    if t == 1:
        return space
    d = space.dist**t
    if t > 1:
        for v in check_metric(d, tol):
            if v.kind == "triangle":
                x, z, y = v.where
                raise SnowflakeError(t, v.where, float(d[x, z]), float(d[x, y] + d[y, z]))
    return FiniteMetricSpace(space.labels, d)


def from_points(
    points, metric_kind: str = "euclidean", labels: Sequence[str] | None = None
) -> FiniteMetricSpace:
    """Pairwise distances of planar (or any-dimensional) points under the chosen norm."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[0] == 0 or pts.size == 0:
        raise StructureError("at least one point is required")
    if pts.ndim != 2:
        raise StructureError("points must be a list of coordinate tuples")
    if len({tuple(p) for p in pts.tolist()}) != pts.shape[0]:
        raise StructureError("duplicate points are not allowed")
    diff = np.abs(pts[:, None, :] - pts[None, :, :])
    if metric_kind == "euclidean":
        d = np.sqrt((diff**2).sum(axis=-1))
    elif metric_kind == "linf":
        d = diff.max(axis=-1)
    else:
        raise ValueError(f"unknown metric kind {metric_kind!r} (use 'euclidean' or 'linf')")
    if labels is None:
        labels = [str(i) for i in range(pts.shape[0])]
    return FiniteMetricSpace(tuple(labels), d)


def ball_indices(pointed: PointedSpace, radius: float, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Indices x with d(x, p) <= radius, in the original order (p included)."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    dp = pointed.space.dist[:, pointed.base]
    mask = dp <= radius * (1 + tol.rel_eq)
    mask[pointed.base] = True
    return np.nonzero(mask)[0]


def restrict_to_ball(
    pointed: PointedSpace, radius: float, tol: ToleranceConfig = DEFAULT_TOL
) -> FiniteMetricSpace:
    return pointed.space.subspace(ball_indices(pointed, radius, tol))
