"""Isometric embeddings into the real line and pseudo-linear quadruples."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .metric_core import DEFAULT_TOL, FiniteMetricSpace, StructureError, ToleranceConfig

__all__ = [
    "LineEmbedding",
    "EmbeddingFailure",
    "QuadrupleParams",
    "embed_into_line",
    "detect_pseudo_linear_quadruple",
    "realize_quadruple_linf",
]


@dataclass(frozen=True)
class LineEmbedding:
    labels: tuple[str, ...]
    coordinates: tuple[float, ...]
    max_error: float
    anchor: tuple[int, int]

    ok = True

    def as_dict(self) -> dict:
        return {
            "ok": True,
            "coordinates": dict(zip(self.labels, self.coordinates)),
            "max_error": self.max_error,
            "anchor": list(self.anchor),
        }


@dataclass(frozen=True)
class EmbeddingFailure:
    pair: tuple[int, int]
    gap: float
    distance: float
    max_error: float

    ok = False

    def as_dict(self) -> dict:
        return {"ok": False, "pair": list(self.pair), "gap": self.gap, "distance": self.distance, "max_error": self.max_error}


@dataclass(frozen=True)
class QuadrupleParams:
    s: float
    t: float
    labeling: tuple[int, int, int, int]

    def as_dict(self) -> dict:
        return {"s": self.s, "t": self.t, "labeling": list(self.labeling)}


def embed_into_line(space: FiniteMetricSpace, tol: ToleranceConfig = DEFAULT_TOL):
    """Place every point at its distance from one end of a diametral pair.

    Returns a :class:`LineEmbedding` with coord(a) = 0 and coord(b) > 0,
    or an :class:`EmbeddingFailure` naming the worst pair.
    """
    n = space.n
    D = space.dist
    if n == 0:
        return LineEmbedding((), (), 0.0, (0, 0))
    if n == 1:
        return LineEmbedding(space.labels, (0.0,), 0.0, (0, 0))
    # every end of a diametral pair is tried so that max_error does not depend
    # on labels; among equal errors the lowest index endpoint wins
    diam = D.max()
    best = None
    for a in range(n):
        far = np.nonzero(D[a] == diam)[0]
        if far.size == 0:
            continue
        coord = D[a].copy()
        gaps = np.abs(coord[:, None] - coord[None, :])
        err = np.abs(gaps - D)
        worst = float(err.max())
        if best is None or worst < best[0]:
            best = (worst, a, int(far[0]), coord, gaps, err)
    worst, a, b, coord, gaps, err = best
    if (err > tol.rel_eq * diam).any():
        i, j = (int(v) for v in np.unravel_index(int(np.argmax(err)), err.shape))
        i, j = min(i, j), max(i, j)
        return EmbeddingFailure((i, j), float(gaps[i, j]), float(D[i, j]), worst)
    _sphere_check(coord, tol)
    return LineEmbedding(space.labels, tuple(float(c) for c in coord), worst, (a, b))


def _sphere_check(coord: np.ndarray, tol: ToleranceConfig) -> None:
    # a sphere of the line has at most two points
    for x in range(coord.size):
        r = np.sort(np.abs(np.delete(coord, x) - coord[x]))
        if r.size >= 3:
            close = np.abs(r[2:] - r[:-2]) <= tol.rel_eq * np.maximum(r[2:], 1e-300)
            if close.any():
                raise AssertionError(f"three points equidistant from point {x} in a line embedding")


def _close(u: float, v: float, tol: ToleranceConfig) -> bool:
    return abs(u - v) <= tol.rel_eq * max(abs(u), abs(v))


def detect_pseudo_linear_quadruple(space: FiniteMetricSpace, tol: ToleranceConfig = DEFAULT_TOL):
    """Find a labeling with d01 = d23 = s, d12 = d03 = t, d02 = d13 = s + t.

    Returns :class:`QuadrupleParams` with s <= t, or None.
    """
    if space.n != 4:
        raise StructureError(f"pseudo-linear quadruples have 4 points, got {space.n}")
    D = space.dist
    for lab in itertools.permutations(range(4)):
        p0, p1, p2, p3 = lab
        s, t = D[p0, p1], D[p1, p2]
        if not (s > 0 and t > 0):
            continue
        if (
            _close(D[p2, p3], s, tol)
            and _close(D[p0, p3], t, tol)
            and _close(D[p0, p2], s + t, tol)
            and _close(D[p1, p3], s + t, tol)
        ):
            if s > t:
                # relabel (p1, p2, p3, p0) swaps the roles of s and t
                s, t = t, s
                lab = (p1, p2, p3, p0)
            return QuadrupleParams(float(s), float(t), tuple(int(v) for v in lab))
    return None


def realize_quadruple_linf(s: float, t: float) -> np.ndarray:
    """Four points of the l-infinity plane carrying the (s, t) quadruple."""
    if not (s > 0 and t > 0):
        raise ValueError(f"s and t must be positive, got ({s}, {t})")
    return np.array([[0.0, 0.0], [s, s], [s + t, s - t], [t, -t]])

