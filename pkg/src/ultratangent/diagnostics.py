"""Pair and triple diagnostics around a marked point, and their limit estimators.

All four base quantities (F, Phi, Psi, s) are ratios of distances, so
they are invariant under rescaling the space.  Conventions that make the
criteria total: 1/Phi is inf when Phi = 0; Psi is inf when a side is 0;
in the s1 criterion the factor (s/(s1 - s))**2 is 1 when s is inf and
inf when s equals s1.

Verdicts returned by :func:`estimate_limit` are heuristics: a finite
computation cannot settle a limit taken over all sequences of triples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import _backend
from .metric_core import DEFAULT_TOL, FiniteMetricSpace, PointedSpace, ToleranceConfig, ball_indices
from .triples import TripleExponent, triple_s

__all__ = [
    "HEURISTIC_WARNING",
    "QUANTITIES",
    "EstimationError",
    "TripleDiagnostics",
    "LimitEstimate",
    "f_value",
    "phi_value",
    "psi_value",
    "psi_from_distances",
    "ultra_criterion",
    "s1_criterion",
    "plus_order",
    "triple_diagnostics",
    "geometric_schedule",
    "distance_schedule",
    "estimate_limit",
]

HEURISTIC_WARNING = (
    "limit verdicts are heuristic: they summarize finitely many triples in "
    "a finite radius schedule and prove nothing about the limit"
)
QUANTITIES = ("ultra", "s1", "F", "Phi")


class EstimationError(ValueError):
    pass


def f_value(pointed: PointedSpace, x: int, y: int) -> float:
    """d(x,y) * min(d(x,p), d(y,p)) / max(d(x,p), d(y,p))**2, and 0 at (p, p)."""
    d = pointed.space.dist
    p = pointed.base
    return _f(d[x, y], d[x, p], d[y, p])


def _f(dxy: float, dxp: float, dyp: float) -> float:
    hi = max(dxp, dyp)
    if hi <= 0:
        return 0.0
    return float((dxy / hi) * (min(dxp, dyp) / hi))


def phi_value(pointed: PointedSpace, x: int, y: int, z: int) -> float:
    return max(f_value(pointed, x, y), f_value(pointed, x, z), f_value(pointed, y, z))


def psi_from_distances(a: float, b: float, c: float) -> float:
    lo = min(a, b, c)
    if lo <= 0:
        return math.inf
    return max(a, b, c) / lo


def psi_value(space: FiniteMetricSpace, x: int, y: int, z: int) -> float:
    if len({x, y, z}) != 3:
        raise ValueError(f"indices must be distinct, got {(x, y, z)}")
    return psi_from_distances(space.d(x, y), space.d(y, z), space.d(x, z))


def _ultra(s: float, psi: float, phi: float) -> float:
    if math.isinf(s) or math.isinf(psi) or phi <= 0:
        return math.inf
    return s * psi / phi


def _s1(s: float, psi: float, phi: float, s1: float, rel: float) -> float:
    if math.isinf(s):
        factor = 1.0
    elif abs(s - s1) <= rel * s1:
        return math.inf
    else:
        factor = (s / (s1 - s)) ** 2
    if math.isinf(psi) or phi <= 0:
        return math.inf
    return psi * factor / phi


def ultra_criterion(pointed: PointedSpace, x: int, y: int, z: int, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """s(x,y,z) * Psi / Phi with s taken literally (z is the middle point)."""
    s = triple_s(pointed.space, x, y, z, tol).value
    return _ultra(s, psi_value(pointed.space, x, y, z), phi_value(pointed, x, y, z))


def s1_criterion(
    pointed: PointedSpace, x: int, y: int, z: int, s1: float, tol: ToleranceConfig = DEFAULT_TOL
) -> float:
    """Psi * s**2 / (Phi * (s1 - s)**2) for a triple in X+3 order.

    X+3 order means d(x,z) >= d(x,y) >= d(y,z); the exponent is taken with
    ``y`` as the middle point, i.e. the root of
    d(x,y)**s + d(y,z)**s = d(x,z)**s.
    """
    if not s1 > 0:
        raise ValueError(f"s1 must be positive, got {s1}")
    s = triple_s(pointed.space, x, z, y, tol).value
    return _s1(s, psi_value(pointed.space, x, y, z), phi_value(pointed, x, y, z), s1, tol.rel_eq)


@dataclass(frozen=True)
class TripleDiagnostics:
    triple: tuple[int, int, int]
    distances: tuple[float, float, float]  # d(x,y), d(x,z), d(y,z)
    to_base: tuple[float, float, float]  # d(x,p), d(y,p), d(z,p)
    s: TripleExponent
    F_xy: float
    F_xz: float
    F_yz: float
    Phi: float
    Psi: float
    crit_ultra: float
    crit_s1: float | None = None

    def as_dict(self) -> dict:
        out = {
            "triple": list(self.triple),
            "distances": list(self.distances),
            "to_base": list(self.to_base),
            "s": self.s.value,
            "s_residual": self.s.residual,
            "F_xy": self.F_xy,
            "F_xz": self.F_xz,
            "F_yz": self.F_yz,
            "Phi": self.Phi,
            "Psi": self.Psi,
            "crit_ultra": self.crit_ultra,
        }
        if self.crit_s1 is not None:
            out["crit_s1"] = self.crit_s1
        return out


def plus_order(space: FiniteMetricSpace, x: int, y: int, z: int) -> tuple[int, int, int]:
    """Reorder a triple so that d(x,z) >= d(x,y) >= d(y,z)."""
    # each side is labelled by its opposite vertex
    sides = sorted(((space.d(v, w), u) for u, v, w in ((x, y, z), (y, x, z), (z, x, y))), reverse=True)
    return sides[2][1], sides[0][1], sides[1][1]


def triple_diagnostics(
    pointed: PointedSpace, x: int, y: int, z: int, s1: float | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> TripleDiagnostics:
    sp = pointed.space
    s = triple_s(sp, x, y, z, tol)
    fxy, fxz, fyz = f_value(pointed, x, y), f_value(pointed, x, z), f_value(pointed, y, z)
    phi = max(fxy, fxz, fyz)
    psi = psi_value(sp, x, y, z)
    crit_s1 = None
    if s1 is not None:
        crit_s1 = s1_criterion(pointed, *plus_order(sp, x, y, z), s1, tol)
    return TripleDiagnostics(
        triple=(x, y, z),
        distances=(sp.d(x, y), sp.d(x, z), sp.d(y, z)),
        to_base=(pointed.dp(x), pointed.dp(y), pointed.dp(z)),
        s=s,
        F_xy=fxy,
        F_xz=fxz,
        F_yz=fyz,
        Phi=phi,
        Psi=psi,
        crit_ultra=_ultra(s.value, psi, phi),
        crit_s1=crit_s1,
    )


# -- limit estimation -------------------------------------------------------


@dataclass(frozen=True)
class LimitEstimate:
    quantity: str
    schedule: tuple[float, ...]
    infima: tuple[float, ...]
    suprema: tuple[float, ...]
    counts: tuple[int, ...]  # admissible tuples inside each ball
    evaluated: tuple[int, ...]  # tuples actually evaluated
    exhaustive: tuple[bool, ...]
    verdict: str  # "diverges", "bounded", "vanishes", "inconclusive"
    budget: int
    seed: int
    s1: float | None = None
    threshold: float = 1e3
    warning: str = HEURISTIC_WARNING
    argmin: tuple[tuple[int, ...], ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "s1": self.s1,
            "schedule": list(self.schedule),
            "infima": list(self.infima),
            "suprema": list(self.suprema),
            "counts": list(self.counts),
            "evaluated": list(self.evaluated),
            "exhaustive": list(self.exhaustive),
            "argmin": [list(t) for t in self.argmin],
            "verdict": self.verdict,
            "heuristic": True,
            "budget": self.budget,
            "seed": self.seed,
            "threshold": self.threshold,
            "warning": self.warning,
        }


def geometric_schedule(pointed: PointedSpace, ratio: float = 0.5, steps: int = 8, start: float | None = None) -> list[float]:
    """Radii start, start*ratio, ...; ``start`` defaults to half the diameter."""
    if not 0 < ratio < 1:
        raise ValueError("schedule ratio must lie in (0, 1)")
    if steps < 1:
        raise ValueError("schedule needs at least one step")
    eps0 = pointed.space.diameter() / 2 if start is None else float(start)
    if not eps0 > 0:
        raise ValueError("schedule start must be positive")
    return [eps0 * ratio**k for k in range(steps)]


def distance_schedule(pointed: PointedSpace, min_points: int = 3, steps: int | None = None) -> list[float]:
    """Radii at the distinct distances d(x, p), largest first.

    Each radius is kept only while its ball still holds ``min_points``
    points besides p.  Useful for spaces whose points sit at widely
    separated scales, where a halving schedule yields repeated balls.
    """
    dp = np.delete(pointed.space.dist[:, pointed.base], pointed.base)
    radii = np.unique(dp)[::-1]
    out = [float(r) for r in radii if np.count_nonzero(dp <= r) >= min_points]
    return out[:steps] if steps is not None else out


def _admissible(pointed: PointedSpace, radius: float, tol: ToleranceConfig) -> np.ndarray:
    idx = ball_indices(pointed, radius, tol)
    return idx[idx != pointed.base]


def _sample(m: int, arity: int, budget: int, rng: np.random.Generator):
    """Index tuples drawn with replacement, rows with repeats dropped (prefix-stable in budget)."""
    raw = rng.integers(0, m, size=(budget, arity))
    ok = np.ones(budget, dtype=bool)
    for a in range(arity):
        for b in range(a + 1, arity):
            ok &= raw[:, a] != raw[:, b]
    return np.sort(raw[ok], axis=1)


def _all_tuples(m: int, arity: int) -> np.ndarray:
    if arity == 2:
        i, j = np.triu_indices(m, 1)
        return np.stack([i, j], axis=1)
    return np.fromiter(
        (v for t in combinations(range(m), 3) for v in t), dtype=np.intp, count=3 * math.comb(m, 3)
    ).reshape(-1, 3)


def _evaluate(pointed: PointedSpace, pts: np.ndarray, tuples: np.ndarray, quantity: str, s1, tol) -> np.ndarray:
    d = pointed.space.dist
    p = pointed.base
    if quantity == "F":
        x, y = pts[tuples[:, 0]], pts[tuples[:, 1]]
        return _backend._kernels_py.f_many(d[x, y], d[x, p], d[y, p])
    tri = pts[tuples]
    s, psi, phi = _backend.kernels.triple_quantities(d, p, tri, tol.rel_eq)
    if quantity == "Phi":
        return phi
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_phi = np.where(phi > 0, 1.0 / np.where(phi > 0, phi, 1.0), np.inf)
        if quantity == "ultra":
            out = s * psi * inv_phi
        else:
            factor = np.where(
                np.isinf(s),
                1.0,
                np.where(np.abs(s - s1) <= tol.rel_eq * s1, np.inf, (s / np.where(s == s1, 1.0, s1 - s)) ** 2),
            )
            out = psi * factor * inv_phi
    # any infinite factor makes the product infinite; never emit NaN
    return np.where(np.isnan(out), np.inf, out)


def _verdict(quantity: str, infima: list[float], suprema: list[float], threshold: float, vanish_ratio: float, tol) -> str:
    if len(infima) < 3:
        return "inconclusive"
    if quantity in ("F", "Phi"):
        last = suprema[-3:]
        if last[-1] <= tol.zero_dist:
            return "vanishes"
        if all(b < a and b <= vanish_ratio * a for a, b in zip(last, last[1:])):
            return "vanishes"
        if max(last) <= 1.1 * min(last):
            return "bounded"
        return "inconclusive"
    last = infima[-3:]
    if all(b >= a for a, b in zip(last, last[1:])) and last[-1] > threshold:
        return "diverges"
    if all(math.isfinite(v) for v in last) and max(last) <= 1.1 * min(last):
        return "bounded"
    return "inconclusive"


def estimate_limit(
    pointed: PointedSpace,
    quantity: str,
    schedule: Sequence[float] | None = None,
    budget: int = 200_000,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
    s1: float | None = None,
    threshold: float = 1e3,
    vanish_ratio: float = 0.5,
) -> LimitEstimate:
    """Per-radius infimum (and supremum) of a quantity over tuples in the punctured ball.

    ``quantity`` is one of ``"ultra"`` (all distinct triples), ``"s1"``
    (triples in X+3 order, ``s1`` required), ``"F"`` (pairs) or
    ``"Phi"`` (triples).  For a valid metric space every distinct triple
    has an X+3 ordering and the s, Psi, Phi values do not depend on which
    one is used, so each unordered triple is evaluated once.

    Verdict rules, on the last three radii:

    * ``ultra``/``s1``: "diverges" if the infima are nondecreasing and
      the final one exceeds ``threshold``; "bounded" if they are finite
      and agree within 10%.
    * ``F``/``Phi``: "vanishes" if the final supremum is below
      ``tol.zero_dist`` or the suprema strictly decrease by at least the
      factor ``vanish_ratio`` at each step; "bounded" if they agree
      within 10%.

    Anything else is "inconclusive".
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}, got {quantity!r}")
    if quantity == "s1":
        if s1 is None or not s1 > 0:
            raise ValueError("the s1 quantity needs a positive s1")
    else:
        s1 = None
    if schedule is None:
        schedule = geometric_schedule(pointed)
    schedule = [float(r) for r in schedule]
    if not schedule:
        raise EstimationError("radius schedule is empty")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise EstimationError("radius schedule must be strictly decreasing")
    if budget < 1:
        raise ValueError("budget must be positive")
    arity = 2 if quantity == "F" else 3
    streams = np.random.SeedSequence(seed).spawn(len(schedule))
    infima, suprema, counts, evaluated, exhaustive, argmin = [], [], [], [], [], []
    for radius, stream in zip(schedule, streams):
        pts = _admissible(pointed, radius, tol)
        m = pts.size
        if m < arity:
            raise EstimationError(
                f"ball of radius {radius:.6g} holds {m} point(s) besides the base; {arity} needed"
            )
        total = math.comb(m, arity)
        if total <= budget:
            tuples = _all_tuples(m, arity)
            exhaustive.append(True)
        else:
            tuples = _sample(m, arity, budget, np.random.default_rng(stream))
            exhaustive.append(False)
        vals = _evaluate(pointed, pts, tuples, quantity, s1, tol)
        t = int(np.argmin(vals))
        infima.append(float(vals[t]))
        suprema.append(float(vals.max()))
        argmin.append(tuple(int(v) for v in pts[tuples[t]]))
        counts.append(total)
        evaluated.append(int(tuples.shape[0]))
    verdict = _verdict(quantity, infima, suprema, threshold, vanish_ratio, tol)
    return LimitEstimate(
        quantity=quantity,
        schedule=tuple(schedule),
        infima=tuple(infima),
        suprema=tuple(suprema),
        counts=tuple(counts),
        evaluated=tuple(evaluated),
        exhaustive=tuple(exhaustive),
        verdict=verdict,
        budget=budget,
        seed=seed,
        s1=s1,
        threshold=threshold,
        argmin=tuple(argmin),
    )
