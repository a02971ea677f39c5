"""Example spaces and randomized fixtures.

Every generator returns a :class:`Generated` bundle: the (pointed) space,
and where one exists a family description that ``pretangent.family_from_dict``
accepts, with the base point labelled ``"p"``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .metric_core import (
    DEFAULT_TOL,
    FiniteMetricSpace,
    PointedSpace,
    ToleranceConfig,
    from_points,
    is_ultrametric,
    snowflake,
    validate_metric,
)
from .pretangent import Rate
from .line_geometry import realize_quadruple_linf

__all__ = [
    "GeneratorError",
    "Generated",
    "GeneratorSpec",
    "gen_prop29",
    "gen_example37",
    "gen_random_ultrametric",
    "gen_line_sample",
    "snowflaked",
    "line_family",
]


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class Generated:
    pointed: PointedSpace
    family: dict | None = None
    coordinates: np.ndarray | None = field(default=None, compare=False)

    @property
    def space(self) -> FiniteMetricSpace:
        return self.pointed.space


def _log2_terms(rule, count: int) -> list[float]:
    if isinstance(rule, Rate):
        return [rule.log2(n) for n in range(1, count + 1)]
    out = []
    for n in range(1, count + 1):
        v = float(rule(n))
        if not v > 0:
            raise GeneratorError(f"term {n} of the sequence is {v}, not positive")
        out.append(math.log2(v))
    return out


def _check_divergent_ratio(logs: list[float]) -> None:
    """Terms strictly decrease and the ratio b_n / b_(n+1) strictly increases."""
    steps = [a - b for a, b in zip(logs, logs[1:])]  # log2 of b_n / b_(n+1)
    if any(not s > 0 for s in steps):
        raise GeneratorError("sequence is not strictly decreasing over the window")
    if len(steps) < 2 or any(not b > a for a, b in zip(steps, steps[1:])):
        raise GeneratorError(
            "ratio b_n / b_(n+1) does not increase over the window; the construction needs it to diverge"
        )


def _as_rate(rule) -> Rate | Callable[[int], float]:
    if isinstance(rule, str):
        return Rate(rule)
    if isinstance(rule, dict):
        return Rate(rule["rule"], rule.get("params", {}))
    return rule


def gen_prop29(b_rule=None, depth: int = 6, tol: ToleranceConfig = DEFAULT_TOL) -> Generated:
    """{0} together with b_1 > ... > b_depth on the real line, based at 0.

    ``b_rule`` is a :class:`Rate`, a rule name, or a callable n -> b_n;
    default 2**(-n**2).  The family {p, (b_n), (b_(n+1))} normalized by
    b_n is attached when the rule is a named rate.
    """
    rule = _as_rate(b_rule if b_rule is not None else Rate("exp2_neg_square"))
    if depth < 3:
        raise GeneratorError("depth must be at least 3 to see the ratio grow")
    logs = _log2_terms(rule, depth)
    _check_divergent_ratio(logs)
    pts = np.array([0.0] + [2.0**v for v in logs])
    if np.any(pts[1:] == 0):
        raise GeneratorError("terms underflow double precision at this depth")
    labels = ["p"] + [f"b{n}" for n in range(1, depth + 1)]
    space = validate_metric(np.abs(pts[:, None] - pts[None, :]), labels, tol)
    family = None
    if isinstance(rule, Rate):
        rate = rule.as_dict()
        family = {
            "host": {"kind": "norm", "norm": "abs"},
            "normalizer": {"kind": "rate", **rate},
            "base": "p",
            "sequences": [
                {"label": "p", "kind": "constant", "point": [0.0]},
                {"label": "b_n", "kind": "rate", **rate, "point": [1.0]},
                {"label": "b_n+1", "kind": "rate", **rate, "point": [1.0], "shift": 1},
            ],
        }
    return Generated(PointedSpace(space, 0), family, pts)


def gen_example37(
    s: float = 1.0,
    t: float = 2.0,
    r_rule=None,
    depth: int = 4,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> Generated:
    """Union of the scaled quadruples r_n * Y in the l-infinity plane, based at the origin.

    Y = {p0, ..., p3} is the (s, t) quadruple with p0 at the origin, so the
    origin is shared by all levels and the space has 3 * depth + 1 points.
    ``r_rule`` defaults to 4**(-n**2).
    """
    rule = _as_rate(r_rule if r_rule is not None else Rate("exp2_neg_square", {"c": 2.0}))
    if depth < 3:
        raise GeneratorError("depth must be at least 3 to see the ratio grow")
    logs = _log2_terms(rule, depth)
    _check_divergent_ratio(logs)
    Y = realize_quadruple_linf(s, t)
    pts = [Y[0]]
    labels = ["p"]
    for n, lg in enumerate(logs, start=1):
        for i in range(1, 4):
            pts.append((2.0**lg) * Y[i])
            labels.append(f"r{n}p{i}")
    space = from_points(np.array(pts), "linf", labels)
    space = validate_metric(space.dist, labels, tol)
    family = None
    if isinstance(rule, Rate):
        family = {
            "host": {"kind": "norm", "norm": "linf", "dim": 2},
            "normalizer": {"kind": "rate", **rule.as_dict()},
            "base": "p",
            "sequences": [{"label": "p", "kind": "constant", "point": [0.0, 0.0]}]
            + [{"label": f"x{i}", "kind": "self_similar", "seed": Y[i].tolist()} for i in range(4)],
        }
    return Generated(PointedSpace(space, 0), family, np.array(pts))


def gen_random_ultrametric(n: int, seed: int = 0, normalize: bool = False) -> FiniteMetricSpace:
    """Distances from random pairwise merges at strictly increasing heights.

    With ``normalize`` the diameter is scaled to 1.
    """
    if n < 2:
        raise GeneratorError("a random ultrametric needs n >= 2")
    rng = np.random.default_rng(seed)
    heights = np.cumsum(rng.uniform(0.1, 1.0, n - 1))
    if normalize:
        heights = heights / heights[-1]
    clusters = [[i] for i in range(n)]
    D = np.zeros((n, n))
    for h in heights:
        a, b = sorted(rng.choice(len(clusters), size=2, replace=False))
        for x in clusters[a]:
            for y in clusters[b]:
                D[x, y] = D[y, x] = h
        clusters[a] = clusters[a] + clusters.pop(b)
    space = validate_metric(D, [f"u{i}" for i in range(n)])
    if not is_ultrametric(space).ok:
        raise AssertionError("merge construction produced a non-ultrametric space")
    return space


def gen_line_sample(n: int, range: float = 1.0, seed: int = 0) -> Generated:
    """``n`` distinct reals in (0, range] together with the base point 0."""
    if n < 2:
        raise GeneratorError("a line sample needs n >= 2")
    if not range > 0:
        raise GeneratorError("range must be positive")
    rng = np.random.default_rng(seed)
    xs = np.unique(range * (1.0 - rng.random(n)))
    while xs.size < n:
        xs = np.unique(np.concatenate([xs, range * (1.0 - rng.random(n - xs.size))]))
    xs = rng.permutation(xs)
    pts = np.concatenate([[0.0], xs])
    labels = ["p"] + [f"x{i}" for i in np.arange(1, n + 1)]
    space = validate_metric(np.abs(pts[:, None] - pts[None, :]), labels)
    return Generated(PointedSpace(space, 0), line_family(pts[1:]), pts)


def line_family(coords, power: float = 1.0, normalizer: dict | None = None) -> dict:
    """Self-similar sequences r_n**(1/power) * y on the line with metric |x - y|**power."""
    return {
        "host": {"kind": "norm", "norm": "abs", "power": power},
        "normalizer": normalizer or {"kind": "geometric", "q": 0.5},
        "base": "p",
        "sequences": [{"label": "p", "kind": "constant", "point": [0.0]}]
        + [{"label": f"y{i}", "kind": "self_similar", "seed": [float(c)]} for i, c in enumerate(coords, start=1)],
    }


def snowflaked(inner: Generated, exponent: float, tol: ToleranceConfig = DEFAULT_TOL) -> Generated:
    """d -> d**exponent on the space; a self-similar line family follows along."""
    space = snowflake(inner.space, exponent, tol)
    family = None
    fam = inner.family
    if fam and fam["host"].get("kind") == "norm" and all(
        s["kind"] in ("constant", "self_similar") for s in fam["sequences"]
    ):
        power = fam["host"].get("power", 1.0) * exponent
        if power <= 1:
            family = {**fam, "host": {**fam["host"], "power": power}}
    return Generated(PointedSpace(space, inner.pointed.base), family, inner.coordinates)


_KINDS = ("prop29", "example37", "random_ultrametric", "line_sample", "snowflaked")


@dataclass(frozen=True)
class GeneratorSpec:
    """A JSON-friendly generator call: ``{"kind": ..., "params": {...}, "seed": ...}``."""

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise GeneratorError(f"unknown generator kind {self.kind!r}; known: {list(_KINDS)}")

    @classmethod
    def from_dict(cls, d: dict) -> GeneratorSpec:
        return cls(d["kind"], dict(d.get("params", {})), int(d.get("seed", 0)))

    def as_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params, "seed": self.seed}

    def build(self, tol: ToleranceConfig = DEFAULT_TOL) -> Generated:
        p = dict(self.params)
        if self.kind == "prop29":
            return gen_prop29(p.get("b_rule"), int(p.get("depth", 6)), tol)
        if self.kind == "example37":
            return gen_example37(
                float(p.get("s", 1.0)), float(p.get("t", 2.0)), p.get("r_rule"), int(p.get("depth", 4)), tol
            )
        if self.kind == "random_ultrametric":
            space = gen_random_ultrametric(int(p["n"]), self.seed, bool(p.get("normalize", False)))
            return Generated(PointedSpace(space, int(p.get("base", 0))))
        if self.kind == "line_sample":
            return gen_line_sample(int(p["n"]), float(p.get("range", 1.0)), self.seed)
        inner = GeneratorSpec.from_dict(p["inner"]).build(tol)
        return snowflaked(inner, float(p["exponent"]), tol)
