"""Approximate pretangent spaces from families of point sequences.

A family is a list of point sequences in a *host* space together with a
normalizing sequence r_n -> 0.  Scaled distances d(x_n, y_n) / r_n are
evaluated along a geometric index window (N, 2N, 4N, ...) and their
limits read off numerically; the metric identification of the resulting
pseudometric is the snapshot.

Scales are carried in base-2 logarithms.  Points of normed hosts are
stored factored as 2**e * v so that sequences like 2**(-n**2) can be
evaluated at n = 64 without underflow; for self-similar rules the ratio
is then computed exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .metric_core import DEFAULT_TOL, FiniteMetricSpace, ToleranceConfig, validate_metric
from .triples import enumerate_plus_triples, power_sum

__all__ = [
    "BASE",
    "RATE_RULES",
    "Rate",
    "NormalizingSequence",
    "Factored",
    "MatrixHost",
    "NormHost",
    "TowerHost",
    "Constant",
    "Explicit",
    "SelfSimilar",
    "RateSequence",
    "TowerSequence",
    "Interleave",
    "ClosedForm",
    "Subsequence",
    "LimitResult",
    "StableFamily",
    "PretangentSnapshot",
    "RefinementResult",
    "WindowError",
    "IdentificationRefused",
    "geometric_window",
    "scaled_distance_limit",
    "mutual_stability_matrix",
    "metric_identification",
    "subsequence_refinement",
    "refinement_indices",
    "check_prop25_identity",
    "family_from_dict",
]

TANGENCY_NOTE = (
    "tangency is not certified: it quantifies over every subsequence and "
    "every maximal self-stable family; refinement checks are evidence only"
)

BASE = "base"  # the marked point of a tower host


class WindowError(IndexError):
    pass


class IdentificationRefused(ValueError):
    def __init__(self, pair: tuple[str, str], status: str):
        self.pair = pair
        self.status = status
        super().__init__(f"pair {pair} is {status}; metric identification needs every limit to converge")


# -- normalizing sequences ---------------------------------------------------

_LN2 = math.log(2.0)

RATE_RULES: dict[str, Callable[..., float]] = {
    # each maps n to log2 of the n-th term
    "exp2_neg_square": lambda n, c=1.0: -c * n * n,
    "inv_factorial": lambda n: -math.lgamma(n + 1) / _LN2,
    "geometric": lambda n, q=0.5: n * math.log2(q),
    "power": lambda n, a=1.0: -a * math.log2(n),
}


@dataclass(frozen=True)
class Rate:
    """A named positive sequence b_n, evaluated as log2(b_n)."""

    rule: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.rule not in RATE_RULES:
            raise ValueError(f"unknown rate rule {self.rule!r}; known: {sorted(RATE_RULES)}")
        object.__setattr__(self, "params", dict(self.params))

    def log2(self, n: int) -> float:
        return float(RATE_RULES[self.rule](n, **self.params))

    def __call__(self, n: int) -> float:
        return 2.0 ** self.log2(n)

    def as_dict(self) -> dict:
        return {"rule": self.rule, "params": dict(self.params)}


class NormalizingSequence:
    """Positive r_n -> 0, exposed through ``log2(n)``; indices start at 1."""

    def __init__(self, log2_rule: Callable[[int], float], description: dict, length: int | None = None):
        self._log2 = log2_rule
        self.description = description
        self.length = length

    @classmethod
    def explicit(cls, values: Sequence[float]) -> NormalizingSequence:
        vals = [float(v) for v in values]
        if not vals or any(not v > 0 for v in vals):
            raise ValueError("normalizing sequence entries must be positive")
        logs = [math.log2(v) for v in vals]

        def rule(n):
            if not 1 <= n <= len(logs):
                raise WindowError(f"index {n} outside the explicit normalizer of length {len(logs)}")
            return logs[n - 1]

        return cls(rule, {"kind": "explicit", "values": vals}, len(vals))

    @classmethod
    def geometric(cls, q: float) -> NormalizingSequence:
        if not 0 < q < 1:
            raise ValueError("geometric normalizer needs 0 < q < 1")
        return cls(lambda n: n * math.log2(q), {"kind": "geometric", "q": q})

    @classmethod
    def from_rate(cls, rate: Rate) -> NormalizingSequence:
        return cls(rate.log2, {"kind": "rate", **rate.as_dict()})

    @classmethod
    def from_callable(cls, fn: Callable[[int], float]) -> NormalizingSequence:
        def rule(n):
            v = float(fn(n))
            if not v > 0:
                raise ValueError(f"normalizer value r_{n} = {v} is not positive")
            return math.log2(v)

        return cls(rule, {"kind": "callable"})

    def log2(self, n: int) -> float:
        return self._log2(n)

    def __call__(self, n: int) -> float:
        return 2.0 ** self.log2(n)

    def subsequence(self, idx: Callable[[int], int]) -> NormalizingSequence:
        return NormalizingSequence(lambda k: self.log2(idx(k)), {"kind": "subsequence", "of": self.description})

    def check_decay(self, window: Sequence[int], tol: ToleranceConfig = DEFAULT_TOL) -> None:
        first, last = self.log2(window[0]), self.log2(window[-1])
        if len(window) > 1 and not last - first < math.log2(tol.rel_eq):
            raise ValueError(
                f"normalizer does not decay over the window: r_{window[-1]} / r_{window[0]} = "
                f"2**{last - first:.3g}, need < {tol.rel_eq:g}"
            )


# -- hosts -------------------------------------------------------------------


def _pow2(e: float) -> float:
    # 2.0 ** e underflows quietly but raises on overflow
    return 2.0**e if e < 1024 else math.inf


@dataclass(frozen=True)
class Factored:
    """The point 2**exp * vec of a normed host."""

    exp: float
    vec: tuple[float, ...]


class MatrixHost:
    """A finite metric space; points are indices."""

    def __init__(self, space: FiniteMetricSpace):
        self.space = space

    def resolve(self, point) -> int:
        if isinstance(point, str):
            return self.space.index(point)
        i = int(point)
        if not 0 <= i < self.space.n:
            raise IndexError(f"point index {i} outside a {self.space.n}-point host")
        return i

    def ratio(self, p, q, log2r: float) -> float:
        return float(self.space.dist[p, q]) * _pow2(-log2r)

    def as_dict(self) -> dict:
        return {"kind": "matrix", **self.space.as_dict()}


class NormHost:
    """R^dim with ``norm`` ("abs", "euclidean" or "linf") raised to ``power``.

    d(x, y) = ||x - y|| ** power is homogeneous of degree ``power``.
    """

    def __init__(self, norm: str = "euclidean", dim: int = 2, power: float = 1.0):
        if norm not in ("abs", "euclidean", "linf"):
            raise ValueError(f"unknown norm {norm!r}")
        if norm == "abs":
            dim = 1
        if not 0 < power <= 1:
            raise ValueError("host power must lie in (0, 1] to give a metric")
        self.norm, self.dim, self.power = norm, int(dim), float(power)

    def resolve(self, point) -> Factored:
        if isinstance(point, Factored):
            return point
        v = tuple(float(c) for c in np.atleast_1d(np.asarray(point, dtype=float)))
        if len(v) != self.dim:
            raise ValueError(f"point {point} does not have dimension {self.dim}")
        return Factored(0.0, v)

    def _norm(self, v: np.ndarray) -> float:
        if self.norm == "linf" or self.norm == "abs":
            return float(np.max(np.abs(v)))
        return float(np.sqrt(np.sum(v * v)))

    def ratio(self, p: Factored, q: Factored, log2r: float) -> float:
        t = log2r / self.power
        u = _pow2(p.exp - t) * np.asarray(p.vec) if any(p.vec) else np.zeros(self.dim)
        w = _pow2(q.exp - t) * np.asarray(q.vec) if any(q.vec) else np.zeros(self.dim)
        return self._norm(u - w) ** self.power

    def as_dict(self) -> dict:
        return {"kind": "norm", "norm": self.norm, "dim": self.dim, "power": self.power}


class TowerHost:
    """{base} together with copies s_k * U of a seed ultrametric U, one per level k >= 1.

    Same-level points are at s_k * d_U; points on levels k < l are at s_k;
    a level-k point is at s_k from the base.  With s_k strictly decreasing
    and diam U <= 1 the result is an ultrametric space.  Points are
    (level, index) pairs or :data:`BASE`.
    """

    def __init__(self, seed: FiniteMetricSpace, scales: NormalizingSequence):
        if seed.n and seed.diameter() > 1:
            raise ValueError("tower seed must have diameter <= 1")
        self.seed, self.scales = seed, scales

    def resolve(self, point):
        if point is None or point == BASE:
            return BASE
        level, idx = point
        return (int(level), int(idx))

    def ratio(self, p, q, log2r: float) -> float:
        if p == q:
            return 0.0
        if p == BASE or q == BASE:
            level = q[0] if p == BASE else p[0]
            return _pow2(self.scales.log2(level) - log2r)
        (k, i), (l, j) = p, q
        if k == l:
            return float(self.seed.dist[i, j]) * _pow2(self.scales.log2(k) - log2r)
        return _pow2(self.scales.log2(min(k, l)) - log2r)

    def as_dict(self) -> dict:
        return {"kind": "tower", "seed": self.seed.as_dict(), "scales": self.scales.description}


# -- sequence rules ----------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    point: object

    def at(self, n: int):
        return self.point


@dataclass(frozen=True)
class Explicit:
    points: tuple

    def at(self, n: int):
        if not 1 <= n <= len(self.points):
            raise WindowError(f"index {n} outside an explicit sequence of length {len(self.points)}")
        return self.points[n - 1]


@dataclass(frozen=True)
class SelfSimilar:
    """x_n = r_n**(1/degree) * seed in a normed host homogeneous of that degree."""

    seed: tuple[float, ...]
    normalizer: NormalizingSequence
    degree: float = 1.0

    def at(self, n: int) -> Factored:
        return Factored(self.normalizer.log2(n) / self.degree, tuple(self.seed))


@dataclass(frozen=True)
class RateSequence:
    """x_n = n**power_of_n * b_(n + shift) * direction."""

    rate: Rate
    direction: tuple[float, ...]
    shift: int = 0
    power_of_n: float = 0.0

    def at(self, n: int) -> Factored:
        return Factored(self.rate.log2(n + self.shift) + self.power_of_n * math.log2(n), tuple(self.direction))


@dataclass(frozen=True)
class TowerSequence:
    """x_n = point ``index`` of tower level n + shift."""

    index: int
    shift: int = 0

    def at(self, n: int):
        return (n + self.shift, self.index)


_SELECTORS: dict[str, Callable[[int], bool]] = {
    "parity": lambda n: n % 2 == 0,
    "octave_parity": lambda n: (n.bit_length() - 1) % 2 == 0,
}


@dataclass(frozen=True)
class Interleave:
    """Take ``even`` where the selector is true and ``odd`` elsewhere.

    ``"parity"`` looks at n itself; ``"octave_parity"`` at floor(log2 n),
    which alternates along a doubling window.
    """

    selector: str
    even: object
    odd: object

    def __post_init__(self):
        if self.selector not in _SELECTORS:
            raise ValueError(f"unknown selector {self.selector!r}")

    def at(self, n: int):
        return (self.even if _SELECTORS[self.selector](n) else self.odd).at(n)


@dataclass(frozen=True)
class ClosedForm:
    fn: Callable[[int], object]

    def at(self, n: int):
        return self.fn(n)


@dataclass(frozen=True)
class Subsequence:
    inner: object
    idx: Callable[[int], int]

    def at(self, k: int):
        return self.inner.at(self.idx(k))


# -- limits ------------------------------------------------------------------


@dataclass(frozen=True)
class LimitResult:
    status: str  # "converged", "diverged", "oscillating"
    value: float | None
    trace: tuple[tuple[int, float], ...]

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def as_dict(self) -> dict:
        return {"status": self.status, "value": self.value, "trace": [[n, v] for n, v in self.trace]}


def geometric_window(start: int = 8, steps: int = 4) -> list[int]:
    if start < 1 or steps < 1:
        raise ValueError("window start and steps must be positive")
    return [start * 2**k for k in range(steps)]


def _classify(trace: list[tuple[int, float]], tol: ToleranceConfig) -> LimitResult:
    vals = [v for _, v in trace]
    last = vals[-3:]
    v = vals[-1]
    if math.isfinite(v) and max(last) - min(last) <= tol.rel_eq * max(1.0, abs(v)):
        return LimitResult("converged", v, tuple(trace))
    if all(b > a for a, b in zip(vals, vals[1:])) and v > 1 / tol.rel_eq:
        return LimitResult("diverged", None, tuple(trace))
    return LimitResult("oscillating", None, tuple(trace))


def scaled_distance_limit(
    x,
    y,
    r: NormalizingSequence,
    window: Sequence[int],
    host,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> LimitResult:
    """Numerical limit of d(x_n, y_n) / r_n along ``window``.

    Converged when the last three evaluations agree within
    rel_eq * max(1, v); diverged when the values increase throughout and
    end above 1/rel_eq; oscillating otherwise.
    """
    window = list(window)
    if not window:
        raise WindowError("window is empty")
    trace = []
    for n in window:
        p, q = host.resolve(x.at(n)), host.resolve(y.at(n))
        trace.append((n, host.ratio(p, q, r.log2(n))))
    return _classify(trace, tol)


@dataclass
class StableFamily:
    labels: tuple[str, ...]
    members: tuple
    normalizer: NormalizingSequence
    host: object
    window: tuple[int, ...]
    base: int
    results: list[list[LimitResult]]

    @property
    def self_stable(self) -> bool:
        return all(r.converged for row in self.results for r in row)

    @property
    def limit_matrix(self) -> np.ndarray:
        n = len(self.members)
        out = np.full((n, n), np.nan)
        for i in range(n):
            for j in range(n):
                if self.results[i][j].converged:
                    out[i, j] = self.results[i][j].value
        return out

    def as_dict(self) -> dict:
        n = len(self.members)
        return {
            "labels": list(self.labels),
            "base": self.labels[self.base],
            "window": list(self.window),
            "self_stable": self.self_stable,
            "pairs": [
                {"pair": [self.labels[i], self.labels[j]], **self.results[i][j].as_dict()}
                for i in range(n)
                for j in range(i + 1, n)
            ],
        }


def mutual_stability_matrix(
    members: Sequence,
    r: NormalizingSequence,
    window: Sequence[int],
    host,
    labels: Sequence[str] | None = None,
    base: int = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> StableFamily:
    """Pairwise scaled-distance limits; members[base] must be the constant base sequence."""
    members = tuple(members)
    if not members:
        raise ValueError("a family needs at least the base sequence")
    if not isinstance(members[base], Constant):
        raise ValueError("the base member must be a constant sequence")
    labels = tuple(labels) if labels is not None else tuple(f"x{i}" for i in range(len(members)))
    window = tuple(window)
    r.check_decay(window, tol)
    n = len(members)
    zero = LimitResult("converged", 0.0, tuple((k, 0.0) for k in window))
    results = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            res = scaled_distance_limit(members[i], members[j], r, window, host, tol)
            results[i][j] = results[j][i] = res
    return StableFamily(labels, members, r, host, window, base, results)


@dataclass(frozen=True)
class PretangentSnapshot:
    classes: tuple[tuple[str, ...], ...]
    quotient: FiniteMetricSpace
    provenance: dict
    base_class: int = 0
    max_inconsistency: float = 0.0

    @property
    def card(self) -> int:
        return len(self.classes)

    def as_dict(self) -> dict:
        return {
            **self.quotient.as_dict(),
            "classes": [list(c) for c in self.classes],
            "base_class": self.base_class,
            "max_inconsistency": self.max_inconsistency,
            "provenance": self.provenance,
        }


def metric_identification(family: StableFamily, tol: ToleranceConfig = DEFAULT_TOL) -> PretangentSnapshot:
    """Quotient of the family by the relation d~ < zero_dist."""
    n = len(family.members)
    for i in range(n):
        for j in range(i + 1, n):
            res = family.results[i][j]
            if not res.converged:
                raise IdentificationRefused((family.labels[i], family.labels[j]), res.status)
    L = family.limit_matrix
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if L[i, j] < tol.zero_dist:
                parent[find(j)] = find(i)
    roots: dict[int, list[int]] = {}
    for i in range(n):
        roots.setdefault(find(i), []).append(i)
    groups = sorted(roots.values())
    reps = [g[0] for g in groups]
    rho = L[np.ix_(reps, reps)]
    worst = 0.0
    for a, ga in enumerate(groups):
        for b, gb in enumerate(groups):
            if a != b:
                worst = max(worst, float(np.max(np.abs(L[np.ix_(ga, gb)] - rho[a, b]))))
    quotient = validate_metric(rho, [family.labels[r] for r in reps], tol)
    base_class = next(k for k, g in enumerate(groups) if family.base in g)
    provenance = {
        "host": family.host.as_dict(),
        "normalizer": family.normalizer.description,
        "window": list(family.window),
        "members": list(family.labels),
        "note": TANGENCY_NOTE,
    }
    return PretangentSnapshot(
        classes=tuple(tuple(family.labels[i] for i in g) for g in groups),
        quotient=quotient,
        provenance=provenance,
        base_class=base_class,
        max_inconsistency=worst,
    )


@dataclass(frozen=True)
class RefinementResult:
    status: str  # "preserved" or "violated"
    violated: tuple[str, str] | None
    pairs: tuple[dict, ...]
    note: str = TANGENCY_NOTE

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "violated": list(self.violated) if self.violated else None,
            "pairs": list(self.pairs),
            "note": self.note,
        }


def refinement_indices(spec) -> Callable[[int], int]:
    """Turn a refinement spec into k -> n_k.

    Accepts a callable, a list of indices (n_k = list[k-1]) or one of the
    strings "identity", "even", "odd", "squares", "affine:a,b" (n_k = a*k + b).
    """
    if callable(spec):
        return spec
    if isinstance(spec, str):
        named = {
            "identity": lambda k: k,
            "even": lambda k: 2 * k,
            "odd": lambda k: 2 * k - 1,
            "squares": lambda k: k * k,
        }
        if spec in named:
            return named[spec]
        if spec.startswith("affine:"):
            a, b = (int(v) for v in spec[len("affine:") :].split(","))
            return lambda k: a * k + b
        if spec.startswith("list:"):
            spec = [int(v) for v in spec[len("list:") :].split(",")]
        else:
            raise ValueError(f"unknown refinement spec {spec!r}")
    seq = [int(v) for v in spec]
    if any(b <= a for a, b in zip(seq, seq[1:])):
        raise ValueError("refinement indices must be strictly increasing")

    def from_list(k):
        if not 1 <= k <= len(seq):
            raise WindowError(f"refinement list has no entry {k}")
        return seq[k - 1]

    return from_list


def subsequence_refinement(family: StableFamily, indices, tol: ToleranceConfig = DEFAULT_TOL) -> RefinementResult:
    """Recompute every pairwise limit along x'_k = x_(n_k), r'_k = r_(n_k).

    A converged pair must keep its value; pairs that did not converge
    originally are reported with their refined limit as non-comparable.
    """
    idx = refinement_indices(indices)
    reach = max(family.window)
    ks = list(range(1, reach + 1))
    nk = [idx(k) for k in ks]
    if nk[0] < 1 or any(b <= a for a, b in zip(nk, nk[1:])):
        raise ValueError("refinement indices must be strictly increasing naturals")
    r2 = family.normalizer.subsequence(idx)
    n = len(family.members)
    pairs = []
    violated = None
    for i in range(n):
        for j in range(i + 1, n):
            orig = family.results[i][j]
            new = scaled_distance_limit(
                Subsequence(family.members[i], idx),
                Subsequence(family.members[j], idx),
                r2,
                family.window,
                family.host,
                tol,
            )
            pair = (family.labels[i], family.labels[j])
            if not orig.converged:
                verdict = "non_comparable"
            elif new.converged and abs(new.value - orig.value) <= tol.rel_eq * max(1.0, abs(orig.value)):
                verdict = "preserved"
            else:
                verdict = "violated"
                violated = violated or pair
            pairs.append(
                {
                    "pair": list(pair),
                    "verdict": verdict,
                    "original": orig.as_dict(),
                    "refined": new.as_dict(),
                }
            )
    return RefinementResult("violated" if violated else "preserved", violated, tuple(pairs))


def check_prop25_identity(snapshot: PretangentSnapshot, s0: float, tol: ToleranceConfig = DEFAULT_TOL):
    """rho(b,d) = (rho(b,g)**s0 + rho(d,g)**s0)**(1/s0) on every (b, g, d) in X+3 order.

    ``s0 = inf`` reads the right side as max(rho(b,g), rho(d,g)).  Returns
    ``(ok, worst relative residual)``; vacuously true below three points.
    """
    if not s0 >= 1:
        raise ValueError("s0 must lie in [1, inf]")
    q = snapshot.quotient
    worst = 0.0
    for b, g, d in enumerate_plus_triples(q):
        lhs = q.d(b, d)
        rhs = power_sum([q.d(b, g), q.d(d, g)], s0)
        worst = max(worst, abs(lhs - rhs) / lhs)
    return worst <= tol.rel_eq, worst


# -- family description files ---------------------------------------------


def normalizer_from_dict(spec: dict) -> NormalizingSequence:
    kind = spec.get("kind")
    if kind == "explicit":
        return NormalizingSequence.explicit(spec["values"])
    if kind == "geometric":
        return NormalizingSequence.geometric(float(spec["q"]))
    if kind == "rate":
        return NormalizingSequence.from_rate(Rate(spec["rule"], spec.get("params", {})))
    raise ValueError(f"unknown normalizer kind {kind!r}")


def host_from_dict(spec: dict):
    kind = spec.get("kind")
    if kind == "matrix":
        return MatrixHost(validate_metric(spec["dist"], spec.get("labels")))
    if kind == "norm":
        return NormHost(spec.get("norm", "euclidean"), spec.get("dim", 2), spec.get("power", 1.0))
    if kind == "tower":
        seed = spec["seed"]
        return TowerHost(validate_metric(seed["dist"], seed.get("labels")), normalizer_from_dict(spec["scales"]))
    raise ValueError(f"unknown host kind {kind!r}")


def sequence_from_dict(spec: dict, host, normalizer: NormalizingSequence):
    kind = spec.get("kind")
    if kind == "constant":
        return Constant(host.resolve(spec.get("point")))
    if kind == "explicit":
        return Explicit(tuple(host.resolve(p) for p in spec["points"]))
    if kind == "self_similar":
        if not isinstance(host, NormHost):
            raise ValueError("self_similar sequences need a normed host")
        return SelfSimilar(tuple(float(c) for c in spec["seed"]), normalizer, host.power)
    if kind == "rate":
        if not isinstance(host, NormHost):
            raise ValueError("rate sequences need a normed host")
        return RateSequence(
            Rate(spec["rule"], spec.get("params", {})),
            tuple(float(c) for c in np.atleast_1d(spec.get("point", [1.0]))),
            int(spec.get("shift", 0)),
            float(spec.get("power_of_n", 0.0)),
        )
    if kind == "tower":
        if not isinstance(host, TowerHost):
            raise ValueError("tower sequences need a tower host")
        return TowerSequence(int(spec["index"]), int(spec.get("shift", 0)))
    if kind == "interleave":
        return Interleave(
            spec.get("selector", "parity"),
            sequence_from_dict(spec["even"], host, normalizer),
            sequence_from_dict(spec["odd"], host, normalizer),
        )
    raise ValueError(f"unknown sequence kind {kind!r}")


def family_from_dict(spec: dict, window: Sequence[int] | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> StableFamily:
    """Build and evaluate a family from its JSON description."""
    host = host_from_dict(spec["host"])
    r = normalizer_from_dict(spec["normalizer"])
    seqs = spec["sequences"]
    labels = [s.get("label", f"x{i}") for i, s in enumerate(seqs)]
    members = [sequence_from_dict(s, host, r) for s in seqs]
    base_label = spec.get("base", labels[0])
    if base_label not in labels:
        raise ValueError(f"base {base_label!r} is not one of the sequence labels")
    if window is None:
        w = spec.get("window", {})
        window = geometric_window(int(w.get("start", 8)), int(w.get("steps", 4)))
    return mutual_stability_matrix(members, r, window, host, labels, labels.index(base_label), tol)
