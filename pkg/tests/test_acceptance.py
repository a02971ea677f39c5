"""Acceptance suite: one test, and one PASS/FAIL line, per criterion.

Run directly (``python3 tests/test_acceptance.py``) or under pytest, where
the lines are repeated in the terminal summary.
"""
import itertools
import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from oracles import is_ultrametric_oracle, s_oracle, t0_oracle  # noqa: E402
from ultratangent.diagnostics import (  # noqa: E402
    HEURISTIC_WARNING,
    distance_schedule,
    estimate_limit,
    f_value,
    geometric_schedule,
)
from ultratangent.generators import (  # noqa: E402
    gen_example37,
    gen_line_sample,
    gen_prop29,
    gen_random_ultrametric,
    line_family,
    snowflaked,
)
from ultratangent.line_geometry import detect_pseudo_linear_quadruple, embed_into_line, realize_quadruple_linf  # noqa: E402
from ultratangent.metric_core import PointedSpace, from_points, is_ultrametric, validate_metric  # noqa: E402
from ultratangent.pretangent import (  # noqa: E402
    BASE,
    Constant,
    Interleave,
    NormalizingSequence,
    NormHost,
    Rate,
    RateSequence,
    TowerHost,
    TowerSequence,
    check_prop25_identity,
    family_from_dict,
    geometric_window,
    metric_identification,
    mutual_stability_matrix,
)
from ultratangent.triples import (  # noqa: E402
    betweenness_exponent,
    is_in_M_class,
    nonincreasing_rearrangement,
    power_sum,
    solve_s_exponent,
)

RESULTS: list[str] = []


def verdict(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_solver_exactness():
    t = time.perf_counter()
    cases = [((1, 1, 2), 1.0), ((0.6, 0.8, 1.0), 2.0), ((1, 1, math.sqrt(2)), 2.0), ((1, 1, 2 ** (1 / 3)), 3.0)]
    worst_res, worst_err = 0.0, 0.0
    for abc, want in cases:
        r = solve_s_exponent(*abc)
        worst_res = max(worst_res, r.residual)
        worst_err = max(worst_err, abs(r.value - want))
    inf_ok = solve_s_exponent(1, 1, 1).is_infinite
    ms = 1e3 * (time.perf_counter() - t)
    ok = worst_res <= 1e-12 and worst_err <= 1e-9 and inf_ok and ms < 1000
    verdict(1, ok, f"max residual {worst_res:.1e}, max |s - s*| {worst_err:.1e}, equilateral inf {inf_ok}, {ms:.1f} ms")


def random_metric_triple(rng):
    # two legs and a long side inside the triangle inequality, long side strictly largest
    while True:
        a, b = rng.uniform(0.05, 1.0, 2)
        c = rng.uniform(max(a, b), a + b)
        if c > max(a, b) * (1 + 1e-6):
            return a, b, c


def test_criterion_02_scaling_law():
    rng = np.random.default_rng(2)
    worst, checked, skipped = 0.0, 0, 0
    qs = (0.5, 2.0, 3.0)
    while checked < 1000:
        a, b, c = random_metric_triple(rng)
        s = solve_s_exponent(a, b, c).value
        q = qs[checked % 3]
        # the transformed triple (d**(1/q)) is metric only while q * s >= 1
        if q * s < 1 + 1e-9:
            skipped += 1
            continue
        sq = solve_s_exponent(a ** (1 / q), b ** (1 / q), c ** (1 / q)).value
        worst = max(worst, abs(sq - q * s) / (q * s))
        checked += 1
    verdict(2, worst <= 1e-9, f"{checked} triples, worst rel error {worst:.1e} ({skipped} non-metric draws with q*s < 1 excluded)")


def test_criterion_03_ultrametric_equivalence():
    rng = np.random.default_rng(3)
    bad = []
    for k in range(50):
        sp = gen_random_ultrametric(int(rng.integers(3, 13)), seed=k)
        D = sp.dist.tolist()
        t0 = betweenness_exponent(sp).value
        if not (math.isinf(t0) and is_ultrametric(sp).ok and is_ultrametric_oracle(D) and math.isinf(t0_oracle(D))):
            bad.append(("ultra", k))
    clouds = 0
    while clouds < 50:
        pts = rng.integers(-50, 51, size=(int(rng.integers(3, 13)), 2)) / 4
        if len({tuple(p) for p in pts}) < len(pts):
            continue
        sp = from_points(pts)
        if is_ultrametric(sp).ok:
            continue
        clouds += 1
        t0 = betweenness_exponent(sp).value
        ref = t0_oracle(sp.dist.tolist())
        if not (math.isfinite(t0) and abs(t0 - ref) <= 1e-9 * ref):
            bad.append(("cloud", clouds))
    verdict(3, not bad, f"50 ultrametrics with t0 = inf, 50 clouds with finite t0 matching the brute-force oracle; failures {bad}")


def test_criterion_04_scale_separation():
    t = time.perf_counter()
    g = gen_prop29()
    snap = metric_identification(family_from_dict(g.family))
    est = estimate_limit(g.pointed, "Phi", distance_schedule(g.pointed))
    sec = time.perf_counter() - t
    ok = snap.card == 2 and est.verdict == "vanishes" and sec < 30
    verdict(4, ok, f"card {snap.card}, Phi verdict {est.verdict!r}, {sec:.2f} s")


def test_criterion_05_four_point_snapshot():
    t = time.perf_counter()
    g = gen_example37(1.0, 2.0, Rate("exp2_neg_square", {"c": 2.0}), depth=4)
    snap = metric_identification(family_from_dict(g.family))
    m = is_in_M_class(snap.quotient).ok
    plq = detect_pseudo_linear_quadruple(snap.quotient)
    emb = embed_into_line(snap.quotient)
    sec = time.perf_counter() - t
    st = (plq.s, plq.t) if plq else None
    ok = snap.card == 4 and m and st == (1.0, 2.0) and not emb.ok and sec < 30
    verdict(5, ok, f"card {snap.card}, class M {m}, quadruple {st}, line embedding {emb.ok}, {sec:.2f} s")


def test_criterion_06_menger_suite():
    rng = np.random.default_rng(6)
    worst, bad = 0.0, 0
    for k in range(100):
        g = gen_line_sample(int(rng.integers(5, 13)), seed=k)
        bare = validate_metric(np.array(g.space.dist))  # no labels, no coordinates
        e = embed_into_line(bare)
        if not (is_in_M_class(bare).ok and e.ok):
            bad += 1
            continue
        worst = max(worst, e.max_error)
    verdict(6, bad == 0 and worst <= 1e-12, f"100 samples, {bad} failures, worst max_error {worst:.1e}")


def test_criterion_07_quadruple_round_trip():
    rng = np.random.default_rng(7)
    worst, bad = 0.0, 0
    for _ in range(100):
        s, t = 10.0 * (1.0 - rng.random(2))
        P = realize_quadruple_linf(s, t)
        D = np.max(np.abs(P[:, None, :] - P[None, :, :]), axis=2)
        want = {(0, 1): s, (2, 3): s, (1, 2): t, (0, 3): t, (0, 2): s + t, (1, 3): s + t}
        for (i, j), v in want.items():
            worst = max(worst, abs(D[i, j] - v) / (s + t))  # rounding of coordinates up to s + t
        q = detect_pseudo_linear_quadruple(validate_metric(D))
        if q is None or not (math.isclose(q.s, min(s, t), rel_tol=1e-12) and math.isclose(q.t, max(s, t), rel_tol=1e-12)):
            bad += 1
    verdict(7, bad == 0 and worst <= 4 * np.finfo(float).eps, f"100 pairs, worst distance error relative to s + t {worst:.1e}, {bad} detection mismatches")


def test_criterion_08_estimators():
    um = PointedSpace(gen_random_ultrametric(60, seed=8), 0)
    v_um = estimate_limit(um, "ultra", distance_schedule(um, steps=3))
    line = gen_line_sample(200, seed=8).pointed
    sched = geometric_schedule(line, steps=4)
    v_line = estimate_limit(line, "ultra", sched)
    v_s1 = estimate_limit(line, "s1", sched, s1=1.0)
    warned = all(e.as_dict()["warning"] == HEURISTIC_WARNING for e in (v_um, v_line, v_s1))
    ok = (v_um.verdict, v_line.verdict, v_s1.verdict) == ("diverges", "bounded", "diverges") and warned
    verdict(8, ok, f"ultrametric {v_um.verdict}, line ultra {v_line.verdict}, line s1=1 {v_s1.verdict}, warnings {warned}")


def test_criterion_09_power_sum_identity():
    g = snowflaked(gen_line_sample(12, seed=9), 0.5)
    snap = metric_identification(family_from_dict(g.family))
    ok, worst = check_prop25_identity(snap, 2.0)
    verdict(9, ok and worst <= 1e-9, f"card {snap.card}, worst rel residual {worst:.1e} at s0 = 2")


def families():
    W = geometric_window()
    B = Rate("exp2_neg_square")
    r = NormalizingSequence.from_rate(B)
    host = NormHost("abs")
    y = Interleave("octave_parity", RateSequence(B, (1.0,)), RateSequence(B, (1.0,), power_of_n=-1))
    yield "oscillating", mutual_stability_matrix([Constant(host.resolve([0.0])), RateSequence(B, (1.0,)), y], r, W, host)
    yield "prop29", family_from_dict(gen_prop29().family)
    yield "example37", family_from_dict(gen_example37().family)
    for k in range(5):
        yield f"line{k}", family_from_dict(gen_line_sample(8, seed=k).family)
        yield f"snowflaked{k}", family_from_dict(line_family(gen_line_sample(8, seed=k).coordinates[1:], power=0.5))
        seed = gen_random_ultrametric(6, seed=k, normalize=True)
        members = [Constant(BASE)] + [TowerSequence(i, k % 3) for i in range(6)]
        yield f"tower{k}", mutual_stability_matrix(members, r, W, TowerHost(seed, r))


def test_criterion_10_invariants():
    rng = np.random.default_rng(10)
    notes = []
    tri_bad = 0
    count = 0
    for name, fam in families():
        count += 1
        L = fam.limit_matrix
        n = L.shape[0]
        for i, j, k in itertools.product(range(n), repeat=3):
            if not np.isnan(L[i, j] + L[i, k] + L[k, j]) and L[i, j] > L[i, k] + L[k, j] + 1e-9 * max(1.0, L[i, j]):
                tri_bad += 1
    notes.append(f"triangle violations {tri_bad} over {count} families")
    jensen_bad = 0
    ts = [0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0, math.inf]
    for _ in range(1000):
        x = rng.uniform(0.01, 10.0, int(rng.integers(1, 9)))
        vals = [power_sum(x, t) for t in ts]
        jensen_bad += any(b > a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))
    notes.append(f"power_sum increases {jensen_bad}")
    rear_bad = 0
    for _ in range(1000):
        m = int(rng.integers(1, 12))
        x, y = rng.normal(size=m), rng.normal(size=m)
        lhs = np.linalg.norm(nonincreasing_rearrangement(x) - nonincreasing_rearrangement(y))
        rear_bad += lhs > np.linalg.norm(x - y) * (1 + 1e-12)
    notes.append(f"rearrangement violations {rear_bad}")
    f_bad = 0
    draws = 0
    while draws < 10_000:
        pts = rng.normal(size=(3, int(rng.integers(1, 4))))
        if min(np.linalg.norm(pts[i] - pts[j]) for i, j in ((0, 1), (0, 2), (1, 2))) < 1e-6:
            continue
        draws += 1
        v = f_value(PointedSpace(from_points(pts), 0), 1, 2)
        f_bad += not 0 <= v <= 2
    notes.append(f"F out of [0, 2] {f_bad} of 10000")
    verdict(10, tri_bad == jensen_bad == rear_bad == f_bad == 0, "; ".join(notes))


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
