import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultratangent.generators import gen_example37, gen_line_sample, gen_prop29, gen_random_ultrametric, line_family
from ultratangent.line_geometry import detect_pseudo_linear_quadruple, embed_into_line
from ultratangent.metric_core import is_ultrametric
from ultratangent.pretangent import (
    BASE,
    Constant,
    Explicit,
    IdentificationRefused,
    Interleave,
    MatrixHost,
    NormalizingSequence,
    NormHost,
    Rate,
    RateSequence,
    SelfSimilar,
    TowerHost,
    TowerSequence,
    WindowError,
    check_prop25_identity,
    family_from_dict,
    geometric_window,
    metric_identification,
    mutual_stability_matrix,
    refinement_indices,
    scaled_distance_limit,
    subsequence_refinement,
)
from ultratangent.triples import is_in_M_class

W = geometric_window()
B = Rate("exp2_neg_square")
R_B = NormalizingSequence.from_rate(B)
ABS = NormHost("abs")


def oscillating_family():
    y = Interleave("octave_parity", RateSequence(B, (1.0,)), RateSequence(B, (1.0,), power_of_n=-1))
    return mutual_stability_matrix([Constant(ABS.resolve([0.0])), RateSequence(B, (1.0,)), y], R_B, W, ABS, ["p", "b", "y"])


def triangle_ok(fam, slack=1e-9):
    L = fam.limit_matrix
    n = L.shape[0]
    for i, j, k in itertools.product(range(n), repeat=3):
        if not np.isnan(L[i, j] + L[i, k] + L[k, j]):
            assert L[i, j] <= L[i, k] + L[k, j] + slack * max(1.0, L[i, j])


def test_default_window():
    assert W == [8, 16, 32, 64]
    with pytest.raises(ValueError):
        geometric_window(0)


def test_normalizers():
    assert NormalizingSequence.geometric(0.5)(3) == 0.125
    assert NormalizingSequence.explicit([1, 0.5])(2) == 0.5
    assert NormalizingSequence.from_callable(lambda n: 1 / n)(4) == 0.25
    assert R_B.log2(64) == -4096  # no underflow in the log domain
    assert Rate("inv_factorial")(4) == pytest.approx(1 / 24)
    with pytest.raises(ValueError):
        NormalizingSequence.explicit([1, -1])
    with pytest.raises(ValueError):
        NormalizingSequence.geometric(1.0)
    with pytest.raises(ValueError):
        Rate("nope")
    with pytest.raises(ValueError):
        NormalizingSequence.geometric(0.9).check_decay(W)
    with pytest.raises(WindowError):
        NormalizingSequence.explicit([1, 0.5])(3)


def test_prop29_ratio_examples():
    p = Constant(ABS.resolve([0.0]))
    assert scaled_distance_limit(RateSequence(B, (1.0,)), p, R_B, W, ABS).value == 1
    res = scaled_distance_limit(RateSequence(B, (1.0,), shift=1), p, R_B, W, ABS)
    assert res.converged and res.value < 1e-9
    # the ratio b_(n+1) / b_n is 2**(-2n-1) at every window index
    assert [v for _, v in res.trace] == [2.0 ** (-2 * n - 1) for n in W]


def test_self_similar_is_exact():
    host = NormHost("linf", 2)
    r = NormalizingSequence.geometric(0.5)
    a, b = SelfSimilar((1.0, 1.0), r), SelfSimilar((3.0, -1.0), r)
    res = scaled_distance_limit(a, b, r, W, host)
    assert res.value == 2.0 and all(v == 2.0 for _, v in res.trace)


def test_stability_example37():
    g = gen_example37()
    fam = family_from_dict(g.family)
    assert fam.self_stable
    L = fam.limit_matrix[1:, 1:]
    assert L.tolist() == [[0, 1, 3, 2], [1, 0, 2, 3], [3, 2, 0, 1], [2, 3, 1, 0]]
    triangle_ok(fam)


def test_single_base_family():
    fam = mutual_stability_matrix([Constant(ABS.resolve([0.0]))], R_B, W, ABS, ["p"])
    assert fam.self_stable
    snap = metric_identification(fam)
    assert snap.card == 1 and snap.classes == (("p",),)
    assert check_prop25_identity(snap, 2.0) == (True, 0.0)


def test_base_member_must_be_constant():
    with pytest.raises(ValueError):
        mutual_stability_matrix([RateSequence(B, (1.0,))], R_B, W, ABS)


def test_oscillating_pair_flagged_and_refused():
    fam = oscillating_family()
    assert not fam.self_stable
    assert fam.results[0][2].status == "oscillating"
    assert fam.results[0][1].status == "converged"
    assert np.isnan(fam.limit_matrix[0, 2])
    triangle_ok(fam)
    with pytest.raises(IdentificationRefused) as e:
        metric_identification(fam)
    assert e.value.pair == ("p", "y")


def test_refinement_of_oscillating_pair():
    res = subsequence_refinement(oscillating_family(), "squares")
    pairs = {tuple(p["pair"]): p for p in res.pairs}
    assert pairs[("p", "y")]["verdict"] == "non_comparable"
    assert pairs[("p", "y")]["refined"]["status"] == "converged"
    assert pairs[("p", "y")]["refined"]["value"] == 1.0
    assert pairs[("p", "b")]["verdict"] == "preserved"
    assert res.status == "preserved"


def test_diverging_pair():
    host = NormHost("abs")
    fam = mutual_stability_matrix(
        [Constant(host.resolve([0.0])), RateSequence(Rate("geometric", {"q": 0.5}), (1.0,))], R_B, W, host
    )
    assert fam.results[0][1].status == "diverged"


def test_identification_examples():
    snap = metric_identification(family_from_dict(gen_example37().family))
    assert snap.card == 4
    assert is_in_M_class(snap.quotient).ok
    assert detect_pseudo_linear_quadruple(snap.quotient).s == 1
    assert not embed_into_line(snap.quotient).ok
    assert check_prop25_identity(snap, 1.0)[0]
    p29 = metric_identification(family_from_dict(gen_prop29().family))
    assert p29.card == 2
    assert ("p", "b_n+1") in p29.classes
    assert p29.as_dict()["provenance"]["window"] == W


def test_refinement_examples():
    fam = family_from_dict(gen_example37().family)
    for spec in ("even", "identity", "odd", "squares", "affine:3,1", [2 * k + 5 for k in range(1, 70)]):
        assert subsequence_refinement(fam, spec).status == "preserved"
    with pytest.raises(ValueError):
        subsequence_refinement(fam, [3, 2, 5])
    with pytest.raises(ValueError):
        subsequence_refinement(fam, lambda k: 5)
    with pytest.raises(ValueError):
        refinement_indices("cubes")


def test_refinement_detects_change():
    # x_n = n-th point of an explicit list chosen so that even and odd indices differ
    host = NormHost("abs")
    r = NormalizingSequence.geometric(0.5)
    vals = [((1.0 if n % 2 else 1.0 + 1e-12),) for n in range(1, 200)]
    x = Explicit(tuple(host.resolve([0.5**n * v[0]]) for n, v in enumerate(vals, start=1)))
    fam = mutual_stability_matrix([Constant(host.resolve([0.0])), x], r, W, host)
    assert fam.self_stable  # window indices are all even
    res = subsequence_refinement(fam, "odd")
    assert res.status == "preserved"  # 1e-12 is inside rel_eq
    far = Explicit(tuple(host.resolve([0.5**n * (1.0 if n % 2 == 0 else 2.0)]) for n in range(1, 200)))
    fam = mutual_stability_matrix([Constant(host.resolve([0.0])), far], r, W, host)
    res = subsequence_refinement(fam, "odd")
    assert res.status == "violated" and res.violated == ("x0", "x1")


def test_explicit_window_error():
    host = NormHost("abs")
    x = Explicit(tuple(host.resolve([0.5**n]) for n in range(1, 20)))
    with pytest.raises(WindowError):
        scaled_distance_limit(x, Constant(host.resolve([0.0])), NormalizingSequence.geometric(0.5), W, host)
    with pytest.raises(WindowError):
        scaled_distance_limit(x, x, R_B, [], host)


def test_matrix_host_family():
    g = gen_line_sample(70, seed=2)
    host = MatrixHost(g.space)
    order = np.argsort(g.pointed.space.dist[0])[1:][::-1]  # nonbase points, far to near
    r = NormalizingSequence.explicit([g.space.dist[0, i] for i in order])
    x = Explicit(tuple(int(i) for i in order))
    res = scaled_distance_limit(x, Constant(0), r, [8, 16, 32, 64], host)
    assert res.converged and res.value == pytest.approx(1.0)


def test_prop25_on_snowflaked_line():
    g = gen_line_sample(12, seed=4)
    fam = family_from_dict(line_family(g.coordinates[1:], power=0.5))
    snap = metric_identification(fam)
    ok, worst = check_prop25_identity(snap, 2.0)
    assert ok and worst <= 1e-9
    assert not check_prop25_identity(snap, 1.0)[0]
    two = metric_identification(family_from_dict(line_family([0.3], power=0.5)))
    assert check_prop25_identity(two, 3.0) == (True, 0.0)
    with pytest.raises(ValueError):
        check_prop25_identity(snap, 0.5)


def test_prop25_infinite_exponent_on_ultrametric_quotient():
    seed = gen_random_ultrametric(5, seed=3, normalize=True)
    host = TowerHost(seed, R_B)
    members = [Constant(BASE)] + [TowerSequence(i) for i in range(5)]
    snap = metric_identification(mutual_stability_matrix(members, R_B, W, host))
    assert is_ultrametric(snap.quotient).ok
    assert check_prop25_identity(snap, math.inf)[0]


@settings(max_examples=25, deadline=None)
@given(
    st.integers(2, 7),
    st.integers(0, 10_000),
    st.lists(st.tuples(st.integers(0, 2), st.integers(0, 6)), min_size=1, max_size=6),
)
def test_ultrametric_host_gives_ultrametric_snapshot(n, seed, picks):
    useed = gen_random_ultrametric(n, seed=seed, normalize=True)
    scales = Rate("exp2_neg_square")
    host = TowerHost(useed, NormalizingSequence.from_rate(scales))
    members = [Constant(BASE)] + [TowerSequence(idx % n, shift) for shift, idx in picks]
    fam = mutual_stability_matrix(members, R_B, W, host)
    assert fam.self_stable
    triangle_ok(fam)
    snap = metric_identification(fam)
    assert is_ultrametric(snap.quotient).ok


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.tuples(st.integers(-9, 9), st.integers(-9, 9)), min_size=1, max_size=5, unique=True),
    st.sampled_from(["euclidean", "linf"]),
    st.sampled_from(["even", "odd", "squares", "affine:5,2"]),
)
def test_self_similar_families(pts, norm, spec):
    host = NormHost(norm, 2)
    r = NormalizingSequence.geometric(0.25)
    members = [Constant(host.resolve([0.0, 0.0]))] + [SelfSimilar(tuple(map(float, p)), r) for p in pts]
    fam = mutual_stability_matrix(members, r, W, host)
    assert fam.self_stable
    triangle_ok(fam)
    assert subsequence_refinement(fam, spec).status == "preserved"
    snap = metric_identification(fam)
    assert snap.max_inconsistency <= 1e-9
    assert snap.card == len(set(pts) | {(0, 0)})


def test_family_from_dict_errors():
    good = gen_prop29().family
    with pytest.raises(ValueError):
        family_from_dict({**good, "host": {"kind": "hilbert"}})
    with pytest.raises(ValueError):
        family_from_dict({**good, "base": "q"})
    bad = {**good, "sequences": good["sequences"] + [{"kind": "tower", "index": 0}]}
    with pytest.raises(ValueError):
        family_from_dict(bad)
