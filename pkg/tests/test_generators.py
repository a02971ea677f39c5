import math

import numpy as np
import pytest

from ultratangent.diagnostics import psi_value
from ultratangent.generators import (
    GeneratorError,
    GeneratorSpec,
    gen_example37,
    gen_line_sample,
    gen_prop29,
    gen_random_ultrametric,
    snowflaked,
)
from ultratangent.line_geometry import embed_into_line
from ultratangent.metric_core import check_metric, is_ultrametric
from ultratangent.pretangent import Rate
from ultratangent.triples import betweenness_exponent, is_in_M_class


def test_prop29_examples():
    g = gen_prop29(depth=6)
    assert g.space.n == 7 and g.pointed.base == 0
    assert g.coordinates[1:].tolist() == [2.0 ** -(n * n) for n in range(1, 7)]
    with pytest.raises(GeneratorError):
        gen_prop29("geometric", 6)
    f = gen_prop29(lambda n: 1 / math.factorial(n), 5)
    assert f.space.n == 6 and f.family is None
    with pytest.raises(GeneratorError):
        gen_prop29(lambda n: 1.0, 5)


def test_prop29_scale_separation():
    g = gen_prop29(depth=6)
    # canonical triples (p, b_(n+1), b_n): Psi grows along n
    psi = [psi_value(g.space, 0, n + 1, n) for n in range(1, 6)]
    assert all(b > a for a, b in zip(psi, psi[1:]))
    assert psi[-1] > 2**10


def test_example37_examples():
    g = gen_example37(1, 2, depth=4)
    assert g.space.n == 13
    for n in range(1, 5):
        r = 4.0 ** -(n * n)
        lvl = [0] + [3 * (n - 1) + i for i in (1, 2, 3)]
        d = g.space.dist[np.ix_(lvl, lvl)]
        assert sorted(d[np.triu_indices(4, 1)] / r) == [1, 1, 2, 2, 3, 3]
    with pytest.raises(GeneratorError):
        gen_example37(1, 2, Rate("geometric", {"q": 0.5}))
    assert len(g.family["sequences"]) == 5


def test_random_ultrametric():
    sp = gen_random_ultrametric(2, seed=0)
    assert sp.d(0, 1) > 0 and is_ultrametric(sp).ok
    sp = gen_random_ultrametric(8, seed=42)
    assert is_ultrametric(sp).ok
    assert math.isinf(betweenness_exponent(sp).value)
    assert gen_random_ultrametric(6, seed=1, normalize=True).diameter() == 1
    with pytest.raises(GeneratorError):
        gen_random_ultrametric(1)
    assert np.array_equal(gen_random_ultrametric(9, 5).dist, gen_random_ultrametric(9, 5).dist)


@pytest.mark.parametrize("seed", range(5))
def test_line_sample(seed):
    g = gen_line_sample(15, 3.0, seed)
    assert g.space.n == 16 and g.coordinates[0] == 0
    assert np.all((g.coordinates[1:] > 0) & (g.coordinates[1:] <= 3))
    assert is_in_M_class(g.space).ok
    e = embed_into_line(g.space)
    assert e.ok and e.max_error < 1e-12
    assert betweenness_exponent(g.space).value == 1
    with pytest.raises(GeneratorError):
        gen_line_sample(1)


@pytest.mark.parametrize("q", [1.5, 2, 3, 5])
def test_snowflaked_line_exponent(q):
    g = snowflaked(gen_line_sample(10, seed=int(q * 10)), 1 / q)
    assert betweenness_exponent(g.space).value == pytest.approx(q, abs=1e-6)
    assert g.family["host"]["power"] == pytest.approx(1 / q)


def test_every_generator_validates():
    for spec in [
        {"kind": "prop29"},
        {"kind": "example37", "params": {"s": 2, "t": 0.5}},
        {"kind": "random_ultrametric", "params": {"n": 12}, "seed": 3},
        {"kind": "line_sample", "params": {"n": 20}},
        {"kind": "snowflaked", "params": {"inner": {"kind": "line_sample", "params": {"n": 9}}, "exponent": 0.5}},
    ]:
        g = GeneratorSpec.from_dict(spec).build()
        assert check_metric(g.space.dist) == []
        assert GeneratorSpec.from_dict(GeneratorSpec.from_dict(spec).as_dict()) == GeneratorSpec.from_dict(spec)
    with pytest.raises(GeneratorError):
        GeneratorSpec("mandelbrot")
