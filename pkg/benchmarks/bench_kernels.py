"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--n 120]

Both backends run the same inputs and their outputs are compared before
timing is reported.
"""
import argparse
import importlib.util
import timeit

import numpy as np

from ultratangent import _backend
from ultratangent.generators import gen_line_sample, gen_random_ultrametric


def cases(n: int, seed: int):
    rng = np.random.default_rng(seed)
    line = gen_line_sample(n, seed=seed).space.dist
    um = gen_random_ultrametric(n, seed=seed).dist
    pts = rng.normal(size=(n, 3))
    cloud = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    m = 200_000
    a, b = rng.uniform(0.1, 1.0, (2, m))
    c = rng.uniform(np.maximum(a, b), a + b)
    tri = np.sort(np.array([rng.choice(n, 3, replace=False) for _ in range(20_000)]), axis=1)
    return {
        "betweenness (cloud)": lambda k: k.betweenness(cloud, 1e-9),
        "betweenness (ultrametric)": lambda k: k.betweenness(um, 1e-9),
        "m_class_witness (line)": lambda k: k.m_class_witness(line, 1e-9),
        "ultrametric_witness (cloud)": lambda k: k.ultrametric_witness(cloud, 1e-9),
        f"solve_s_many ({m})": lambda k: k.solve_s_many(a, b, c, 1e-9),
        "triple_quantities (20000)": lambda k: k.triple_quantities(cloud, 0, tri, 1e-9),
    }


def same(u, v) -> bool:
    if isinstance(u, tuple) and isinstance(v, tuple):
        return len(u) == len(v) and all(same(x, y) for x, y in zip(u, v))
    if isinstance(u, np.ndarray) or isinstance(v, np.ndarray):
        return np.allclose(np.asarray(u, dtype=float), np.asarray(v, dtype=float), rtol=1e-9, equal_nan=True)
    if isinstance(u, float) and isinstance(v, float):
        return u == v or abs(u - v) <= 1e-9 * max(abs(u), abs(v))
    return u == v


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=120, help="points per space")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    names = ["numpy"] + (["cython"] if importlib.util.find_spec("ultratangent._kernels") else [])
    before = _backend.NAME
    print(f"{'kernel':32s}" + "".join(f"{b:>12s}" for b in names) + ("   speedup" if len(names) == 2 else ""))
    try:
        for label, fn in cases(args.n, args.seed).items():
            times, outs = [], []
            for name in names:
                _backend.use(name)
                k = _backend.kernels
                outs.append(fn(k))
                times.append(min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)))
            if len(outs) == 2 and not same(outs[0], outs[1]):
                raise SystemExit(f"backends disagree on {label}")
            row = f"{label:32s}" + "".join(f"{1e3 * t:10.2f}ms" for t in times)
            if len(times) == 2:
                row += f"   {times[0] / times[1]:7.1f}x"
            print(row)
    finally:
        _backend.use(before)
    if len(names) == 1:
        print("compiled extension not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
