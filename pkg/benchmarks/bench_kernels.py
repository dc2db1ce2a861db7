"""Compare the compiled kernels with the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Each kernel is timed on
the same inputs through both modules and the results are checked to agree.
"""
import argparse
import timeit

import numpy as np

from ricverify import _backend
from ricverify.submersion import project_curvature


def cases(rng):
    comp = project_curvature(rng.standard_normal((9, 9, 9, 9)))
    X = rng.standard_normal((400, 9))
    vals = rng.standard_normal((300, 12))
    t = np.linspace(0.1, 1.5, 100000)
    jets = (np.sin(t), np.cos(t), -np.sin(t), np.cos(t) ** 2,
            np.cos(t), -np.sin(t), -np.cos(t), np.sin(t) ** 2)
    return {
        "directional_batch": lambda m: m.directional_batch(comp, X),
        "min_subset_sum": lambda m: [m.min_subset_sum(v, 4) for v in vals],
        "lhs_grid": lambda m: m.lhs_grid(*jets, 3, 4, 7),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    py = _backend.python_kernels
    cy = _backend.compiled_kernels
    if cy is None:
        print("compiled kernels unavailable; timing the fallback only")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<20}{'python ms':>12}{'compiled ms':>14}{'speedup':>10}")
    for name, fn in cases(rng).items():
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:<20}{tp:>12.2f}{'-':>14}{'-':>10}")
            continue
        a, b = fn(py), fn(cy)
        for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
            np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-12)
        tc = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20}{tp:>12.2f}{tc:>14.2f}{tp / tc:>10.1f}")


if __name__ == "__main__":
    main()
