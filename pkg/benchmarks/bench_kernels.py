"""Time the compiled and pure-Python trajectory loops on the same inputs.

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]

Also checks that both backends return bit-identical arrays.
"""
import argparse
import timeit

import numpy as np

from academic_pipeline import _pykernels, kernels
from academic_pipeline.core import ModelParams

try:
    from academic_pipeline import _ckernels
except ImportError:
    _ckernels = None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    p = ModelParams()
    rng = np.random.default_rng(0)
    G = rng.uniform(20_000, 80_000, args.steps)
    B = rng.uniform(15_000, 30_000, args.steps)
    cases = {
        "vacancy_limited": lambda impl: kernels.vacancy_limited(G, 20_000.0, p.K_F, p, impl=impl),
        "unconstrained": lambda impl: kernels.unconstrained(B, 1e5, 5e4, 2e4, p.K_F, p, impl=impl),
    }
    impls = {"python": _pykernels}
    if _ckernels is not None:
        impls["cython"] = _ckernels
    else:
        print("compiled kernels not built; timing the Python fallback only")

    print(f"{args.steps} steps, best of {args.repeat}")
    for name, run in cases.items():
        best = {}
        for label, impl in impls.items():
            best[label] = min(timeit.repeat(lambda: run(impl), number=1, repeat=args.repeat))
        line = "  ".join(f"{k} {v * 1e3:9.3f} ms" for k, v in best.items())
        if "cython" in best:
            same = all(np.array_equal(a, b) for a, b in zip(run(_pykernels), run(_ckernels)))
            line += f"  speedup {best['python'] / best['cython']:6.1f}x  identical={same}"
        print(f"{name:16s} {line}")


if __name__ == "__main__":
    main()
