"""Compare the Cython kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Workloads mirror real use: a Jaeger table sweep compiled to a path program,
a Lemos image evaluated pixel by pixel, and Monte Carlo sampling plus
coincidence tallying.
"""

from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from photonpaths import _pykernels
from photonpaths.entanglement import outcome_program
from photonpaths.scenarios import JAEGER_ARMS, build_jaeger, build_lemos

try:
    from photonpaths import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def workloads(rng: np.random.Generator) -> dict[str, tuple]:
    jaeger = outcome_program(build_jaeger(), None, (JAEGER_ARMS[0][0], JAEGER_ARMS[1][0]), ["PHI1", "PHI2"])
    lemos = outcome_program(build_lemos(), None, ("g", "Di"), ["O"])
    n = 1_000_000
    cdf = np.cumsum([0.1, 0.4, 0.4, 0.1])
    trials = np.repeat(np.arange(n, dtype=np.int64), 2)
    arms = np.tile(np.array([0, 1], dtype=np.int64), n)
    codes = np.where(arms == 0, rng.integers(0, 2, 2 * n), rng.integers(2, 4, 2 * n)).astype(np.int64)
    return {
        "path_sum jaeger 256x256 grid": (
            "path_sum",
            (jaeger.coeffs, jaeger.indptr, jaeger.indices, rng.uniform(0, 2 * math.pi, (65536, 2))),
        ),
        "path_sum lemos 512x512 image": (
            "path_sum",
            (lemos.coeffs, lemos.indptr, lemos.indices, rng.uniform(0, 2 * math.pi, (262144, 1))),
        ),
        "sample_outcomes 1e6 trials": ("sample_outcomes", (cdf, rng.random(n))),
        "tally_pairs 1e6 trials": ("tally_pairs", (trials, arms, codes, 4)),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = {"numpy": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("cython extension not built; timing numpy only")

    rng = np.random.default_rng(0)
    print(f"{'workload':<32}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for label, (fn, inputs) in workloads(rng).items():
        times = {}
        for name, module in backends.items():
            call = getattr(module, fn)
            times[name] = min(timeit.repeat(lambda: call(*inputs), number=1, repeat=args.repeat))
        cells = "".join(f"{times[name] * 1e3:>10.2f}ms" for name in backends)
        speedup = f"{times['numpy'] / times['cython']:>9.1f}x" if "cython" in times else ""
        print(f"{label:<32}{cells}{speedup}")


if __name__ == "__main__":
    main()
