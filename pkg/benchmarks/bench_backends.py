"""Time the numba and pure-numpy flavours of each hot kernel side by side.

Run with ``python3 benchmarks/bench_backends.py``. The numba timings exclude
the first (compiling) call.
"""
import argparse
import math
import timeit

import numpy as np

from qdchoice import _kernels as k
from qdchoice import hvm
from qdchoice.circuit import ExperimentSetting


def scan_inputs(eps):
    settings = [ExperimentSetting(a, p, eps) for a in (math.pi / 6, math.pi / 3) for p in (0.0, math.pi / 2, math.pi)]
    betas = np.array([hvm.derived_quantities(s).beta for s in settings])
    targets = np.array([hvm.noisy_joint_distribution(s).p for s in settings])
    return betas, targets


def bench(label, fn_nb, fn_np, repeat):
    fn_nb()  # compile
    t_nb = min(timeit.repeat(fn_nb, number=1, repeat=repeat))
    t_np = min(timeit.repeat(fn_np, number=1, repeat=repeat))
    print(f"{label:<28}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>10.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grid", type=int, default=21)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    sym = rng.normal(size=(8, 8))
    sym = sym + sym.T
    rows = rng.random((100_000, 5))
    s = ExperimentSetting(0.7, 1.3, 0.5)
    q = hvm.derived_quantities(s)
    target = hvm.noisy_joint_distribution(s).p
    grid = np.linspace(0.0, 1.0, args.grid)
    betas, targets = scan_inputs(0.5)

    print(f"{'kernel':<28}{'numba ms':>12}{'numpy ms':>12}{'ratio':>11}")
    bench("jacobi 8x8 (x1000)",
          lambda: [k._jacobi_eigvals_nb(sym) for _ in range(1000)],
          lambda: [k._jacobi_eigvals_py(sym) for _ in range(1000)], args.repeat)
    bench("residual 1e5 rows",
          lambda: k._residual_many_nb(rows, q.beta, target),
          lambda: k.residual_many_np(rows, q.beta, target), args.repeat)
    bench("classify 1e5 rows",
          lambda: k._classify_many_nb(rows, q.p0, q.beta, 1e-6),
          lambda: k.classify_many_np(rows, q.p0, q.beta, 1e-6), args.repeat)
    bench(f"scan grid {args.grid}^5",
          lambda: k._scan_grid_nb(grid, betas, targets),
          lambda: k.scan_grid_np(grid, betas, targets), args.repeat)


if __name__ == "__main__":
    main()
