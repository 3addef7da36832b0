"""Compare the numba and pure-numpy Jacobi eigensolver kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--batch 10000] [--dims 2 3 4 6 8] [--repeat 3]

Both kernels see the same random Hermitian stacks.  The first numba call is
timed separately so compilation (or cache loading) is not mixed into the
steady-state figures.  LAPACK ``eigh`` is listed for reference only.
"""

import argparse
import time

import numpy as np

from entrobound._kernels import jacobi_numba, jacobi_numpy


def random_stack(rng, n, d):
    z = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
    return (z + np.conj(np.swapaxes(z, 1, 2))) / 2


def best_of(fn, a, repeat):
    times = []
    for _ in range(repeat):
        work = a.copy()
        t0 = time.perf_counter()
        out = fn(work)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--batch", type=int, default=10_000)
    p.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4, 6, 8])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    if jacobi_numba is None:
        print("numba is not installed; only the numpy kernel is timed")
    else:
        t0 = time.perf_counter()
        jacobi_numba(random_stack(rng, 2, 3))
        print(f"numba first call (compile or cache load): {time.perf_counter() - t0:.2f} s")

    print(f"{'d':>3} {'batch':>7} {'numpy s':>9} {'numba s':>9} {'speedup':>8} "
          f"{'lapack s':>9} {'max |dw|':>9}")
    for d in args.dims:
        a = random_stack(rng, args.batch, d)
        t_np, (w_np, *_) = best_of(jacobi_numpy, a, args.repeat)
        t_lapack, w_ref = best_of(np.linalg.eigvalsh, a, args.repeat)
        if jacobi_numba is None:
            t_nb, dev = float("nan"), np.max(np.abs(np.sort(w_np, axis=1) - w_ref))
        else:
            t_nb, (w_nb, *_) = best_of(jacobi_numba, a, args.repeat)
            dev = max(np.max(np.abs(np.sort(w_np, axis=1) - w_ref)),
                      np.max(np.abs(np.sort(w_nb, axis=1) - w_ref)))
        print(f"{d:>3} {args.batch:>7} {t_np:>9.3f} {t_nb:>9.3f} {t_np / t_nb:>7.1f}x "
              f"{t_lapack:>9.3f} {dev:>9.1e}")


if __name__ == "__main__":
    main()
