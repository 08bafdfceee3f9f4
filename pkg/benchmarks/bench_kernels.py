"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py --n 100000 --repeat 20
"""

import argparse
import timeit

import numpy as np

from rarehc.kernels import numba_kernels, numpy_kernels


def cases(n, rng):
    p = np.sort(rng.random(n))
    imax = max(1, n // 10)
    q1 = p.copy()
    q1[: max(1, n // 100)] *= 0.5
    s1 = np.sort(q1)
    return {
        "hc_scan": lambda k: k.hc_scan(p, n, imax),
        "hc_components_sorted": lambda k: k.hc_components_sorted(p, n),
        "weighted_sup_sorted": lambda k: k.weighted_sup_sorted(p, s1, 1.0 / n, 0.1, n),
        "min_spacing_sorted": lambda k: k.min_spacing_sorted(p),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=100_000, help="sample size (default: %(default)s)")
    ap.add_argument("--repeat", type=int, default=20, help="timed calls per kernel (default: %(default)s)")
    ap.add_argument("--seed", type=int, default=0, help="RNG seed (default: %(default)s)")
    args = ap.parse_args(argv)

    if numba_kernels is None:
        print("numba is not installed; only the numpy path is available")
    table = cases(args.n, np.random.default_rng(args.seed))
    print(f"n = {args.n}, best of {args.repeat} calls, milliseconds")
    print(f"{'kernel':<22}{'numpy':>10}{'numba':>10}{'speedup':>9}")
    for name, call in table.items():
        t_np = min(timeit.repeat(lambda: call(numpy_kernels), number=1, repeat=args.repeat)) * 1e3
        if numba_kernels is None:
            print(f"{name:<22}{t_np:>10.3f}{'-':>10}{'-':>9}")
            continue
        a, b = call(numpy_kernels), call(numba_kernels)
        assert np.allclose(a, b, rtol=1e-12, atol=0), name
        t_nb = min(timeit.repeat(lambda: call(numba_kernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<22}{t_np:>10.3f}{t_nb:>10.3f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
