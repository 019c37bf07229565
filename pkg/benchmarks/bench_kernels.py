"""Compare the compiled and pure-Python kernel backends.

Usage: python benchmarks/bench_kernels.py [--sizes 100 400] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from optapprox import _pykernels

try:
    from optapprox import _ckernels
except ImportError:
    _ckernels = None


def cases(n, rng):
    f = rng.normal(size=9) + 1j * rng.normal(size=9)
    w = (np.arange(n + f.size) + 1.0) ** 0.5
    m = _pykernels.gram_matrix(f, w, n)
    L, _ = _pykernels.cholesky(m)
    b = np.zeros(n + 1, complex)
    b[0] = 1
    deg = min(n, 60)
    a = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
    z0 = 0.9 * np.exp(2j * np.pi * (np.arange(deg) + 0.4) / deg)
    return {
        "gram_matrix": lambda k: k.gram_matrix(f, w, n),
        "cholesky": lambda k: k.cholesky(m),
        "solve": lambda k: k.backward_solve(L, k.forward_solve(L, b, n + 1), n + 1),
        f"aberth(deg {deg})": lambda k: k.aberth(a, z0.copy(), 500),
    }


def best_time(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 1 << 16:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[50, 200, 500])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; only the Python backend is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'n':>6}{'python [s]':>14}{'cython [s]':>14}{'speedup':>10}")
    for n in args.sizes:
        for name, call in cases(n, rng).items():
            tp = best_time(lambda: call(_pykernels), args.repeat)
            if _ckernels is None:
                print(f"{name:<22}{n:>6}{tp:>14.3e}{'-':>14}{'-':>10}")
                continue
            tc = best_time(lambda: call(_ckernels), args.repeat)
            print(f"{name:<22}{n:>6}{tp:>14.3e}{tc:>14.3e}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
