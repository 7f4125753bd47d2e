"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the quasi-triangular Lyapunov back-substitution and the simulation
recurrence on heat-rod and random inputs, and checks both backends agree.
"""
import argparse
import timeit

import numpy as np
import scipy.linalg

from tlbt import _fallback, heat_rod, random_stable
from tlbt.linalg import _schur_blocks, mat_exp

try:
    from tlbt import _kernels
except ImportError:
    _kernels = None


def lyap_case(sys):
    T, _ = scipy.linalg.schur(sys.A, output="real")
    T = np.ascontiguousarray(T)
    starts, sizes = _schur_blocks(T)
    R = np.ascontiguousarray(sys.B @ sys.B.T)
    return T, R, starts, sizes


def recurrence_case(n, steps, seed=0):
    sys = random_stable(n, 1, 1, seed)
    Phi = np.ascontiguousarray(mat_exp(sys.A, 1e-3))
    GU = np.ascontiguousarray(np.random.default_rng(seed).standard_normal((steps, n)))
    return Phi, GU


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled kernels not built; only the fallback is available")

    cases = [
        ("lyap heat_rod(50)", _fallback.lyap_quasitri, "lyap_quasitri", lyap_case(heat_rod(50))),
        ("lyap heat_rod(200)", _fallback.lyap_quasitri, "lyap_quasitri", lyap_case(heat_rod(200))),
        ("lyap random(100)", _fallback.lyap_quasitri, "lyap_quasitri", lyap_case(random_stable(100, 2, 2, 1))),
        ("recurrence n=10, 4096 steps", _fallback.recurrence, "recurrence", recurrence_case(10, 4096)),
        ("recurrence n=200, 4096 steps", _fallback.recurrence, "recurrence", recurrence_case(200, 4096)),
    ]
    print(f"{'case':<30} {'python [s]':>11} {'cython [s]':>11} {'speed-up':>9} {'max diff':>10}")
    for name, py_fn, attr, data in cases:
        t_py = best(lambda: py_fn(*data), args.repeat)
        ref = py_fn(*data)
        if _kernels is None:
            print(f"{name:<30} {t_py:11.4f} {'-':>11} {'-':>9} {'-':>10}")
            continue
        cy_fn = getattr(_kernels, attr)
        t_cy = best(lambda: cy_fn(*data), args.repeat)
        diff = float(np.max(np.abs(cy_fn(*data) - ref)) / max(np.max(np.abs(ref)), 1e-300))
        print(f"{name:<30} {t_py:11.4f} {t_cy:11.4f} {t_py / t_cy:9.1f} {diff:10.1e}")


if __name__ == "__main__":
    main()
