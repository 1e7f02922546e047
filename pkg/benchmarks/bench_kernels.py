"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 200000] [--repeat 3]

Times the batched trigonometric maximizer directly and a full 200x200 regime
map run through each backend.
"""
import argparse
import math
import time

import numpy as np

from ifccr import _backend, _kernels_py, gaussian

try:
    from ifccr import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def use_backend(mod):
    _backend.maximize_trig = mod.maximize_trig
    _backend.entropy_nats = mod.entropy_nats


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="batch size for the maximizer")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    a, b, c, d = (rng.normal(0, 3, args.n) for _ in range(4))
    backends = [("python", _kernels_py)] + ([("cython", _kernels)] if _kernels else [])
    spec = gaussian.RegimeMapSpec()
    saved = (_backend.maximize_trig, _backend.entropy_nats)

    rows = []
    results = {}
    try:
        for name, mod in backends:
            kern = best_of(lambda: mod.maximize_trig(a, b, c, d, 0.0, math.pi / 2, 64, 1e-10), args.repeat)
            use_backend(mod)
            mp = best_of(lambda: gaussian.regime_map(spec), args.repeat)
            results[name] = gaussian.regime_map(spec)
            rows.append((name, kern, mp))
    finally:
        _backend.maximize_trig, _backend.entropy_nats = saved

    print(f"{'backend':<8} {'maximize_trig n=' + str(args.n):>26} {'regime_map 200x200':>20}")
    for name, kern, mp in rows:
        print(f"{name:<8} {kern * 1e3:>23.1f} ms {mp * 1e3:>17.1f} ms")
    if len(rows) == 2:
        print(f"speedup  {rows[0][1] / rows[1][1]:>25.1f}x {rows[0][2] / rows[1][2]:>19.1f}x")
        same = np.array_equal(results["python"].labels, results["cython"].labels)
        diff = np.max(np.abs(results["python"].very_strong_margin - results["cython"].very_strong_margin))
        print(f"labels identical: {same}; max margin difference {diff:.2e}")
    else:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
