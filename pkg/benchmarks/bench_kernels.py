"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from wesma import _backend


def _cases(rng):
    x = rng.normal(size=2 ** 15)
    taps = np.array([0.48296291, 0.83651630, 0.22414387, -0.12940952])
    V, d = 2000, 32
    tokens = rng.integers(0, V, size=20_000).astype(np.int64)
    offsets = np.arange(0, 20_001, 25, dtype=np.int64)
    negs = rng.integers(0, V, size=(20_000, 5)).astype(np.int64)
    w0 = rng.uniform(-0.5 / d, 0.5 / d, size=(V, d))
    A = rng.normal(size=(400, 400)) + 20 * np.eye(400)
    B = rng.normal(size=(400, 400))

    def conv():
        _backend.dilated_convolve(x, taps, 8)

    def cbow():
        _backend.cbow_epoch(w0.copy(), np.zeros((V, d)), tokens, offsets, 2, negs, 0.05)

    def gauss():
        _backend.gauss_eliminate(A.copy(), B.copy(), 1e-12)

    return [("dilated_convolve N=32768", conv), ("cbow_epoch 20k positions", cbow),
            ("gauss_eliminate 400x400 (400 rhs)", gauss)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cases = _cases(np.random.default_rng(0))
    backends = _backend.available_backends()
    print(f"{'kernel':<36}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases:
        times = []
        for b in backends:
            _backend.use_backend(b)
            fn()
            best = min(_timed(fn) for _ in range(args.repeat))
            times.append(best)
        speed = f"{times[-1] / times[0]:>9.1f}x" if len(times) == 2 else ""
        print(f"{name:<36}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


if __name__ == "__main__":
    main()
