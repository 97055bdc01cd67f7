"""Wall time of one FFT convolution against n log n, n = (2b-2)^3.

    python scripts/matvec_scaling.py --b 16 32 64 128 [--fast-len]
"""
import argparse
import math
import timeit

import numpy as np

from smallscatter.fftconv import convolve, spectral_kernel


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--b", type=int, nargs="+", default=[16, 32, 64, 128])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--fast-len", action="store_true", help="pad to the next FFT-friendly length")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    k = 2 * math.pi * 1000 / 34400
    print(f"{'b':>5} {'L':>5} {'best s':>9} {'s/(n log n)':>12}")
    for b in args.b:
        sk = spectral_kernel(b, 1.0 / b, k, fast_len=args.fast_len)
        u = rng.normal(size=(b,) * 3) + 1j * rng.normal(size=(b,) * 3)
        best = min(timeit.repeat(lambda: convolve(sk, u), number=1, repeat=args.repeat))
        n = (2 * b - 2) ** 3
        print(f"{b:>5} {sk.side:>5} {best:9.4f} {best / (n * math.log(n)):12.3e}")


if __name__ == "__main__":
    main()
