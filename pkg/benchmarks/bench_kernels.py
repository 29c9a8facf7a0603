"""Compare the numba and pure-numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--symbols M]

Each kernel is timed on both backends with identical inputs; outputs are
checked for equality before timing. The numba column is skipped when numba
is not importable or ``PILOTSCATTER_NO_NUMBA=1`` is set.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from pilotscatter import kernels
from pilotscatter._accel import HAS_NUMBA


def _time(fn, repeat: int) -> float:
    fn()  # warm-up (includes JIT compilation)
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def cases(n_symbols: int, rng: np.random.Generator):
    bits = rng.integers(0, 2, 24 * n_symbols).astype(np.uint8)
    coded = kernels._bcc_encode_np(np.concatenate([bits, np.zeros(6, np.uint8)]), 0)
    noisy = coded ^ (rng.random(coded.size) < 0.02).astype(np.uint8)
    u = rng.random(48 * n_symbols)
    return {
        "bcc_encode": (
            lambda: kernels._bcc_encode_nb(bits, 0, kernels.TRELLIS_OUT),
            lambda: kernels._bcc_encode_np(bits, 0),
        ),
        "viterbi": (
            lambda: kernels._viterbi_nb(noisy, True, kernels._BRANCH_OUT),
            lambda: kernels._viterbi_np(noisy, True),
        ),
        "ge_chain": (
            lambda: kernels._ge_states_nb(u, 0.03, 0.5, 0),
            lambda: kernels._ge_states_np(u, 0.03, 0.5, 0),
        ),
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--symbols", type=int, default=1000, help="OFDM symbols per kernel call")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<12} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for name, (nb, np_) in cases(args.symbols, rng).items():
        if HAS_NUMBA and not np.array_equal(nb(), np_()):
            raise SystemExit(f"{name}: backends disagree")
        t_np = _time(np_, args.repeat)
        if HAS_NUMBA:
            t_nb = _time(nb, args.repeat)
            print(f"{name:<12} {t_nb * 1e3:>10.3f} {t_np * 1e3:>10.3f} {t_np / t_nb:>7.1f}x")
        else:
            print(f"{name:<12} {'-':>10} {t_np * 1e3:>10.3f} {'-':>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
