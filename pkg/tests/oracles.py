"""Independent reference implementations used as test oracles.

Written directly from the standards' textual definitions, sharing no code
with the package.
"""

import itertools

import numpy as np

G0 = 0o133
G1 = 0o171


def lfsr_stream(seed: int, n: int) -> list[int]:
    """x^7 + x^4 + 1 scrambler. ``seed`` bit k holds register stage x(k+1)."""
    reg = seed & 0x7F
    out = []
    for _ in range(n):
        x7 = (reg >> 6) & 1
        x4 = (reg >> 3) & 1
        fb = x7 ^ x4
        out.append(fb)
        reg = ((reg << 1) | fb) & 0x7F
    return out


def conv_encode(bits) -> list[int]:
    """Rate-1/2 K=7 encoder from the octal generators; output A0 B0 A1 B1 ..."""
    hist = [0] * 7  # hist[d] = input delayed by d
    out = []
    for b in bits:
        hist = [int(b)] + hist[:6]
        a = sum(hist[d] for d in range(7) if (G0 >> (6 - d)) & 1) % 2
        c = sum(hist[d] for d in range(7) if (G1 >> (6 - d)) & 1) % 2
        out += [a, c]
    return out


def all_codewords(n_data: int, tail: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """Every input of ``n_data`` bits (plus zero tail) and its codeword, via linearity."""
    n = n_data + tail
    basis = np.array([conv_encode([1 if j == i else 0 for j in range(n)]) for i in range(n_data)], dtype=np.uint8)
    inputs = ((np.arange(2**n_data)[:, None] >> np.arange(n_data)[None, :]) & 1).astype(np.uint8)
    words = (inputs.astype(np.int64) @ basis.astype(np.int64)) % 2
    return inputs, words.astype(np.uint8)


def ml_decode(received, n_data: int) -> list[np.ndarray]:
    """All minimum-distance data words for a terminated received sequence."""
    inputs, words = all_codewords(n_data)
    dist = (words != np.asarray(received, dtype=np.uint8)[None, :]).sum(axis=1)
    return [inputs[i] for i in np.flatnonzero(dist == dist.min())]


def interleaver_index(k: int, ncbps: int = 48, nbpsc: int = 1) -> int:
    """Output position of coded bit k: the two-step 802.11 interleaver formula."""
    i = (ncbps // 16) * (k % 16) + k // 16
    s = max(nbpsc // 2, 1)
    return s * (i // s) + (i + ncbps - (16 * i) // ncbps) % s


# IEEE 802.15.4 2.4 GHz symbol 0, chips c0..c31.
ZIGBEE_SYMBOL0 = "11011001110000110101001000101110"


def zigbee_table_oracle() -> np.ndarray:
    """Symbols 1-7 are 4-chip right rotations of symbol 0; 8-15 invert the odd chips of 0-7."""
    base = [int(c) for c in ZIGBEE_SYMBOL0]
    rows = []
    for s in range(8):
        r = 4 * s
        rows.append(base[-r:] + base[:-r] if r else list(base))
    for s in range(8):
        rows.append([c ^ (i % 2) for i, c in enumerate(rows[s])])
    return np.array(rows, dtype=np.uint8)


def majority_oracle(votes) -> int:
    votes = list(votes)
    return 1 if 2 * sum(votes) > len(votes) else 0


def flips_within(n: int, radius: int):
    for r in range(radius + 1):
        yield from itertools.combinations(range(n), r)
