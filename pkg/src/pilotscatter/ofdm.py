"""802.11g BPSK rate-1/2 payload pipeline at the coded-bit level.

Scrambler -> convolutional encoder -> 48-bit block interleaver, and the
inverse with a hard-decision Viterbi decoder. Subcarrier mapping, cyclic prefix
and pilot tones are not modelled: a 180 degree phase flip of a BPSK OFDM symbol
is exactly a complement of its 48 coded bits.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels

DATA_BITS_PER_SYMBOL = 24
CODED_BITS_PER_SYMBOL = 48
TAIL_BITS = 6
DEFAULT_SCRAMBLER_SEED = 0b1011101


@dataclass(frozen=True)
class OfdmSymbol:
    coded_bits: np.ndarray
    index: int

    def __post_init__(self):
        bits = np.asarray(self.coded_bits, dtype=np.uint8)
        if bits.shape != (CODED_BITS_PER_SYMBOL,):
            raise ValueError(f"OfdmSymbol needs {CODED_BITS_PER_SYMBOL} coded bits, got shape {bits.shape}")
        if np.any(bits > 1):
            raise ValueError("coded bits must be 0 or 1")
        object.__setattr__(self, "coded_bits", bits)

    def __eq__(self, other):
        if not isinstance(other, OfdmSymbol):
            return NotImplemented
        return self.index == other.index and np.array_equal(self.coded_bits, other.coded_bits)

    __hash__ = None


@dataclass(frozen=True)
class CoderState:
    """Per-frame coder configuration.

    ``scrambler_register`` holds x7..x1 as bits 6..0, so the textbook state
    written ``1011101`` is ``0b1011101``.
    """

    scrambler_register: int = DEFAULT_SCRAMBLER_SEED
    encoder_register: int = 0

    def __post_init__(self):
        if not 0 < self.scrambler_register < 128:
            raise ValueError(f"scrambler_register must be a nonzero 7-bit value, got {self.scrambler_register}")
        if not 0 <= self.encoder_register < 64:
            raise ValueError(f"encoder_register must be a 6-bit value, got {self.encoder_register}")


def _as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8).reshape(-1)
    if np.any(arr > 1):
        raise ValueError("bit sequences may only contain 0 and 1")
    return arr


@lru_cache(maxsize=128)
def _scrambler_period(seed: int) -> np.ndarray:
    x = [(seed >> k) & 1 for k in range(7)]  # x[0] is x1
    seq = np.empty(127, dtype=np.uint8)
    for i in range(127):
        fb = x[6] ^ x[3]
        seq[i] = fb
        x = [fb] + x[:6]
    seq.setflags(write=False)
    return seq


def scrambler_sequence(seed: int, n: int) -> np.ndarray:
    """First ``n`` bits of the x^7 + x^4 + 1 sequence started from ``seed``."""
    if not 0 < seed < 128:
        raise ValueError(f"scrambler seed must be a nonzero 7-bit value, got {seed}")
    period = _scrambler_period(int(seed))
    reps = -(-n // 127) if n else 0
    return np.tile(period, reps)[:n]


def scramble(raw_bits, seed: int) -> np.ndarray:
    bits = _as_bits(raw_bits)
    return bits ^ scrambler_sequence(seed, bits.size)


descramble = scramble


def bcc_encode(data_bits, state: int = 0) -> np.ndarray:
    """Rate-1/2 K=7 encoding, output ordered A0 B0 A1 B1 ...

    No tail is added here; callers append :data:`TAIL_BITS` zeros to flush.
    """
    return kernels.bcc_encode_bits(_as_bits(data_bits), state)


def viterbi_decode(coded_bits, terminated: bool = False) -> np.ndarray:
    """Minimum-Hamming-distance decode of a rate-1/2 stream.

    Full traceback over the whole input. With ``terminated`` the traceback
    starts from the zero state, otherwise from the best end state (lowest
    index on a tie). Metric ties in the add-compare-select step go to the
    lower-numbered predecessor state.
    """
    coded = _as_bits(coded_bits)
    if coded.size % 2:
        raise ValueError(f"coded stream must have even length, got {coded.size}")
    return kernels.viterbi_bits(coded, terminated)


@lru_cache(maxsize=None)
def interleaver_permutation() -> np.ndarray:
    """``perm[k]`` is the output position of input bit ``k`` (BPSK, 48 bits)."""
    k = np.arange(CODED_BITS_PER_SYMBOL)
    ncbps = CODED_BITS_PER_SYMBOL
    i = (ncbps // 16) * (k % 16) + k // 16
    s = 1
    j = s * (i // s) + (i + ncbps - (16 * i) // ncbps) % s
    j.setflags(write=False)
    return j


def _check_block(block) -> np.ndarray:
    bits = _as_bits(block)
    if bits.size != CODED_BITS_PER_SYMBOL:
        raise ValueError(f"interleaver block must hold {CODED_BITS_PER_SYMBOL} bits, got {bits.size}")
    return bits


def interleave(coded_bits) -> np.ndarray:
    bits = _check_block(coded_bits)
    out = np.empty_like(bits)
    out[interleaver_permutation()] = bits
    return out


def deinterleave(coded_bits) -> np.ndarray:
    bits = _check_block(coded_bits)
    return bits[interleaver_permutation()]


def _check_payload(payload_bits) -> np.ndarray:
    bits = _as_bits(payload_bits)
    if bits.size % DATA_BITS_PER_SYMBOL:
        raise ValueError(
            f"payload length {bits.size} is not a multiple of {DATA_BITS_PER_SYMBOL} data bits per symbol"
        )
    return bits


def encode_stream(payload_bits, state: CoderState = CoderState()) -> tuple[np.ndarray, np.ndarray]:
    """Scramble, encode (with tail) and interleave.

    Returns ``(blocks, tail)``: an ``(m, 48)`` array of interleaved coded
    blocks and the 12 coded tail bits that flush the encoder.
    """
    bits = _check_payload(payload_bits)
    scrambled = scramble(bits, state.scrambler_register)
    coded = bcc_encode(np.concatenate([scrambled, np.zeros(TAIL_BITS, np.uint8)]), state.encoder_register)
    m = bits.size // DATA_BITS_PER_SYMBOL
    body = coded[: m * CODED_BITS_PER_SYMBOL].reshape(m, CODED_BITS_PER_SYMBOL)
    # row-wise interleave(): out[perm[k]] = in[k]
    blocks = body[:, interleaver_permutation().argsort()]
    return np.ascontiguousarray(blocks), coded[m * CODED_BITS_PER_SYMBOL :].copy()


def decode_stream(blocks: np.ndarray, tail=None, state: CoderState = CoderState()) -> np.ndarray:
    """Inverse of :func:`encode_stream`; returns the descrambled payload bits.

    Without ``tail`` the Viterbi traceback starts from the best end state.
    """
    blocks = np.asarray(blocks, dtype=np.uint8).reshape(-1, CODED_BITS_PER_SYMBOL)
    m = blocks.shape[0]
    body = blocks[:, interleaver_permutation()].reshape(-1)
    if tail is None:
        decoded = viterbi_decode(body, terminated=False)
    else:
        decoded = viterbi_decode(np.concatenate([body, _as_bits(tail)]), terminated=True)
    decoded = decoded[: m * DATA_BITS_PER_SYMBOL]
    return descramble(decoded, state.scrambler_register)


def ofdm_symbol_map(payload_bits, state: CoderState = CoderState()) -> list[OfdmSymbol]:
    blocks, _ = encode_stream(payload_bits, state)
    return [OfdmSymbol(row, i) for i, row in enumerate(blocks)]


def ofdm_symbol_unmap(symbols, state: CoderState = CoderState(), tail=None) -> np.ndarray:
    symbols = list(symbols)
    if not symbols:
        return np.zeros(0, dtype=np.uint8)
    blocks = np.stack([s.coded_bits for s in symbols])
    return decode_stream(blocks, tail, state)
