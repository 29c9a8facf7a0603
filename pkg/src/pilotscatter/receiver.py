"""Single-receiver decoding of tag and productive data, plus the two-receiver
XOR baseline used as an oracle.

Each data symbol casts one vote, "translated" or not, by comparing its
demodulated content with the pilot consensus of its chip:

* WIFI_B, BLE: the bit differs.
* WIFI_G: most bits inside the decoding window differ.
* ZIGBEE: the despread 4-bit value differs.

A tag bit is the strict majority of its group's votes; ties read as 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ofdm
from .chipplan import ChipPlan
from .protocols import Frame, ProtocolId, ProtocolViolation, Region, demodulate
from .tag import tag_actions

LOW_CONFIDENCE_PILOT_DISAGREEMENT = 0.4


@dataclass(frozen=True)
class DecodingWindow:
    start_bit: int = 2
    length: int = 20

    def __post_init__(self):
        if self.length < 1 or self.start_bit < 0 or self.start_bit + self.length > ofdm.DATA_BITS_PER_SYMBOL:
            raise ValueError(
                f"window ({self.start_bit}, {self.length}) does not fit in {ofdm.DATA_BITS_PER_SYMBOL} bits"
            )

    @property
    def slice(self) -> slice:
        return slice(self.start_bit, self.start_bit + self.length)


DEFAULT_WINDOW = DecodingWindow()


@dataclass(frozen=True, eq=False)
class DecodeResult:
    tag_bits: np.ndarray
    productive_bits: np.ndarray
    per_chip_confidence: np.ndarray  # vote margin per tag bit, in [0.5, 1]
    packet_ok: bool
    low_confidence: np.ndarray  # per chip: pilot copies disagreed beyond the limit


def extract_window(symbol_decoded_bits, window: DecodingWindow = DEFAULT_WINDOW) -> np.ndarray:
    bits = np.asarray(symbol_decoded_bits, dtype=np.uint8).reshape(-1)
    if window.start_bit + window.length > bits.size:
        raise ValueError(f"window ({window.start_bit}, {window.length}) exceeds {bits.size} decoded bits")
    return bits[window.slice].copy()


def majority(rows: np.ndarray, axis: int) -> np.ndarray:
    """Per-position strict majority along ``axis``; ties give 0."""
    n = rows.shape[axis]
    return (2 * rows.sum(axis=axis, dtype=np.int64) > n).astype(np.uint8)


def symbol_votes(protocol: ProtocolId, decoded: np.ndarray, reference: np.ndarray, window: DecodingWindow) -> np.ndarray:
    """True where a decoded symbol reads as translated relative to ``reference``.

    Both arrays end in the per-symbol bit axis and broadcast against each other.
    """
    diff = decoded != reference
    if protocol is ProtocolId.WIFI_G:
        return 2 * diff[..., window.slice].sum(axis=-1) > window.length
    return diff.any(axis=-1)


def _group_decision(votes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    g = votes.shape[-1]
    ones = votes.sum(axis=-1)
    bits = (2 * ones > g).astype(np.uint8)
    confidence = np.maximum(ones, g - ones) / g
    return bits, confidence


def _check_regions(frame: Frame, plan: ChipPlan) -> None:
    regions = frame.regions
    n_pre = frame.n_preamble
    if np.any(regions[:n_pre] != Region.PREAMBLE):
        raise ProtocolViolation("PREAMBLE labels must form a prefix of the frame")
    payload = frame.payload_regions
    chipped = frame.n_chips * plan.lam
    if chipped > payload.size:
        raise ProtocolViolation(f"{frame.n_chips} chips of {plan.lam} symbols exceed {payload.size} payload symbols")
    expected = np.full(plan.lam, Region.DATA, dtype=np.int8)
    expected[: plan.pilot_count] = Region.PILOT
    if not np.array_equal(payload[:chipped], np.tile(expected, frame.n_chips)):
        raise ProtocolViolation("region labels do not match the chip plan")
    if np.any(payload[chipped:] == Region.PREAMBLE):
        raise ProtocolViolation("PREAMBLE label inside the payload")


def _pilot_consensus(chips: np.ndarray, pilot_count: int) -> np.ndarray:
    return majority(chips[:, :pilot_count], axis=1)


def decode_with_pilots(
    frame: Frame,
    plan: ChipPlan,
    window: DecodingWindow = DEFAULT_WINDOW,
    rng: np.random.Generator | None = None,
) -> DecodeResult:
    """Recover tag bits (pilot XOR data) and productive bits (pilots) from one frame.

    For WIFI_G the productive bits come from a second decoding pass in which
    the symbols the tag was found to translate are complemented back first,
    so the trellis disturbance around translated symbols does not reach the
    pilot edges.
    """
    _check_regions(frame, plan)
    n_chips = frame.n_chips
    dbps = frame.profile.data_bits_per_symbol
    pid = frame.protocol
    if n_chips == 0:
        empty = np.zeros(0, dtype=np.uint8)
        ok = frame.productive_bits.size == 0
        return DecodeResult(empty, empty, np.zeros(0), ok, np.zeros(0, dtype=bool))

    decoded = demodulate(frame, rng)
    chips = decoded[: n_chips * plan.lam].reshape(n_chips, plan.lam, dbps)
    consensus = _pilot_consensus(chips, plan.pilot_count)

    pilot_off = symbol_votes(pid, chips[:, : plan.pilot_count], consensus[:, None, :], window)
    low_confidence = pilot_off.mean(axis=1) > LOW_CONFIDENCE_PILOT_DISAGREEMENT

    data = chips[:, plan.pilot_count :].reshape(n_chips, plan.tag_bits_per_chip, plan.group_size, dbps)
    votes = symbol_votes(pid, data, consensus[:, None, None, :], window)
    tag_bits, confidence = _group_decision(votes)
    tag_bits = tag_bits.reshape(-1)

    if pid is ProtocolId.WIFI_G:
        actions = tag_actions(plan, n_chips, frame.n_payload, tag_bits)
        units = frame.units.copy()
        units[frame.n_preamble :][actions == 1] ^= 1
        redecoded = demodulate(frame.with_units(units), rng)
        consensus = _pilot_consensus(redecoded[: n_chips * plan.lam].reshape(n_chips, plan.lam, dbps), plan.pilot_count)

    productive = consensus.reshape(-1)
    ok = productive.size == frame.productive_bits.size and bool(np.array_equal(productive, frame.productive_bits))
    return DecodeResult(tag_bits, productive, confidence.reshape(-1), ok, low_confidence)


def decode_freerider(
    original: Frame,
    backscattered: Frame,
    group_size: int = 1,
    window: DecodingWindow = DEFAULT_WINDOW,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Tag bits as the per-group XOR of two separately received frames."""
    if original.protocol is not backscattered.protocol:
        raise ValueError(f"protocol mismatch: {original.protocol.value} vs {backscattered.protocol.value}")
    if original.n_payload != backscattered.n_payload:
        raise ValueError(f"payload length mismatch: {original.n_payload} vs {backscattered.n_payload}")
    n_groups = original.n_payload // group_size
    if n_groups == 0:
        return np.zeros(0, dtype=np.uint8)
    a = demodulate(original, rng)[: n_groups * group_size]
    b = demodulate(backscattered, rng)[: n_groups * group_size]
    votes = symbol_votes(original.protocol, b, a, window).reshape(n_groups, group_size)
    bits, _ = _group_decision(votes)
    return bits
