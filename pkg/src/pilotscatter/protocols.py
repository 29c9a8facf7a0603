"""Carrier protocols, frame construction and per-symbol demodulation.

Every frame is stored as an ``(n_symbols, width)`` uint8 array of physical
units, one row per carrier symbol:

========  =====  ==============================================
protocol  width  row content
========  =====  ==============================================
WIFI_B    1      the DBPSK bit (phase 0 / 180 deg)
WIFI_G    48     interleaved coded bits of one BPSK OFDM symbol
ZIGBEE    32     O-QPSK chips c0..c31
BLE       1      GFSK tone, 0 = f0, 1 = f1
========  =====  ==============================================

Preamble rows come first, then the payload rows. Region labels mark each row
as PREAMBLE, PILOT or DATA.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import TYPE_CHECKING, Any

import numpy as np

from . import ofdm
from .ofdm import CoderState, OfdmSymbol

if TYPE_CHECKING:
    from .chipplan import ChipPlan


class ProtocolId(str, enum.Enum):
    WIFI_B = "WIFI_B"
    WIFI_G = "WIFI_G"
    ZIGBEE = "ZIGBEE"
    BLE = "BLE"


class Region(enum.IntEnum):
    PREAMBLE = 0
    PILOT = 1
    DATA = 2


class BleTone(enum.IntEnum):
    F0 = 0
    F1 = 1


class CapacityExceeded(ValueError):
    pass


class ProtocolViolation(ValueError):
    pass


@dataclass(frozen=True)
class ProtocolProfile:
    protocol_id: ProtocolId
    symbol_duration: int  # microseconds
    data_bits_per_symbol: int
    preamble_duration: int  # microseconds
    packet_rate: float  # packets per second
    max_payload_symbols: int
    default_lambda: int
    unit_width: int
    frequency_shift_hz: float = 0.0

    @property
    def preamble_symbols(self) -> int:
        return self.preamble_duration // self.symbol_duration

    def airtime(self, payload_symbols: int) -> int:
        return self.preamble_duration + payload_symbols * self.symbol_duration

    def replace(self, **changes: Any) -> ProtocolProfile:
        return dataclasses.replace(self, **changes)


# WIFI_B / WIFI_G packet rates are not measured values; 500/s is the rate at
# which one productive bit per packet gives 0.5 kbps.
PROFILES: dict[ProtocolId, ProtocolProfile] = {
    ProtocolId.WIFI_B: ProtocolProfile(ProtocolId.WIFI_B, 1, 1, 192, 500.0, 18496, 16, 1),
    ProtocolId.WIFI_G: ProtocolProfile(ProtocolId.WIFI_G, 4, 24, 20, 500.0, 1365, 4, 48),
    # SHR (preamble + SFD) and PHR: 12 symbols
    ProtocolId.ZIGBEE: ProtocolProfile(ProtocolId.ZIGBEE, 16, 4, 192, 20.0, 254, 6, 32),
    # preamble, access address and PDU header: 56 us; 37-byte modulatable PDU payload
    ProtocolId.BLE: ProtocolProfile(ProtocolId.BLE, 1, 1, 56, 70.0, 296, 24, 1, frequency_shift_hz=500e3),
}


def get_profile(protocol: ProtocolId | str) -> ProtocolProfile:
    return PROFILES[ProtocolId(protocol)]


# --------------------------------------------------------------------------
# ZigBee


@lru_cache(maxsize=None)
def zigbee_pn_table() -> np.ndarray:
    """The 16 x 32 chip table, loaded from ``data/zigbee_pn.txt``."""
    text = resources.files(__package__).joinpath("data/zigbee_pn.txt").read_text()
    rows = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    table = np.array([[int(c) for c in row] for row in rows], dtype=np.uint8)
    if table.shape != (16, 32):
        raise RuntimeError(f"corrupt ZigBee chip table, shape {table.shape}")
    table.setflags(write=False)
    return table


def zigbee_spread(symbol_value: int) -> np.ndarray:
    if not 0 <= symbol_value < 16:
        raise ValueError(f"ZigBee symbol value must be in 0..15, got {symbol_value}")
    return zigbee_pn_table()[symbol_value].copy()


def zigbee_scores(chips: np.ndarray) -> np.ndarray:
    """Chip agreement counts, shape ``(n, 16)``, for ``(n, 32)`` chip rows."""
    chips = np.atleast_2d(np.asarray(chips, dtype=np.int16))
    table = zigbee_pn_table().astype(np.int16)
    corr = (2 * chips - 1) @ (2 * table - 1).T
    return (corr + 32) // 2


def zigbee_despread_many(chips: np.ndarray, rng: np.random.Generator | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Best-matching symbol value per row; ties go to a seeded random pick."""
    if rng is None:
        rng = np.random.default_rng(0)
    scores = zigbee_scores(chips)
    best = scores.max(axis=1)
    keys = rng.random(scores.shape)
    keys[scores < best[:, None]] = -1.0
    return keys.argmax(axis=1), best


def zigbee_despread(chips, rng: np.random.Generator | None = None) -> tuple[int, int]:
    chips = np.asarray(chips, dtype=np.uint8)
    if chips.shape != (32,):
        raise ValueError(f"expected 32 chips, got shape {chips.shape}")
    values, scores = zigbee_despread_many(chips[None, :], rng)
    return int(values[0]), int(scores[0])


def _bits_to_nibbles(bits: np.ndarray) -> np.ndarray:
    # 802.15.4 maps b0 (first bit) to the least significant bit of the symbol
    return bits.reshape(-1, 4) @ np.array([1, 2, 4, 8])


def _nibbles_to_bits(values: np.ndarray) -> np.ndarray:
    return ((np.asarray(values)[:, None] >> np.arange(4)) & 1).astype(np.uint8)


# --------------------------------------------------------------------------
# BLE


def ble_symbol(bit: int) -> BleTone:
    if bit not in (0, 1):
        raise ValueError(f"BLE symbol bit must be 0 or 1, got {bit!r}")
    return BleTone(bit)


def ble_bit(tone: BleTone | int) -> int:
    return int(BleTone(tone))


# --------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class CarrierSymbol:
    kind: ProtocolId
    payload: Any
    region: Region


@dataclass(frozen=True, eq=False)
class Frame:
    profile: ProtocolProfile
    units: np.ndarray
    regions: np.ndarray
    productive_bits: np.ndarray
    plan: ChipPlan | None = None
    n_chips: int = 0
    values: np.ndarray | None = None  # ZigBee: symbol value each row was spread from
    tail: np.ndarray | None = None  # WIFI_G: coded tail bits after the last symbol
    coder: CoderState | None = None
    shifted: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def protocol(self) -> ProtocolId:
        return self.profile.protocol_id

    @property
    def n_preamble(self) -> int:
        return int(np.count_nonzero(self.regions == Region.PREAMBLE))

    @property
    def payload_units(self) -> np.ndarray:
        return self.units[self.n_preamble :]

    @property
    def payload_regions(self) -> np.ndarray:
        return self.regions[self.n_preamble :]

    @property
    def n_payload(self) -> int:
        return self.units.shape[0] - self.n_preamble

    @property
    def airtime(self) -> int:
        return self.profile.airtime(self.n_payload)

    def with_units(self, units: np.ndarray, **changes: Any) -> Frame:
        return dataclasses.replace(self, units=units, **changes)

    def same_content(self, other: Frame) -> bool:
        return (
            self.protocol == other.protocol
            and np.array_equal(self.units, other.units)
            and np.array_equal(self.regions, other.regions)
            and (self.tail is None) == (other.tail is None)
            and (self.tail is None or np.array_equal(self.tail, other.tail))
        )

    def carrier_symbols(self) -> list[CarrierSymbol]:
        out = []
        for i, (row, region) in enumerate(zip(self.units, self.regions)):
            pid = self.protocol
            if pid is ProtocolId.WIFI_G:
                payload = OfdmSymbol(row, i)
            elif pid is ProtocolId.ZIGBEE:
                payload = (int(self.values[i]), row.copy())
            elif pid is ProtocolId.BLE:
                payload = BleTone(int(row[0]))
            else:
                payload = int(row[0])
            out.append(CarrierSymbol(pid, payload, Region(int(region))))
        return out


def _preamble_units(profile: ProtocolProfile, n_payload: int) -> tuple[np.ndarray, np.ndarray | None]:
    n = profile.preamble_symbols
    pid = profile.protocol_id
    if pid is ProtocolId.WIFI_B:
        # 128 SYNC ones, then SFD/PLCP header; content is never decoded here
        units = np.ones((n, 1), dtype=np.uint8)
        return units, None
    if pid is ProtocolId.WIFI_G:
        return np.zeros((n, ofdm.CODED_BITS_PER_SYMBOL), dtype=np.uint8), None
    if pid is ProtocolId.ZIGBEE:
        length = min(n_payload // 2, 127)
        values = np.array([0] * 8 + [0x7, 0xA, length & 0xF, length >> 4])[:n]
        return zigbee_pn_table()[values].copy(), values
    # BLE: alternating preamble, advertising access address, PDU header
    aa = [(0x8E89BED6 >> k) & 1 for k in range(32)]
    bits = ([0, 1] * 4 + aa + [0] * 16)[:n]
    return np.array(bits, dtype=np.uint8)[:, None], None


def encode_symbols(profile: ProtocolProfile, groups: np.ndarray, coder: CoderState | None = None):
    """Physical rows for a stream of per-symbol data groups.

    ``groups`` has shape ``(n, data_bits_per_symbol)``. Returns
    ``(units, values, tail)``.
    """
    pid = profile.protocol_id
    groups = np.asarray(groups, dtype=np.uint8).reshape(-1, profile.data_bits_per_symbol)
    if pid is ProtocolId.WIFI_G:
        blocks, tail = ofdm.encode_stream(groups.reshape(-1), coder or CoderState())
        return blocks, None, tail
    if pid is ProtocolId.ZIGBEE:
        values = _bits_to_nibbles(groups)
        return zigbee_pn_table()[values].copy(), values, None
    return groups.copy(), None, None


def build_frame(
    profile: ProtocolProfile,
    productive_bits,
    plan: ChipPlan,
    payload_symbols: int | None = None,
    coder: CoderState | None = None,
) -> Frame:
    """Spread each productive symbol group over one chip of ``plan.lam`` symbols.

    The first ``plan.pilot_count`` symbols of every chip are PILOT, the rest
    DATA. ``payload_symbols`` may exceed the chipped length; the leftover
    trailing symbols are filler labelled PILOT, outside every chip, so the tag
    leaves them alone.
    """
    bits = np.asarray(productive_bits, dtype=np.uint8).reshape(-1)
    dbps = profile.data_bits_per_symbol
    if bits.size % dbps:
        raise ValueError(f"{bits.size} productive bits is not a whole number of {dbps}-bit symbol groups")
    n_chips = bits.size // dbps
    chipped = n_chips * plan.lam
    if payload_symbols is None:
        payload_symbols = chipped
    if payload_symbols < chipped:
        raise CapacityExceeded(f"{n_chips} chips of {plan.lam} symbols do not fit in {payload_symbols} payload symbols")
    if payload_symbols > profile.max_payload_symbols:
        raise CapacityExceeded(
            f"{payload_symbols} payload symbols exceed {profile.protocol_id.value} capacity of "
            f"{profile.max_payload_symbols}"
        )
    if profile.protocol_id is ProtocolId.WIFI_G and coder is None:
        coder = CoderState()

    groups = np.repeat(bits.reshape(n_chips, dbps), plan.lam, axis=0)
    filler = np.zeros((payload_symbols - chipped, dbps), dtype=np.uint8)
    groups = np.concatenate([groups, filler])

    pre_units, pre_values = _preamble_units(profile, payload_symbols)
    units, values, tail = encode_symbols(profile, groups, coder)

    chip_regions = np.full(plan.lam, Region.DATA, dtype=np.int8)
    chip_regions[: plan.pilot_count] = Region.PILOT
    regions = np.concatenate(
        [
            np.full(pre_units.shape[0], Region.PREAMBLE, dtype=np.int8),
            np.tile(chip_regions, n_chips),
            np.full(payload_symbols - chipped, Region.PILOT, dtype=np.int8),
        ]
    )
    if values is not None:
        values = np.concatenate([pre_values, values])
    return Frame(
        profile=profile,
        units=np.concatenate([pre_units, units]),
        regions=regions,
        productive_bits=bits,
        plan=plan,
        n_chips=n_chips,
        values=values,
        tail=tail,
        coder=coder,
    )


def demodulate(frame: Frame, rng: np.random.Generator | None = None) -> np.ndarray:
    """What a commodity receiver reports for each payload symbol.

    Returns ``(n_payload, data_bits_per_symbol)`` decoded bits: the bit for
    WIFI_B/BLE, the Viterbi-decoded and descrambled 24 bits for WIFI_G, and the
    despread 4-bit value for ZIGBEE.
    """
    units = frame.payload_units
    pid = frame.protocol
    if pid is ProtocolId.WIFI_G:
        bits = ofdm.decode_stream(units, frame.tail, frame.coder or CoderState())
        return bits.reshape(-1, ofdm.DATA_BITS_PER_SYMBOL)
    if pid is ProtocolId.ZIGBEE:
        if units.shape[0] == 0:
            return np.zeros((0, 4), dtype=np.uint8)
        values, _ = zigbee_despread_many(units, rng)
        return _nibbles_to_bits(values)
    return units.copy()


def decode_productive_plain(frame: Frame, rng: np.random.Generator | None = None) -> np.ndarray:
    """Productive bits of an unmodulated frame: first copy of each chip."""
    decoded = demodulate(frame, rng)
    if frame.plan is None or frame.n_chips == 0:
        return np.zeros(0, dtype=np.uint8)
    return decoded[: frame.n_chips * frame.plan.lam : frame.plan.lam].reshape(-1)
