"""Data-chip geometry for the three rate modes, and rate accounting."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .protocols import ProtocolId, ProtocolProfile


class Mode(str, enum.Enum):
    MODE1 = "MODE1"
    MODE2 = "MODE2"
    MODE3 = "MODE3"


@dataclass(frozen=True)
class ChipPlan:
    """One data chip: ``lam`` carrier symbols, the first ``pilot_count`` of
    them pilots, the rest split into ``tag_bits_per_chip`` groups of
    ``group_size`` data symbols each."""

    lam: int
    pilot_count: int
    tag_bits_per_chip: int
    mode: Mode
    group_size: int

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 1 <= self.pilot_count < self.lam:
            raise ValueError(f"pilot_count must satisfy 1 <= pilot_count < lambda, got {self.pilot_count}/{self.lam}")
        self._check_geometry()
        if self.mode is Mode.MODE1 and self.tag_bits_per_chip != 1:
            raise ValueError("MODE1 carries exactly one tag bit per chip")
        if self.mode is Mode.MODE2 and self.tag_bits_per_chip != 3:
            raise ValueError("MODE2 carries exactly three tag bits per chip")
        if self.mode is Mode.MODE3 and self.pilot_count != 1:
            raise ValueError("MODE3 uses a single pilot symbol")

    def _check_geometry(self):
        if self.group_size < 1 or self.tag_bits_per_chip < 1:
            raise ValueError("group_size and tag_bits_per_chip must be positive")
        if self.lam - self.pilot_count != self.tag_bits_per_chip * self.group_size:
            raise ValueError(
                f"data symbols per chip ({self.lam - self.pilot_count}) != tag_bits_per_chip x group_size "
                f"({self.tag_bits_per_chip} x {self.group_size})"
            )

    @classmethod
    def unchecked(cls, lam: int, pilot_count: int, tag_bits_per_chip: int, mode: Mode, group_size: int) -> ChipPlan:
        """A plan that skips the pilot and mode rules (``pilot_count`` may be 0).

        Only the data-geometry identity is enforced. Used for the pilot-less
        baseline modulation.
        """
        plan = object.__new__(cls)
        for name, value in zip(
            ("lam", "pilot_count", "tag_bits_per_chip", "mode", "group_size"),
            (lam, pilot_count, tag_bits_per_chip, Mode(mode), group_size),
        ):
            object.__setattr__(plan, name, value)
        plan._check_geometry()
        return plan

    @property
    def data_count(self) -> int:
        return self.lam - self.pilot_count

    def chips_for(self, payload_symbols: int) -> int:
        return payload_symbols // self.lam

    def tag_bits_for(self, payload_symbols: int) -> int:
        return self.chips_for(payload_symbols) * self.tag_bits_per_chip


@dataclass(frozen=True)
class RateReport:
    tag_rate: float  # kbps
    productive_rate: float  # kbps

    @property
    def aggregate_rate(self) -> float:
        return self.tag_rate + self.productive_rate


def default_group_size(mode: Mode, profile: ProtocolProfile) -> int:
    # A lone complemented OFDM symbol does not Viterbi-decode to a complemented
    # bit block, so OFDM tag bits always span at least two symbols.
    if Mode(mode) is Mode.MODE3 and profile.protocol_id is ProtocolId.WIFI_G:
        return 2
    return 1


def plan_for_mode(
    mode: Mode | str,
    profile: ProtocolProfile,
    payload_symbols: int,
    lam: int | None = None,
    pilot_count: int | None = None,
    group_size: int | None = None,
) -> ChipPlan:
    """Chip geometry for ``mode`` on ``payload_symbols`` carrier symbols.

    MODE1 uses the protocol's default lambda split in half. MODE2 keeps the
    MODE1 pilot block and hangs three MODE1-sized data blocks after it, each
    carrying one tag bit. MODE3 turns the whole payload into one chip behind a
    single pilot symbol.
    """
    mode = Mode(mode)
    if payload_symbols < 2:
        raise ValueError(f"payload_symbols must be at least 2, got {payload_symbols}")

    if mode is Mode.MODE3:
        g = group_size or default_group_size(mode, profile)
        tag_bits = (payload_symbols - 1) // g
        if tag_bits < 1:
            raise ValueError(f"{payload_symbols} payload symbols cannot hold a MODE3 chip with group size {g}")
        return ChipPlan(1 + tag_bits * g, 1, tag_bits, mode, g)

    base_lam = lam or profile.default_lambda
    pilot = pilot_count if pilot_count is not None else max(1, base_lam // 2)
    data = base_lam - pilot
    if mode is Mode.MODE1:
        g = group_size or data
        plan = ChipPlan(pilot + g, pilot, 1, mode, g)
    else:
        g = group_size or data
        plan = ChipPlan(pilot + 3 * g, pilot, 3, mode, g)
    if plan.lam > payload_symbols:
        raise ValueError(f"{mode.value} chip of {plan.lam} symbols does not fit in {payload_symbols} payload symbols")
    return plan


def account_rates(
    plan: ChipPlan,
    profile: ProtocolProfile,
    received_packets: int,
    interval: float,
    payload_symbols: int,
    productive_bits_per_chip: int | None = None,
) -> RateReport:
    """Tag and productive rates in kbps for ``received_packets`` over ``interval`` seconds.

    Each chip delivers its tag bits and one productive symbol group
    (``data_bits_per_symbol`` bits unless ``productive_bits_per_chip`` says
    otherwise); preamble and filler symbols deliver nothing.
    """
    if interval <= 0:
        raise ValueError(f"interval must be positive, got {interval}")
    chips = plan.chips_for(payload_symbols)
    per_chip = profile.data_bits_per_symbol if productive_bits_per_chip is None else productive_bits_per_chip
    tag = received_packets * chips * plan.tag_bits_per_chip / interval / 1e3
    productive = received_packets * chips * per_chip / interval / 1e3
    return RateReport(tag, productive)
