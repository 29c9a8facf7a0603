"""Tag-to-receiver link: log-distance RSSI, a logistic delivery ramp above
the noise floor, and Gilbert-Elliott bursty symbol errors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .protocols import Frame

ANCHOR_DISTANCE_M = 28.0
ANCHOR_RSSI_DBM = -86.0
DEFAULT_EXPONENT = 2.5


def reference_for_anchor(
    distance: float = ANCHOR_DISTANCE_M, rssi: float = ANCHOR_RSSI_DBM, exponent: float = DEFAULT_EXPONENT
) -> float:
    """The 1 m reference RSSI that puts ``rssi`` at ``distance``."""
    return rssi + 10.0 * exponent * math.log10(distance)


@dataclass(frozen=True)
class GEParams:
    p_good_to_bad: float = 0.0
    p_bad_to_good: float = 1.0
    err_rate_good: float = 0.0
    err_rate_bad: float = 0.0

    def __post_init__(self):
        for name in ("p_good_to_bad", "p_bad_to_good", "err_rate_good", "err_rate_bad"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability, got {value}")
        if self.err_rate_bad < self.err_rate_good:
            raise ValueError("err_rate_bad must be >= err_rate_good")

    @property
    def stationary_bad(self) -> float:
        total = self.p_good_to_bad + self.p_bad_to_good
        return self.p_good_to_bad / total if total else 0.0

    @property
    def mean_error_rate(self) -> float:
        pb = self.stationary_bad
        return pb * self.err_rate_bad + (1 - pb) * self.err_rate_good


# Named error profiles used by the examples and acceptance checks.
CALIBRATION_PROFILES: dict[str, GEParams] = {
    # short bursts (mean bad dwell 2 symbols), about 3% symbol errors
    "bursty_3pct": GEParams(0.0316, 0.5, 0.0, 0.5),
    # rare, short bursts, about 0.01% symbol errors
    "low_error": GEParams(0.0002, 0.5, 0.0, 0.25),
}


@dataclass(frozen=True)
class ChannelConfig:
    """Link parameters.

    Delivery probability above the floor is
    ``1 / (1 + exp((noise_floor + ramp_offset_db - rssi) / ramp_width_db))``.
    Below ``dwell_knee_dbm`` the bad-to-good probability is divided by
    ``1 + (dwell_knee_dbm - rssi) / dwell_slope_db``, so bursts last longer
    as the signal weakens.
    """

    reference_rssi: float = field(default_factory=reference_for_anchor)
    path_loss_exponent: float = DEFAULT_EXPONENT
    noise_floor: float = -95.0
    ge: GEParams = GEParams()
    seed: int = 0
    ramp_offset_db: float = 15.0
    ramp_width_db: float = 3.0
    dwell_knee_dbm: float = -70.0
    dwell_slope_db: float = 10.0

    def __post_init__(self):
        if self.ramp_width_db <= 0:
            raise ValueError("ramp_width_db must be positive")
        if self.dwell_slope_db <= 0:
            raise ValueError("dwell_slope_db must be positive")


@dataclass
class ChannelState:
    bad: bool
    rng: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> ChannelState:
        return cls(False, np.random.default_rng(seed))


def rssi_at(config: ChannelConfig, distance: float) -> float:
    if not distance > 0:
        raise ValueError(f"distance must be positive, got {distance}")
    return config.reference_rssi - 10.0 * config.path_loss_exponent * math.log10(distance)


def delivery_probability(config: ChannelConfig, rssi: float) -> float:
    if rssi <= config.noise_floor:
        return 0.0
    z = (config.noise_floor + config.ramp_offset_db - rssi) / config.ramp_width_db
    if z > 700:
        return 0.0
    return min(1.0, max(0.0, 1.0 / (1.0 + math.exp(z))))


def effective_ge(config: ChannelConfig, rssi: float | None) -> GEParams:
    if rssi is None or rssi >= config.dwell_knee_dbm:
        return config.ge
    stretch = 1.0 + (config.dwell_knee_dbm - rssi) / config.dwell_slope_db
    ge = config.ge
    return GEParams(ge.p_good_to_bad, ge.p_bad_to_good / stretch, ge.err_rate_good, ge.err_rate_bad)


def error_pattern(
    state: ChannelState, config: ChannelConfig, n_symbols: int, width: int = 1, rssi: float | None = None
) -> np.ndarray:
    """``(n_symbols, width)`` flip mask; advances ``state`` by ``n_symbols`` steps.

    The Markov chain steps once per symbol; every unit of a symbol (bit,
    coded bit, chip) then flips independently at that state's error rate.
    """
    if n_symbols == 0:
        return np.zeros((0, width), dtype=np.uint8)
    ge = effective_ge(config, rssi)
    u = state.rng.random(n_symbols)
    states = kernels.ge_states(u, ge.p_good_to_bad, ge.p_bad_to_good, int(state.bad))
    if states[-1]:
        state.bad = not (u[-1] < ge.p_bad_to_good)
    else:
        state.bad = bool(u[-1] < ge.p_good_to_bad)
    rates = np.where(states == 1, ge.err_rate_bad, ge.err_rate_good)
    return (state.rng.random((n_symbols, width)) < rates[:, None]).astype(np.uint8)


def transmit(
    frame: Frame, state: ChannelState, config: ChannelConfig, distance: float, delivery_u: float | None = None
) -> tuple[Frame | None, float]:
    """Send one frame; returns ``(received_frame, rssi)`` or ``(None, rssi)`` when lost.

    The frame is delivered when a uniform draw falls below the delivery
    probability. ``delivery_u`` supplies that draw from outside (for common
    random numbers across distances); otherwise it comes from ``state``.
    Only payload symbols are corrupted; the preamble is assumed acquired.
    """
    rssi = rssi_at(config, distance)
    p = delivery_probability(config, rssi)
    u = state.rng.random() if delivery_u is None else delivery_u
    if p <= 0.0 or u >= p:
        return None, rssi
    flips = error_pattern(state, config, frame.n_payload, frame.units.shape[1], rssi)
    units = frame.units.copy()
    units[frame.n_preamble :] ^= flips
    return frame.with_units(units), rssi
