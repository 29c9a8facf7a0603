"""Symbol-level simulator and codec for pilot/data-chip backscatter.

A tag piggybacks its bits on an ambient 802.11b, 802.11g, 802.15.4 or BLE
packet by translating selected carrier symbols. Each data chip starts with
pilot symbols the tag leaves alone, so one receiver can recover both the
tag bits and the original (productive) payload.
"""

from ._accel import BACKEND
from .channel import ChannelConfig, ChannelState, GEParams, delivery_probability, rssi_at, transmit
from .chipplan import ChipPlan, Mode, RateReport, account_rates, plan_for_mode
from .ofdm import CoderState, OfdmSymbol, ofdm_symbol_map, ofdm_symbol_unmap
from .protocols import (
    PROFILES,
    CapacityExceeded,
    Frame,
    ProtocolId,
    ProtocolProfile,
    ProtocolViolation,
    Region,
    build_frame,
    get_profile,
)
from .receiver import DecodeResult, DecodingWindow, decode_freerider, decode_with_pilots
from .tag import freerider_modulate, modulate

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ChannelConfig", "ChannelState", "GEParams", "delivery_probability", "rssi_at", "transmit",
    "ChipPlan", "Mode", "RateReport", "account_rates", "plan_for_mode",
    "CoderState", "OfdmSymbol", "ofdm_symbol_map", "ofdm_symbol_unmap",
    "PROFILES", "CapacityExceeded", "Frame", "ProtocolId", "ProtocolProfile", "ProtocolViolation", "Region",
    "build_frame", "get_profile",
    "DecodeResult", "DecodingWindow", "decode_freerider", "decode_with_pilots",
    "freerider_modulate", "modulate",
]
