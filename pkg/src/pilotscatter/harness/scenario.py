"""Scenario files: INI-style ``[section]`` headers with ``key = value`` lines.

See ``docs/scenario_format.md`` for the full grammar. Every validation error
names the offending ``[section] key``.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ..channel import CALIBRATION_PROFILES, DEFAULT_EXPONENT, ChannelConfig, GEParams, reference_for_anchor
from ..chipplan import ChipPlan, Mode, plan_for_mode
from ..protocols import ProtocolId, ProtocolProfile, get_profile
from ..receiver import DecodingWindow


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    protocol: ProtocolId
    mode: Mode
    distances: tuple[float, ...]
    packets_per_point: int = 1000
    payload_symbols: int | None = None
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    seed: int = 0
    lam: int | None = None
    pilot_count: int | None = None
    group_size: int | None = None
    mode3_group_size: int | None = None
    productive_bits_per_chip: int | None = None
    profile_overrides: tuple[tuple[str, float], ...] = ()
    window: DecodingWindow = DecodingWindow()
    onset_max_chips: int = 1
    count_raw: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "protocol", ProtocolId(self.protocol))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "distances", tuple(float(d) for d in self.distances))
        if self.packets_per_point < 1:
            raise ScenarioError("[scenario] packets_per_point: must be >= 1")
        if not self.distances:
            raise ScenarioError("[scenario] distances: at least one distance is required")
        if any(d <= 0 for d in self.distances):
            raise ScenarioError("[scenario] distances: must be positive")
        if any(b <= a for a, b in zip(self.distances, self.distances[1:])):
            raise ScenarioError("[scenario] distances: must be strictly increasing")
        if self.workers < 1:
            raise ScenarioError("[scenario] workers: must be >= 1")
        if self.onset_max_chips < 1 or self.onset_max_chips > 32:
            raise ScenarioError("[tag] zigbee_onset_max_chips: must be in 1..32")

    def profile(self) -> ProtocolProfile:
        return get_profile(self.protocol).replace(**dict(self.profile_overrides))

    @property
    def n_payload(self) -> int:
        return self.payload_symbols if self.payload_symbols is not None else self.profile().max_payload_symbols

    def plan(self) -> ChipPlan:
        group = self.mode3_group_size if self.mode is Mode.MODE3 else self.group_size
        try:
            return plan_for_mode(self.mode, self.profile(), self.n_payload, self.lam, self.pilot_count, group)
        except ValueError as exc:
            raise ScenarioError(f"[plan] {exc}") from exc

    def replace(self, **changes) -> Scenario:
        return dataclasses.replace(self, **changes)


_SCENARIO_KEYS = {
    "protocol", "mode", "distances", "packets_per_point", "payload_symbols", "seed", "count_raw", "workers",
}
_CHANNEL_KEYS = {
    "ge_profile", "reference_rssi", "anchor_distance", "anchor_rssi", "path_loss_exponent", "noise_floor",
    "p_good_to_bad", "p_bad_to_good", "err_rate_good", "err_rate_bad",
    "ramp_offset_db", "ramp_width_db", "dwell_knee_dbm", "dwell_slope_db",
}
_PLAN_KEYS = {"lambda", "pilot_count", "group_size", "mode3_group_size", "productive_bits_per_chip"}
_PROFILE_KEYS = {"packet_rate": float, "max_payload_symbols": int, "default_lambda": int}
_TAG_KEYS = {"zigbee_onset_max_chips"}
_RECEIVER_KEYS = {"window_start", "window_length"}
_SECTIONS = {
    "scenario": _SCENARIO_KEYS,
    "channel": _CHANNEL_KEYS,
    "plan": _PLAN_KEYS,
    "profile": set(_PROFILE_KEYS),
    "tag": _TAG_KEYS,
    "receiver": _RECEIVER_KEYS,
}


def _get(cfg, section, key, conv, default=None):
    if not cfg.has_option(section, key):
        return default
    raw = cfg.get(section, key).strip()
    if raw == "":
        return default
    try:
        return conv(raw)
    except ValueError as exc:
        raise ScenarioError(f"[{section}] {key}: cannot parse {raw!r} ({exc})") from None


def _bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(x) for x in raw.replace(",", " ").split())


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    cfg = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        cfg.read_string(text, source=source)
    except configparser.Error as exc:
        raise ScenarioError(f"{source}: {exc}") from None
    for section in cfg.sections():
        if section not in _SECTIONS:
            raise ScenarioError(f"[{section}]: unknown section")
        unknown = set(cfg.options(section)) - _SECTIONS[section]
        if unknown:
            raise ScenarioError(f"[{section}] {sorted(unknown)[0]}: unknown key")
    if not cfg.has_section("scenario"):
        raise ScenarioError("[scenario]: section is required")
    for key in ("protocol", "mode", "distances"):
        if not cfg.has_option("scenario", key):
            raise ScenarioError(f"[scenario] {key}: required")

    exponent = _get(cfg, "channel", "path_loss_exponent", float, DEFAULT_EXPONENT)
    reference = _get(cfg, "channel", "reference_rssi", float)
    if reference is None:
        reference = reference_for_anchor(
            _get(cfg, "channel", "anchor_distance", float, 28.0),
            _get(cfg, "channel", "anchor_rssi", float, -86.0),
            exponent,
        )
    seed = _get(cfg, "scenario", "seed", int, 0)
    defaults = ChannelConfig()
    base_ge = GEParams()
    profile_name = _get(cfg, "channel", "ge_profile", str)
    if profile_name is not None:
        if profile_name not in CALIBRATION_PROFILES:
            raise ScenarioError(f"[channel] ge_profile: expected one of {sorted(CALIBRATION_PROFILES)}")
        base_ge = CALIBRATION_PROFILES[profile_name]
    try:
        ge = GEParams(
            _get(cfg, "channel", "p_good_to_bad", float, base_ge.p_good_to_bad),
            _get(cfg, "channel", "p_bad_to_good", float, base_ge.p_bad_to_good),
            _get(cfg, "channel", "err_rate_good", float, base_ge.err_rate_good),
            _get(cfg, "channel", "err_rate_bad", float, base_ge.err_rate_bad),
        )
        channel = ChannelConfig(
            reference_rssi=reference,
            path_loss_exponent=exponent,
            noise_floor=_get(cfg, "channel", "noise_floor", float, defaults.noise_floor),
            ge=ge,
            seed=seed,
            ramp_offset_db=_get(cfg, "channel", "ramp_offset_db", float, defaults.ramp_offset_db),
            ramp_width_db=_get(cfg, "channel", "ramp_width_db", float, defaults.ramp_width_db),
            dwell_knee_dbm=_get(cfg, "channel", "dwell_knee_dbm", float, defaults.dwell_knee_dbm),
            dwell_slope_db=_get(cfg, "channel", "dwell_slope_db", float, defaults.dwell_slope_db),
        )
    except ValueError as exc:
        raise ScenarioError(f"[channel] {exc}") from None

    overrides = []
    for key, conv in _PROFILE_KEYS.items():
        value = _get(cfg, "profile", key, conv)
        if value is not None:
            overrides.append((key, value))

    try:
        window = DecodingWindow(
            _get(cfg, "receiver", "window_start", int, 2), _get(cfg, "receiver", "window_length", int, 20)
        )
    except ValueError as exc:
        raise ScenarioError(f"[receiver] window_start/window_length: {exc}") from None

    try:
        protocol = ProtocolId(cfg.get("scenario", "protocol").strip().upper())
    except ValueError:
        raise ScenarioError(f"[scenario] protocol: expected one of {[p.value for p in ProtocolId]}") from None
    try:
        mode = Mode(cfg.get("scenario", "mode").strip().upper())
    except ValueError:
        raise ScenarioError(f"[scenario] mode: expected one of {[m.value for m in Mode]}") from None

    scenario = Scenario(
        protocol=protocol,
        mode=mode,
        distances=_get(cfg, "scenario", "distances", _floats, ()),
        packets_per_point=_get(cfg, "scenario", "packets_per_point", int, 1000),
        payload_symbols=_get(cfg, "scenario", "payload_symbols", int),
        channel=channel,
        seed=seed,
        lam=_get(cfg, "plan", "lambda", int),
        pilot_count=_get(cfg, "plan", "pilot_count", int),
        group_size=_get(cfg, "plan", "group_size", int),
        mode3_group_size=_get(cfg, "plan", "mode3_group_size", int),
        productive_bits_per_chip=_get(cfg, "plan", "productive_bits_per_chip", int),
        profile_overrides=tuple(overrides),
        window=window,
        onset_max_chips=_get(cfg, "tag", "zigbee_onset_max_chips", int, 1),
        count_raw=_get(cfg, "scenario", "count_raw", _bool, False),
        workers=_get(cfg, "scenario", "workers", int, 1),
    )
    scenario.plan()  # surface geometry errors at load time
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror}") from None
    return parse_scenario(text, str(path))
