"""Tag-side codeword translation.

Translation per protocol: WIFI_B and BLE rows are toggled (180 deg phase, or
an f0/f1 swap), WIFI_G rows have all 48 coded bits complemented, and ZIGBEE
rows have their chips complemented except for a leading run that the tag's
switch has not reached yet. That run is one chip by default; the first
symbol of every translated run can be given a random longer run via
``onset_max_chips`` to model a late switch-on.
"""

from __future__ import annotations

import enum

import numpy as np

from .chipplan import ChipPlan, Mode
from .ofdm import CoderState
from .protocols import Frame, ProtocolId, ProtocolProfile, build_frame


class TagAction(enum.IntEnum):
    PASS = 0
    TRANSLATE = 1


def _bits(tag_bits) -> np.ndarray:
    bits = np.asarray(tag_bits, dtype=np.uint8).reshape(-1)
    if np.any(bits > 1):
        raise ValueError("tag bits must be 0 or 1")
    return bits


def tag_actions(plan: ChipPlan, n_chips: int, n_payload: int, tag_bits) -> np.ndarray:
    """Per-payload-symbol :class:`TagAction` codes for the given tag bits."""
    bits = _bits(tag_bits)
    expected = n_chips * plan.tag_bits_per_chip
    if bits.size != expected:
        raise ValueError(
            f"expected {expected} tag bits ({n_chips} chips x {plan.tag_bits_per_chip}), got {bits.size}"
        )
    actions = np.zeros(n_payload, dtype=np.uint8)
    if n_chips == 0:
        return actions
    per_chip = np.zeros((n_chips, plan.lam), dtype=np.uint8)
    data = np.repeat(bits.reshape(n_chips, plan.tag_bits_per_chip), plan.group_size, axis=1)
    per_chip[:, plan.pilot_count :] = data
    actions[: n_chips * plan.lam] = per_chip.reshape(-1)
    return actions


def _translate(
    frame: Frame, actions: np.ndarray, rng: np.random.Generator | None, onset_max_chips: int
) -> Frame:
    units = frame.units.copy()
    start = frame.n_preamble
    idx = np.flatnonzero(actions) + start
    if frame.protocol is ProtocolId.ZIGBEE:
        keep = np.ones(idx.size, dtype=np.int64)
        if onset_max_chips > 1 and idx.size:
            prev = np.concatenate([[0], actions[:-1]])
            onset = (actions == 1) & (prev == 0)
            onset_at = onset[idx - start]
            if rng is None:
                rng = np.random.default_rng(0)
            keep[onset_at] = rng.integers(1, onset_max_chips + 1, size=int(onset_at.sum()))
        mask = np.arange(units.shape[1])[None, :] >= keep[:, None]
        units[idx] ^= mask.astype(np.uint8)
    else:
        units[idx] ^= 1
    return frame.with_units(units, shifted=True)


def modulate(
    frame: Frame,
    plan: ChipPlan,
    tag_bits,
    rng: np.random.Generator | None = None,
    onset_max_chips: int = 1,
    n_chips: int | None = None,
) -> Frame:
    """Embed ``tag_bits`` in the DATA symbols of ``frame``.

    Tag bit ``j`` of chip ``c`` translates the ``group_size`` symbols of its
    data group; a 0 leaves them alone. PREAMBLE and PILOT symbols are never
    touched. The result is marked frequency-shifted.
    """
    n_chips = frame.n_chips if n_chips is None else n_chips
    actions = tag_actions(plan, n_chips, frame.n_payload, tag_bits)
    return _translate(frame, actions, rng, onset_max_chips)


def freerider_plan(n_payload: int, group_size: int = 1) -> ChipPlan:
    """The pilot-less chip covering a whole payload, one tag bit per group."""
    n_groups = n_payload // group_size
    return ChipPlan.unchecked(n_groups * group_size, 0, max(n_groups, 1), Mode.MODE3, group_size)


def freerider_frame(profile: ProtocolProfile, productive_bits, coder: CoderState | None = None) -> Frame:
    """An unspread frame: every productive symbol group sent once, all DATA."""
    return build_frame(profile, productive_bits, ChipPlan.unchecked(1, 0, 1, Mode.MODE3, 1), coder=coder)


def freerider_modulate(
    frame: Frame,
    tag_bits,
    group_size: int = 1,
    rng: np.random.Generator | None = None,
    onset_max_chips: int = 1,
) -> Frame:
    """Baseline translation over the whole payload, with no pilot symbols."""
    bits = _bits(tag_bits)
    n_groups = frame.n_payload // group_size
    if bits.size != n_groups:
        raise ValueError(f"expected one tag bit per {group_size}-symbol group ({n_groups}), got {bits.size}")
    if n_groups == 0:
        return frame.with_units(frame.units.copy(), shifted=True)
    return modulate(frame, freerider_plan(frame.n_payload, group_size), bits, rng, onset_max_chips, n_chips=1)
