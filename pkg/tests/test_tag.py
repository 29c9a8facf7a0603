import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pilotscatter.chipplan import ChipPlan, Mode, plan_for_mode
from pilotscatter.protocols import ProtocolId, Region, build_frame, get_profile
from pilotscatter.tag import TagAction, freerider_frame, freerider_modulate, freerider_plan, modulate, tag_actions


def make(pid, mode, payload, rng):
    profile = get_profile(pid)
    plan = plan_for_mode(mode, profile, payload)
    bits = rng.integers(0, 2, plan.chips_for(payload) * profile.data_bits_per_symbol)
    return build_frame(profile, bits, plan, payload), plan


def test_all_zero_bits_identity(rng):
    for pid in ProtocolId:
        frame, plan = make(pid, Mode.MODE1, 48, rng)
        out = modulate(frame, plan, np.zeros(plan.tag_bits_for(48), np.uint8))
        assert out.same_content(frame)
        assert out.shifted and not frame.shifted


def test_wifi_b_example():
    plan = ChipPlan(16, 8, 1, Mode.MODE1, 8)
    frame = build_frame(get_profile("WIFI_B"), [0], plan)
    out = modulate(frame, plan, [1])
    assert out.payload_units[:, 0].tolist() == [0] * 8 + [1] * 8
    assert np.array_equal(out.units[:192], frame.units[:192])


def test_wifi_g_example(rng):
    profile = get_profile("WIFI_G")
    plan = plan_for_mode(Mode.MODE1, profile, 4)
    frame = build_frame(profile, rng.integers(0, 2, 24), plan)
    out = modulate(frame, plan, [1])
    assert np.array_equal(out.payload_units[:2], frame.payload_units[:2])
    assert np.array_equal(out.payload_units[2:], frame.payload_units[2:] ^ 1)
    assert np.array_equal(out.tail, frame.tail)


def test_zigbee_keeps_first_chip(rng):
    frame, plan = make(ProtocolId.ZIGBEE, Mode.MODE1, 6, rng)
    out = modulate(frame, plan, [1])
    data = slice(frame.n_preamble + 3, None)
    assert np.array_equal(out.units[data, 0], frame.units[data, 0])
    assert np.array_equal(out.units[data, 1:], frame.units[data, 1:] ^ 1)


def test_zigbee_onset_jitter_only_on_run_starts(rng):
    frame, plan = make(ProtocolId.ZIGBEE, Mode.MODE1, 120, rng)
    bits = np.ones(plan.tag_bits_for(120), np.uint8)
    out = modulate(frame, plan, bits, np.random.default_rng(1), onset_max_chips=32)
    payload = frame.n_preamble
    for chip in range(frame.n_chips):
        first, rest = payload + chip * 6 + 3, slice(payload + chip * 6 + 4, payload + chip * 6 + 6)
        assert np.array_equal(out.units[rest, 1:], frame.units[rest, 1:] ^ 1)
        kept = np.flatnonzero(out.units[first] == frame.units[first])
        assert kept.size >= 1 and kept.tolist() == list(range(kept.size))


def test_length_mismatch(rng):
    frame, plan = make(ProtocolId.WIFI_B, Mode.MODE1, 64, rng)
    with pytest.raises(ValueError):
        modulate(frame, plan, np.ones(3, np.uint8))
    with pytest.raises(ValueError):
        modulate(frame, plan, np.full(4, 2, np.uint8))


def test_actions_layout():
    plan = ChipPlan(8, 2, 3, Mode.MODE2, 2)
    actions = tag_actions(plan, 1, 10, [1, 0, 1])
    assert actions.tolist() == [0, 0, 1, 1, 0, 0, 1, 1, 0, 0]
    assert TagAction(actions[2]) is TagAction.TRANSLATE


@settings(max_examples=60)
@given(st.sampled_from(list(ProtocolId)), st.sampled_from(list(Mode)), st.integers(0, 2**32 - 1))
def test_pilots_immutable_and_involution(pid, mode, seed):
    rng = np.random.default_rng(seed)
    frame, plan = make(pid, mode, 72, rng)
    bits = rng.integers(0, 2, plan.tag_bits_for(72)).astype(np.uint8)
    out = modulate(frame, plan, bits)
    keep = frame.regions != Region.DATA
    assert np.array_equal(out.units[keep], frame.units[keep])
    assert modulate(out, plan, bits).same_content(frame)
    changed = np.flatnonzero((out.payload_units != frame.payload_units).any(axis=1))
    assert changed.size == int(bits.sum()) * plan.group_size


def test_freerider_equals_pilotless_plan(rng):
    for pid in ProtocolId:
        profile = get_profile(pid)
        frame = freerider_frame(profile, rng.integers(0, 2, 30 * profile.data_bits_per_symbol))
        assert np.all(frame.payload_regions == Region.DATA)
        bits = rng.integers(0, 2, 15)
        a = freerider_modulate(frame, bits, group_size=2)
        b = modulate(frame, freerider_plan(30, 2), bits, n_chips=1)
        assert a.same_content(b)


def test_freerider_identity_and_single_bit():
    frame = freerider_frame(get_profile("WIFI_B"), [1])
    assert freerider_modulate(frame, [0]).same_content(frame)
    assert freerider_modulate(frame, [1]).payload_units.tolist() == [[0]]
    with pytest.raises(ValueError):
        freerider_modulate(frame, [1, 1])
