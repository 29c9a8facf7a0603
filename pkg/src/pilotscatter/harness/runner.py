"""Packet-level link simulation over a distance sweep."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from ..channel import ChannelState, rssi_at, transmit
from ..chipplan import Mode, account_rates
from ..protocols import ProtocolId, build_frame
from ..receiver import decode_with_pilots
from ..tag import modulate
from .scenario import Scenario


@dataclass(frozen=True)
class LinkMetrics:
    """One CSV row. Field order is the CSV column order."""

    protocol: str
    mode: str
    distance_m: float
    rssi_dbm: float
    packets_sent: int
    packets_received: int
    tag_ber: float
    tag_throughput_kbps: float
    productive_throughput_kbps: float
    aggregate_throughput_kbps: float
    seed: int


@dataclass
class _PointResult:
    metrics: LinkMetrics
    records: list[dict]


def point_seed(seed: int, index: int) -> int:
    """Seed for the ``index``-th distance of a sweep."""
    return seed ^ index


def _simulate_point(scenario: Scenario, index: int, distance: float, keep_records: bool) -> _PointResult:
    profile = scenario.profile()
    plan = scenario.plan()
    n_payload = scenario.n_payload
    n_chips = plan.chips_for(n_payload)
    n_tag = n_chips * plan.tag_bits_per_chip
    n_prod = n_chips * profile.data_bits_per_symbol

    seeds = np.random.SeedSequence(point_seed(scenario.seed, index)).spawn(4)
    traffic, tag_rng, rx_rng = (np.random.default_rng(s) for s in seeds[:3])
    state = ChannelState(False, np.random.default_rng(seeds[3]))
    config = scenario.channel
    # Delivery draws are shared by every distance of the sweep, so the set of
    # delivered packets can only shrink as the link gets weaker.
    delivery = np.random.default_rng(np.random.SeedSequence(scenario.seed, spawn_key=(0xDE11,)))
    delivery_u = delivery.random(scenario.packets_per_point)

    received = ok_packets = 0
    bit_errors = bit_total = 0
    good_tag_bits = 0
    records: list[dict] = []
    rssi = rssi_at(config, distance)
    for k in range(scenario.packets_per_point):
        productive = traffic.integers(0, 2, n_prod, dtype=np.uint8)
        tag_bits = traffic.integers(0, 2, n_tag, dtype=np.uint8)
        frame = build_frame(profile, productive, plan, n_payload)
        sent = modulate(frame, plan, tag_bits, tag_rng, scenario.onset_max_chips)
        rx, rssi = transmit(sent, state, config, distance, float(delivery_u[k]))
        decoded = None
        packet_ok = False
        if rx is not None:
            received += 1
            result = decode_with_pilots(rx, plan, scenario.window, rx_rng)
            decoded = result.tag_bits
            errors = int(np.count_nonzero(decoded != tag_bits))
            bit_errors += errors
            bit_total += n_tag
            packet_ok = result.packet_ok
            if packet_ok:
                ok_packets += 1
                good_tag_bits += n_tag - errors
        if keep_records:
            records.append({
                "kind": "packet",
                "protocol": scenario.protocol.value,
                "mode": scenario.mode.value,
                "distance_m": distance,
                "packet": k,
                "delivered": rx is not None,
                "packet_ok": packet_ok,
                "tag_sent": "".join(map(str, tag_bits.tolist())),
                "tag_decoded": None if decoded is None else "".join(map(str, decoded.tolist())),
            })

    interval = scenario.packets_per_point / profile.packet_rate
    ppc = scenario.productive_bits_per_chip
    if scenario.count_raw:
        rates = account_rates(plan, profile, received, interval, n_payload, ppc)
        tag_kbps, prod_kbps = rates.tag_rate, rates.productive_rate
    else:
        rates = account_rates(plan, profile, ok_packets, interval, n_payload, ppc)
        tag_kbps = good_tag_bits / interval / 1e3
        prod_kbps = rates.productive_rate
    ber = bit_errors / bit_total if bit_total else 0.0
    metrics = LinkMetrics(
        protocol=scenario.protocol.value,
        mode=scenario.mode.value,
        distance_m=float(distance),
        rssi_dbm=float(rssi),
        packets_sent=scenario.packets_per_point,
        packets_received=received,
        tag_ber=ber,
        tag_throughput_kbps=tag_kbps,
        productive_throughput_kbps=prod_kbps,
        aggregate_throughput_kbps=tag_kbps + prod_kbps,
        seed=scenario.seed,
    )
    if keep_records:
        records.append({
            "kind": "point",
            "protocol": metrics.protocol,
            "mode": metrics.mode,
            "distance_m": distance,
            "packets_sent": metrics.packets_sent,
            "packets_received": received,
            "tag_ber": ber,
        })
    return _PointResult(metrics, records)


def run_scenario(scenario: Scenario, transcript: IO[str] | None = None) -> list[LinkMetrics]:
    """Simulate every distance of ``scenario``; one :class:`LinkMetrics` per distance.

    Distance ``i`` draws all its randomness from ``seed ^ i``, so results do
    not depend on ``workers``. With ``transcript`` set, one JSON line is
    written per packet and per distance, in sweep order.
    """
    keep = transcript is not None
    jobs = list(enumerate(scenario.distances))
    if scenario.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=scenario.workers) as pool:
            results = list(pool.map(lambda job: _simulate_point(scenario, job[0], job[1], keep), jobs))
    else:
        results = [_simulate_point(scenario, i, d, keep) for i, d in jobs]
    if transcript is not None:
        for res in results:
            for rec in res.records:
                transcript.write(json.dumps(rec) + "\n")
    return [res.metrics for res in results]


# Published 802.11g prototype measurements, kbps.
REFERENCE_KBPS = {
    (ProtocolId.WIFI_G, Mode.MODE1): (35.2, 38.0),
    (ProtocolId.WIFI_G, Mode.MODE2): (35.2 * 1.478, 38.0 * 0.523),
    (ProtocolId.WIFI_G, Mode.MODE3): (59.5, 0.5),
}


@dataclass(frozen=True)
class TradeoffRow:
    protocol: str
    mode: str
    lam: int
    pilot_count: int
    tag_bits_per_chip: int
    group_size: int
    tag_rate_kbps: float
    productive_rate_kbps: float
    aggregate_rate_kbps: float
    tag_ratio_vs_mode1: float
    productive_ratio_vs_mode1: float
    reference_tag_kbps: float | None
    reference_productive_kbps: float | None


def run_tradeoff_report(scenario: Scenario, modes: Iterable[Mode] = tuple(Mode)) -> list[TradeoffRow]:
    """Ideal (every packet delivered) rates for each mode on the scenario's protocol and payload."""
    profile = scenario.profile()
    rows = []
    base = None
    for mode in modes:
        plan = scenario.replace(mode=mode).plan()
        # one second of traffic at the nominal packet rate
        rates = account_rates(
            plan, profile, profile.packet_rate, 1.0, scenario.n_payload, scenario.productive_bits_per_chip
        )
        if mode is Mode.MODE1:
            base = rates
        ref = REFERENCE_KBPS.get((scenario.protocol, mode), (None, None))
        rows.append(TradeoffRow(
            protocol=scenario.protocol.value,
            mode=mode.value,
            lam=plan.lam,
            pilot_count=plan.pilot_count,
            tag_bits_per_chip=plan.tag_bits_per_chip,
            group_size=plan.group_size,
            tag_rate_kbps=rates.tag_rate,
            productive_rate_kbps=rates.productive_rate,
            aggregate_rate_kbps=rates.aggregate_rate,
            tag_ratio_vs_mode1=rates.tag_rate / base.tag_rate if base and base.tag_rate else float("nan"),
            productive_ratio_vs_mode1=(
                rates.productive_rate / base.productive_rate if base and base.productive_rate else float("nan")
            ),
            reference_tag_kbps=ref[0],
            reference_productive_kbps=ref[1],
        ))
    return rows
