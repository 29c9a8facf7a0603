import dataclasses
import io
import json

import numpy as np
import pytest

from pilotscatter.channel import CALIBRATION_PROFILES, ChannelConfig
from pilotscatter.chipplan import Mode
from pilotscatter.harness import (
    CSV_HEADER,
    LinkMetrics,
    Scenario,
    ScenarioError,
    audit_transcript,
    emit_csv,
    load_scenario,
    parse_scenario,
    point_seed,
    read_csv,
    run_scenario,
    run_tradeoff_report,
)
from pilotscatter.harness.cli import main
from pilotscatter.protocols import ProtocolId

HEADER = (
    "protocol,mode,distance_m,rssi_dbm,packets_sent,packets_received,tag_ber,"
    "tag_throughput_kbps,productive_throughput_kbps,aggregate_throughput_kbps,seed"
)

BASIC = """
[scenario]
protocol = wifi_g
mode = MODE1
distances = 1, 10, 30   # metres
packets_per_point = 20
payload_symbols = 48
seed = 4

[channel]
ge_profile = bursty_3pct
err_rate_bad = 0.2
"""


class TestScenarioFormat:
    def test_parse(self):
        s = parse_scenario(BASIC)
        assert s.protocol is ProtocolId.WIFI_G and s.mode is Mode.MODE1
        assert s.distances == (1.0, 10.0, 30.0)
        assert s.channel.ge.p_good_to_bad == CALIBRATION_PROFILES["bursty_3pct"].p_good_to_bad
        assert s.channel.ge.err_rate_bad == 0.2
        assert s.channel.reference_rssi == pytest.approx(ChannelConfig().reference_rssi)
        assert s.plan().lam == 4

    def test_overrides(self):
        s = parse_scenario(
            BASIC
            + "[plan]\nlambda = 8\npilot_count = 3\nproductive_bits_per_chip = 1\n"
            + "[profile]\npacket_rate = 100\n[receiver]\nwindow_start = 3\nwindow_length = 11\n"
            + "[tag]\nzigbee_onset_max_chips = 4\n"
        )
        assert (s.plan().lam, s.plan().pilot_count) == (8, 3)
        assert s.profile().packet_rate == 100.0
        assert (s.window.start_bit, s.window.length) == (3, 11)
        assert s.onset_max_chips == 4 and s.productive_bits_per_chip == 1

    def test_reference_rssi_direct(self):
        s = parse_scenario(BASIC + "reference_rssi = -30\npath_loss_exponent = 3\n")
        assert s.channel.reference_rssi == -30.0 and s.channel.path_loss_exponent == 3.0

    @pytest.mark.parametrize(
        "text,field",
        [
            (BASIC.replace("wifi_g", "lora"), "[scenario] protocol"),
            (BASIC.replace("MODE1", "MODE9"), "[scenario] mode"),
            (BASIC.replace("1, 10, 30", "10, 1"), "[scenario] distances"),
            (BASIC.replace("1, 10, 30", "0, 1"), "[scenario] distances"),
            (BASIC.replace("= 20", "= 0"), "[scenario] packets_per_point"),
            (BASIC.replace("= 20", "= many"), "[scenario] packets_per_point"),
            (BASIC + "colour = red\n", "[channel] colour"),
            (BASIC + "[extras]\na = 1\n", "[extras]"),
            (BASIC.replace("bursty_3pct", "stormy"), "[channel] ge_profile"),
            (BASIC.replace("err_rate_bad = 0.2", "err_rate_bad = 1.5"), "[channel]"),
            ("[scenario]\nprotocol = BLE\nmode = MODE1\n", "[scenario] distances"),
            ("[channel]\nnoise_floor = -90\n", "[scenario]"),
            (BASIC + "[plan]\nlambda = 2\npilot_count = 2\n", "[plan]"),
        ],
    )
    def test_errors_name_the_field(self, text, field):
        with pytest.raises(ScenarioError) as info:
            parse_scenario(text)
        assert field in str(info.value)

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError) as info:
            load_scenario(tmp_path / "nope.ini")
        assert "nope.ini" in str(info.value)

    def test_shipped_scenarios_parse(self):
        from pathlib import Path

        files = sorted((Path(__file__).parent.parent / "scenarios").glob("*.ini"))
        assert files
        for path in files:
            load_scenario(path)


def small(**kw):
    base = dict(
        protocol="WIFI_B", mode="MODE1", distances=(1.0, 15.0, 30.0), packets_per_point=30,
        payload_symbols=256, channel=ChannelConfig(ge=CALIBRATION_PROFILES["bursty_3pct"]), seed=9,
    )
    base.update(kw)
    return Scenario(**base)


class TestRunner:
    def test_one_row_per_distance(self):
        rows = run_scenario(small())
        assert [r.distance_m for r in rows] == [1.0, 15.0, 30.0]
        for r in rows:
            assert 0 <= r.tag_ber <= 1 and r.packets_received <= r.packets_sent
            assert min(r.tag_throughput_kbps, r.productive_throughput_kbps) >= 0
            assert r.aggregate_throughput_kbps == r.tag_throughput_kbps + r.productive_throughput_kbps

    def test_deterministic_and_worker_independent(self):
        a = run_scenario(small())
        b = run_scenario(small(workers=3))
        assert a == b
        assert run_scenario(small(seed=10)) != a

    def test_point_seed(self):
        assert [point_seed(12, i) for i in range(4)] == [12, 13, 14, 15]

    def test_beyond_range(self):
        rows = run_scenario(small(distances=(500.0, 900.0)))
        for r in rows:
            assert r.packets_received == 0 and r.tag_throughput_kbps == 0 and r.productive_throughput_kbps == 0

    def test_clean_channel_rates(self):
        s = small(protocol="BLE", payload_symbols=296, lam=24, distances=(0.1,), packets_per_point=70,
                  channel=ChannelConfig(noise_floor=-300.0))
        (row,) = run_scenario(s)
        assert row.packets_received == 70 and row.tag_ber == 0.0
        assert row.tag_throughput_kbps == pytest.approx(0.84)

    def test_goodput_vs_raw(self):
        good = run_scenario(small(distances=(1.0,)))[0]
        raw = run_scenario(small(distances=(1.0,), count_raw=True))[0]
        assert raw.packets_received == good.packets_received
        assert raw.tag_throughput_kbps >= good.tag_throughput_kbps
        assert raw.productive_throughput_kbps >= good.productive_throughput_kbps

    def test_delivery_monotone_in_distance(self):
        s = small(distances=tuple(np.linspace(1, 40, 14)), packets_per_point=1000, payload_symbols=32)
        received = [r.packets_received for r in run_scenario(s)]
        assert all(b <= a for a, b in zip(received, received[1:]))

    def test_transcript_audit(self, tmp_path):
        path = tmp_path / "t.jsonl"
        with open(path, "w") as fh:
            rows = run_scenario(small(), fh)
        lines = audit_transcript(path)
        assert len(lines) == len(rows) and all(line.ok for line in lines)
        assert [line.reported_ber for line in lines] == [r.tag_ber for r in rows]

    def test_audit_detects_tampering(self, tmp_path):
        buf = io.StringIO()
        run_scenario(small(distances=(1.0,)), buf)
        records = [json.loads(x) for x in buf.getvalue().splitlines()]
        records[-1]["tag_ber"] += 0.01
        path = tmp_path / "bad.jsonl"
        path.write_text("".join(json.dumps(r) + "\n" for r in records))
        assert not audit_transcript(path)[0].ok

    def test_tradeoff_report(self):
        s = small(protocol="WIFI_G", payload_symbols=96)
        rows = run_tradeoff_report(s)
        assert [r.mode for r in rows] == ["MODE1", "MODE2", "MODE3"]
        assert rows[1].tag_ratio_vs_mode1 == pytest.approx(1.5)
        assert rows[1].productive_ratio_vs_mode1 == pytest.approx(0.5)
        assert rows[0].tag_rate_kbps < rows[1].tag_rate_kbps < rows[2].tag_rate_kbps
        assert rows[0].aggregate_rate_kbps == rows[0].tag_rate_kbps + rows[0].productive_rate_kbps
        assert rows[0].reference_tag_kbps == 35.2
        mode3 = run_tradeoff_report(dataclasses.replace(s, productive_bits_per_chip=1))[2]
        assert mode3.productive_rate_kbps == pytest.approx(0.5)


class TestCsv:
    def test_header(self, tmp_path):
        path = tmp_path / "x.csv"
        emit_csv([], path)
        assert path.read_text() == HEADER + "\n"
        assert ",".join(CSV_HEADER) == HEADER

    def test_one_row_two_lines(self, tmp_path):
        path = tmp_path / "x.csv"
        emit_csv([LinkMetrics("BLE", "MODE1", 1.0, -50.0, 10, 9, 0.0, 1.0, 2.0, 3.0, 1)], path)
        assert len(path.read_text().splitlines()) == 2

    def test_round_trip(self, tmp_path):
        rows = run_scenario(small())
        path = tmp_path / "x.csv"
        emit_csv(rows, path)
        assert read_csv(path) == rows

    def test_io_error_names_path(self, tmp_path):
        with pytest.raises(OSError) as info:
            emit_csv([], tmp_path / "missing" / "x.csv")
        assert "missing" in str(info.value)


class TestCli:
    def _scenario(self, tmp_path):
        path = tmp_path / "s.ini"
        path.write_text(BASIC)
        return path

    def test_run_deterministic(self, tmp_path):
        s = self._scenario(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["run", "--scenario", str(s), "--out", str(a)]) == 0
        assert main(["run", "--scenario", str(s), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().splitlines()[0] == HEADER

    def test_run_overrides(self, tmp_path):
        s = self._scenario(tmp_path)
        out = tmp_path / "o.csv"
        assert main(["run", "--scenario", str(s), "--out", str(out), "--seed", "3", "--protocol", "zigbee",
                     "--mode", "MODE2", "--count-raw"]) == 0
        rows = read_csv(out)
        assert {(r.protocol, r.mode, r.seed) for r in rows} == {("ZIGBEE", "MODE2", 3)}

    def test_run_and_audit(self, tmp_path, capsys):
        s = self._scenario(tmp_path)
        t = tmp_path / "t.jsonl"
        assert main(["run", "--scenario", str(s), "--out", str(tmp_path / "o.csv"), "--transcript", str(t)]) == 0
        assert main(["audit", "--transcript", str(t)]) == 0
        assert "3/3 points consistent" in capsys.readouterr().out

    def test_tradeoff(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main(["tradeoff", "--scenario", str(self._scenario(tmp_path)), "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 4

    def test_bad_scenario_reports_field(self, tmp_path, capsys):
        path = tmp_path / "s.ini"
        path.write_text(BASIC.replace("= 20", "= -2"))
        assert main(["run", "--scenario", str(path), "--out", str(tmp_path / "o.csv")]) == 2
        assert "packets_per_point" in capsys.readouterr().err

    def test_bad_protocol_flag(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["run", "--scenario", "x", "--out", "y", "--protocol", "LORA"])
