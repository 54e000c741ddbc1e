"""Command-line interface: exit codes, byte-stable output, library equivalence."""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest
from click.testing import CliRunner

from glyscan.cli import main
from glyscan.data import calibration_readings
from glyscan.ingest import JOURNAL_NAME
from glyscan.spectral import (
    FIELD_MODEL,
    FIELD_POLICY,
    SUPPORTED_WAVELENGTHS_NM,
    CalibrationModel,
    CalibrationSample,
    Spectrum,
    classify,
    fit_ols,
    predict,
    rank_channels,
    write_samples_csv,
)

BUNDLED_CSV = (Path(__file__).resolve().parents[1]
               / "src" / "glyscan" / "data" / "calibration_readings.csv")

SCENARIO = {
    "seed": 3,
    "duration_s": 700.0,
    "step_s": 5.0,
    "devices": [
        {"serial": "SG-100", "link_kind": "lorawan", "seed": 11,
         "noise_rel": 0.0, "location": [-31.4, -64.2, 400.0]},
        {"serial": "SG-200", "link_kind": "broker", "seed": 12, "noise_rel": 0.0},
    ],
    "schedule": [
        {"at": 0.0, "action": "start", "device": "SG-100", "concentration": 600.0},
        {"at": 0.0, "action": "start", "device": "SG-200", "concentration": 600.0},
    ],
}


@pytest.fixture
def runner():
    return CliRunner()


def run_cli(runner, args):
    return runner.invoke(main, args, catch_exceptions=False)


def make_samples_csv(path: Path, n: int = 6) -> None:
    samples = []
    for i in range(n):
        refl = {nm: 50.0 + i * 10.0 + (nm % 7) for nm in SUPPORTED_WAVELENGTHS_NM}
        samples.append(CalibrationSample(
            sample_id=f"X{i:02d}",
            concentration=float(i * 120),
            spectrum=Spectrum(refl),
        ))
    path.write_bytes(write_samples_csv(samples))


def scenario_file(tmp_path: Path, doc=None) -> Path:
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc if doc is not None else SCENARIO))
    return path


class TestCalibrate:
    def test_matches_library_fit(self, runner):
        result = run_cli(runner, ["calibrate", str(BUNDLED_CSV),
                                  "--instrument", "field"])
        assert result.exit_code == 0
        got = dict(line.split(": ", 1) for line in result.output.splitlines())
        model = fit_ols(calibration_readings(), 560, instrument="field")
        assert got["instrument"] == "field"
        assert int(got["channel_nm"]) == model.channel_nm
        assert float(got["slope"]) == model.slope
        assert float(got["intercept"]) == model.intercept
        assert float(got["r_squared"]) == model.r_squared
        assert int(got["n_samples"]) == model.n_samples

    def test_json_output_round_trips(self, runner):
        result = run_cli(runner, ["calibrate", str(BUNDLED_CSV), "--json",
                                  "--instrument", "field",
                                  "--candidates", "510,535,560,585,610"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        model = fit_ols(calibration_readings(), 560, instrument="field")
        assert doc["model"] == model.to_dict()
        ranking = rank_channels(calibration_readings(), [510, 535, 560, 585, 610])
        assert [(r["channel_nm"], r["pearson_r"]) for r in doc["ranking"]] \
            == list(ranking.entries)

    def test_out_file_is_loadable_model(self, runner, tmp_path):
        out = tmp_path / "model.json"
        result = run_cli(runner, ["calibrate", str(BUNDLED_CSV),
                                  "--instrument", "field", "--out", str(out)])
        assert result.exit_code == 0
        loaded = CalibrationModel.from_dict(json.loads(out.read_text()))
        assert loaded == fit_ols(calibration_readings(), 560, instrument="field")

    def test_output_is_byte_stable(self, runner):
        args = ["calibrate", str(BUNDLED_CSV), "--candidates", "460,560,585"]
        first = run_cli(runner, args)
        second = run_cli(runner, args)
        assert first.exit_code == second.exit_code == 0
        assert first.output_bytes == second.output_bytes

    def test_too_few_samples_is_usage_error(self, runner, tmp_path):
        csv = tmp_path / "one.csv"
        csv.write_bytes(b"\n".join(BUNDLED_CSV.read_bytes().splitlines()[:2]))
        result = runner.invoke(main, ["calibrate", str(csv)])
        assert result.exit_code == 2
        assert "error:" in result.stderr

    def test_unsupported_candidate_is_usage_error(self, runner):
        result = runner.invoke(main, ["calibrate", str(BUNDLED_CSV),
                                      "--candidates", "999"])
        assert result.exit_code == 2

    def test_garbage_candidate_list_is_usage_error(self, runner):
        result = runner.invoke(main, ["calibrate", str(BUNDLED_CSV),
                                      "--candidates", "a,b"])
        assert result.exit_code == 2

    def test_malformed_csv_is_usage_error(self, runner, tmp_path):
        csv = tmp_path / "bad.csv"
        csv.write_text("not,a,samples,file\n1,2,3,4\n")
        result = runner.invoke(main, ["calibrate", str(csv)])
        assert result.exit_code == 2
        assert "error:" in result.stderr


class TestClassify:
    def test_requires_exactly_one_model_source(self, runner, tmp_path):
        csv = tmp_path / "s.csv"
        make_samples_csv(csv)
        neither = runner.invoke(main, ["classify", str(csv)])
        assert neither.exit_code == 2
        out = tmp_path / "m.json"
        run_cli(runner, ["calibrate", str(BUNDLED_CSV), "--out", str(out)])
        both = runner.invoke(main, ["classify", str(csv), "--model", str(out),
                                    "--instrument", "field"])
        assert both.exit_code == 2

    def test_preset_matches_library(self, runner, tmp_path):
        csv = tmp_path / "s.csv"
        make_samples_csv(csv)
        result = run_cli(runner, ["classify", str(csv), "--instrument", "field"])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0] == "sample_id\tvalue\tcolor"
        from glyscan.spectral import read_samples_csv
        for line, sample in zip(lines[1:], read_samples_csv(csv.read_bytes()),
                                strict=True):
            sid, value, color = line.split("\t")
            want = predict(FIELD_MODEL, sample.spectrum)
            assert sid == sample.sample_id
            assert float(value) == pytest.approx(want, abs=5e-5)
            assert color == classify(FIELD_POLICY, want).label

    def test_model_file_round_trip(self, runner, tmp_path):
        csv = tmp_path / "s.csv"
        make_samples_csv(csv)
        out = tmp_path / "m.json"
        run_cli(runner, ["calibrate", str(csv), "--channel", "585",
                         "--out", str(out)])
        result = run_cli(runner, ["classify", str(csv), "--model", str(out),
                                  "--json"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        model = CalibrationModel.from_dict(json.loads(out.read_text()))
        from glyscan.spectral import read_samples_csv
        for row, sample in zip(doc["rows"], read_samples_csv(csv.read_bytes()),
                               strict=True):
            assert row["value"] == predict(model, sample.spectrum)

    def test_bad_model_file_is_usage_error(self, runner, tmp_path):
        csv = tmp_path / "s.csv"
        make_samples_csv(csv)
        bad = tmp_path / "m.json"
        bad.write_text('{"slope": "wat"}')
        result = runner.invoke(main, ["classify", str(csv), "--model", str(bad)])
        assert result.exit_code == 2

    def test_empty_csv_yields_empty_table(self, runner, tmp_path):
        csv = tmp_path / "empty.csv"
        csv.write_bytes(BUNDLED_CSV.read_bytes().splitlines()[0] + b"\n")
        result = run_cli(runner, ["classify", str(csv), "--instrument", "field"])
        assert result.exit_code == 0
        assert result.output == "sample_id\tvalue\tcolor\n"


class TestGoldenOutputs:
    # frozen from verified runs; any byte drift is a regression
    CALIBRATE_GOLDEN = (
        "instrument: field\n"
        "channel_nm: 560\n"
        "slope: 8.098835659675949\n"
        "intercept: -1318.2455916391948\n"
        "r_squared: 0.9106196140041138\n"
        "n_samples: 12\n"
    )

    def test_calibrate_bundled_data_golden(self, runner):
        result = run_cli(runner, ["calibrate", str(BUNDLED_CSV),
                                  "--instrument", "field"])
        assert result.output == self.CALIBRATE_GOLDEN

    def test_replay_golden_lines(self, runner):
        lines = run_cli(runner, ["replay"]).output.splitlines()
        assert lines[0] == ("PASS calibration.field.slope: "
                            "got 8.098835659675949 want 8.0988 tol=0.0005")
        assert lines[1] == ("PASS calibration.field.intercept: "
                            "got -1318.2455916391948 want -1318.2455 tol=0.05")
        assert lines[-1] == "summary: 62/62 cells pass"


class TestReplay:
    def test_every_cell_passes(self, runner):
        result = run_cli(runner, ["replay"])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[-1] == "summary: 62/62 cells pass"
        assert all(line.startswith("PASS ") for line in lines[:-1])
        assert len(lines) == 63

    def test_json_shape(self, runner):
        result = run_cli(runner, ["replay", "--json"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["summary"] == {"cells": 62, "passed": 62, "failed": 0}
        names = [c["cell"] for c in doc["cells"]]
        assert names[0] == "calibration.field.slope"
        assert "TS-08.lab.color" in names

    def test_output_is_byte_stable(self, runner):
        assert run_cli(runner, ["replay"]).output_bytes \
            == run_cli(runner, ["replay"]).output_bytes


class TestSimulate:
    def test_deterministic_across_runs(self, runner, tmp_path):
        scn = scenario_file(tmp_path)
        first = run_cli(runner, ["simulate", str(scn),
                                 "--data-dir", str(tmp_path / "d1")])
        second = run_cli(runner, ["simulate", str(scn),
                                  "--data-dir", str(tmp_path / "d2")])
        assert first.exit_code == second.exit_code == 0
        assert first.output_bytes == second.output_bytes

    def test_summary_counts(self, runner, tmp_path):
        scn = scenario_file(tmp_path)
        result = run_cli(runner, ["simulate", str(scn),
                                  "--data-dir", str(tmp_path / "d"), "--json"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["summary"]["records"] == 2
        assert doc["summary"]["alarms"] == {"critical": 2, "advisory": 0}
        kinds = {e["kind"] for e in doc["events"]}
        assert "start" in kinds
        assert "uplink" in kinds

    def test_unknown_scenario_key_is_usage_error(self, runner, tmp_path):
        scn = scenario_file(tmp_path, {**SCENARIO, "typo_key": 1})
        result = runner.invoke(main, ["simulate", str(scn),
                                      "--data-dir", str(tmp_path / "d")])
        assert result.exit_code == 2
        assert "typo_key" in result.stderr

    def test_invalid_json_is_usage_error(self, runner, tmp_path):
        scn = tmp_path / "scn.json"
        scn.write_text("{nope")
        result = runner.invoke(main, ["simulate", str(scn),
                                      "--data-dir", str(tmp_path / "d")])
        assert result.exit_code == 2

    def test_corrupt_journal_is_runtime_error(self, runner, tmp_path):
        scn = scenario_file(tmp_path)
        data = tmp_path / "d"
        data.mkdir()
        (data / JOURNAL_NAME).write_bytes(b"not json\n")
        result = runner.invoke(main, ["simulate", str(scn),
                                      "--data-dir", str(data)])
        assert result.exit_code == 1
        assert "error:" in result.stderr

    def test_records_survive_into_journal(self, runner, tmp_path):
        scn = scenario_file(tmp_path)
        data = tmp_path / "d"
        run_cli(runner, ["simulate", str(scn), "--data-dir", str(data)])
        from glyscan.ingest import RecordStore
        store = RecordStore(data)
        records, _ = store.query()
        assert {r.device_serial for r in records} == {"SG-100", "SG-200"}
        assert all(r.color.label == "Positive" for r in records)
        store.close()


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class TestServe:
    def test_demo_server_produces_record(self, tmp_path):
        import httpx

        port = free_port()
        proc = subprocess.Popen(
            [sys.executable, "-m", "glyscan.cli", "serve",
             "--port", str(port), "--data-dir", str(tmp_path / "d"),
             "--demo", "--time-scale", "400"],
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
        )
        base = f"http://127.0.0.1:{port}"
        try:
            record = None
            deadline = time.monotonic() + 30.0
            while time.monotonic() < deadline:
                try:
                    body = httpx.get(f"{base}/api/records", timeout=2.0).json()
                except (httpx.HTTPError, ValueError):
                    time.sleep(0.25)
                    continue
                if body["records"]:
                    record = body["records"][0]
                    break
                time.sleep(0.25)
            assert record is not None, "no record appeared within 30s"
            assert record["device_serial"] == "SG-DEMO"
            assert record["color"] == "Positive"
            devices = httpx.get(f"{base}/api/devices", timeout=2.0).json()
            assert devices[0]["serial"] == "SG-DEMO"
            alarms = httpx.get(f"{base}/api/alarms", timeout=2.0).json()
            assert any(a["severity"] == "critical" for a in alarms)
        finally:
            proc.terminate()
            proc.wait(timeout=10)
