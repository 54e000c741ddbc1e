"""Operator command line: calibrate, classify, replay reference tables, simulate, serve.

Exit codes: 0 success, 1 runtime failure (including replay cell mismatches),
2 usage or input-validation error. All diagnostic chatter goes to stderr;
stdout carries only the command's data so outputs stay byte-stable.
"""

from __future__ import annotations

import json
import os
import sys
import threading
import time
from pathlib import Path
from typing import Optional

import click

from .data import calibration_readings, reference_models, validation_tests
from .ingest import StorageFailure, create_app
from .scenario import ScenarioError, Simulation, simulation_from_scenario
from .spectral import (
    FIELD_MODEL,
    FIELD_POLICY,
    LAB_MODEL,
    LAB_POLICY,
    CalibrationModel,
    DegenerateX,
    MissingChannel,
    ParseError,
    SchemaMismatch,
    Spectrum,
    TooFewSamples,
    TrafficLightPolicy,
    UnsupportedChannel,
    ZeroVariance,
    classify,
    fit_ols,
    predict,
    rank_channels,
    read_samples_csv,
)

_VALIDATION_ERRORS = (
    ParseError,
    SchemaMismatch,
    TooFewSamples,
    DegenerateX,
    ZeroVariance,
    UnsupportedChannel,
    MissingChannel,
    ScenarioError,
)

_PRESETS = {
    "field": (FIELD_MODEL, FIELD_POLICY),
    "lab": (LAB_MODEL, LAB_POLICY),
}


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _num(value: float | None) -> str:
    """Shortest exact decimal form; byte-stable across runs."""
    if value is None:
        return "none"
    return repr(float(value))


def _emit_json(doc) -> None:
    click.echo(json.dumps(doc, sort_keys=True, indent=2))


def _read_samples(csv_path: Path):
    try:
        return read_samples_csv(csv_path.read_bytes())
    except (ParseError, SchemaMismatch) as exc:
        _fail(2, f"{csv_path}: {exc}")
    except OSError as exc:
        _fail(1, str(exc))


@click.group()
def main() -> None:
    """Water-screening toolkit: calibration, classification, simulation, service."""


# ------------------------------------------------------------------ calibrate


@main.command()
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--channel", type=int, default=560, show_default=True,
              help="Wavelength (nm) to fit on.")
@click.option("--candidates", default=None,
              help="Comma-separated wavelengths to rank by |Pearson r|.")
@click.option("--instrument", default="custom", show_default=True,
              help="Label stored in the fitted model.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Also write the fitted model JSON to this file.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text.")
def calibrate(csv_path: Path, channel: int, candidates: Optional[str],
              instrument: str, out: Optional[Path], as_json: bool) -> None:
    """Fit a linear calibration curve from a readings CSV."""
    samples = _read_samples(csv_path)

    ranking = None
    try:
        if candidates:
            try:
                wanted = [int(c) for c in candidates.split(",") if c.strip()]
            except ValueError:
                _fail(2, f"bad --candidates list: {candidates!r}")
            ranking = rank_channels(samples, wanted)
        model = fit_ols(samples, channel, instrument=instrument)
    except _VALIDATION_ERRORS as exc:
        _fail(2, str(exc))

    if out is not None:
        out.write_text(json.dumps(model.to_dict(), sort_keys=True, indent=2) + "\n")

    if as_json:
        doc = {"model": model.to_dict()}
        if ranking is not None:
            doc["ranking"] = [{"channel_nm": nm, "pearson_r": r}
                              for nm, r in ranking.entries]
        _emit_json(doc)
        return

    for key in ("instrument", "channel_nm", "slope", "intercept", "r_squared",
                "n_samples"):
        value = model.to_dict()[key]
        rendered = _num(value) if isinstance(value, float) else str(value)
        click.echo(f"{key}: {rendered}")
    if ranking is not None:
        click.echo("ranking:")
        for rank, (nm, r) in enumerate(ranking.entries, start=1):
            click.echo(f"  {rank}. r{nm}  pearson_r={_num(r)}")


# ------------------------------------------------------------------- classify


def _load_model_file(path: Path) -> tuple[CalibrationModel, TrafficLightPolicy]:
    try:
        doc = json.loads(path.read_text())
        model = CalibrationModel.from_dict(doc["model"] if "model" in doc else doc)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        _fail(2, f"{path}: not a model file: {exc}")
    if "policy" in doc:
        try:
            policy = TrafficLightPolicy.from_dict(doc["policy"])
        except (ValueError, KeyError, TypeError) as exc:
            _fail(2, f"{path}: bad policy: {exc}")
    else:
        policy = FIELD_POLICY if model.instrument != "lab" else LAB_POLICY
    return model, policy


@main.command("classify")
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--model", "model_path",
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="Model JSON produced by `calibrate --out`.")
@click.option("--instrument", type=click.Choice(sorted(_PRESETS)), default=None,
              help="Use a built-in reference model instead of --model.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text.")
def classify_cmd(csv_path: Path, model_path: Optional[Path],
                 instrument: Optional[str], as_json: bool) -> None:
    """Predict value and traffic-light color for every row of a readings CSV."""
    if (model_path is None) == (instrument is None):
        _fail(2, "pass exactly one of --model or --instrument")
    if model_path is not None:
        model, policy = _load_model_file(model_path)
    else:
        model, policy = _PRESETS[instrument]

    samples = _read_samples(csv_path)
    rows = []
    try:
        for s in samples:
            value = predict(model, s.spectrum)
            rows.append({"sample_id": s.sample_id, "value": value,
                         "color": classify(policy, value).label})
    except _VALIDATION_ERRORS as exc:
        _fail(2, str(exc))

    if as_json:
        _emit_json({"instrument": model.instrument, "rows": rows})
        return
    click.echo("sample_id\tvalue\tcolor")
    for row in rows:
        click.echo(f"{row['sample_id']}\t{row['value']:.4f}\t{row['color']}")


# --------------------------------------------------------------------- replay


def _replay_cells() -> tuple[list[dict], dict]:
    """Re-derive every recorded table cell and compare at stated tolerances."""
    reference = reference_models()
    cells: list[dict] = []

    def cell(name: str, got, want, tol: Optional[float]) -> None:
        if tol is None:
            ok = got == want
        else:
            ok = abs(got - want) <= tol
        cells.append({"cell": name, "got": got, "want": want,
                      "tolerance": tol, "pass": ok})

    recorded_field = reference["models"]["field"]
    fit = fit_ols(calibration_readings(), recorded_field["channel_nm"],
                  instrument="field")
    cell("calibration.field.slope", fit.slope, recorded_field["slope"],
         recorded_field["fit_tolerances"]["slope"])
    cell("calibration.field.intercept", fit.intercept, recorded_field["intercept"],
         recorded_field["fit_tolerances"]["intercept"])

    value_tol = reference["value_tolerances"]
    for row in validation_tests():
        for name, model, policy, r560, want_value in (
            ("field", FIELD_MODEL, FIELD_POLICY, row.r560_field,
             row.expected_value_field),
            ("lab", LAB_MODEL, LAB_POLICY, row.r560_lab, row.expected_value_lab),
        ):
            value = predict(model, Spectrum.partial({model.channel_nm: r560}))
            cell(f"{row.sample_id}.{name}.value", value, want_value,
                 value_tol[name])
            cell(f"{row.sample_id}.{name}.color", classify(policy, value).label,
                 row.expected_color.label, None)

    passed = sum(1 for c in cells if c["pass"])
    summary = {"cells": len(cells), "passed": passed,
               "failed": len(cells) - passed}
    return cells, summary


@main.command()
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text.")
def replay(as_json: bool) -> None:
    """Recompute the recorded calibration and validation tables; verify each cell."""
    cells, summary = _replay_cells()
    if as_json:
        _emit_json({"cells": cells, "summary": summary})
    else:
        for c in cells:
            got = _num(c["got"]) if isinstance(c["got"], float) else c["got"]
            want = _num(c["want"]) if isinstance(c["want"], float) else c["want"]
            tol = "" if c["tolerance"] is None else f" tol={_num(c['tolerance'])}"
            status = "PASS" if c["pass"] else "FAIL"
            click.echo(f"{status} {c['cell']}: got {got} want {want}{tol}")
        click.echo(f"summary: {summary['passed']}/{summary['cells']} cells pass")
    if summary["failed"]:
        sys.exit(1)


# ------------------------------------------------------------------- simulate


@main.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False,
                                                 path_type=Path))
@click.option("--data-dir", type=click.Path(file_okay=False, path_type=Path),
              required=True, help="Directory for the persistent record journal.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text.")
def simulate(scenario_path: Path, data_dir: Path, as_json: bool) -> None:
    """Run a scenario file to completion; print the event log and summary."""
    try:
        doc = json.loads(scenario_path.read_text())
    except (OSError, ValueError) as exc:
        _fail(2, f"{scenario_path}: {exc}")
    try:
        sim, duration, step = simulation_from_scenario(doc, data_dir)
    except ScenarioError as exc:
        _fail(2, str(exc))
    except StorageFailure as exc:
        _fail(1, str(exc))
    try:
        sim.run(duration, step=step)
        summary = sim.summary()
        events = sim.log
    except StorageFailure as exc:
        _fail(1, str(exc))
    finally:
        sim.close()

    if as_json:
        _emit_json({"events": events, "summary": summary})
        return
    for event in events:
        click.echo(json.dumps(event, sort_keys=True))
    click.echo(f"records: {summary['records']}")
    click.echo(f"alarms: critical={summary['alarms']['critical']} "
               f"advisory={summary['alarms']['advisory']}")
    click.echo(f"radio: delivered={summary['radio']['delivered']} "
               f"lost={summary['radio']['lost']} "
               f"duplicate={summary['radio']['duplicate']}")
    click.echo(f"simulated_seconds: {_num(summary['simulated_seconds'])}")


# ---------------------------------------------------------------------- serve


def _pump_loop(sim: Simulation, time_scale: float, real_step: float,
               stop: threading.Event) -> None:
    while not stop.is_set():
        time.sleep(real_step)
        with sim.lock:
            sim.run(sim.now + real_step * time_scale,
                    step=max(real_step * time_scale, 1e-9))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None,
              help="Defaults to $GLYSCAN_PORT or 8000.")
@click.option("--data-dir", type=click.Path(file_okay=False, path_type=Path),
              default=None, help="Defaults to $GLYSCAN_DATA_DIR or ./glyscan-data.")
@click.option("--scenario", "scenario_path",
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="Scenario JSON declaring devices/schedule.")
@click.option("--demo", is_flag=True,
              help="Add one broker-linked device (SG-DEMO) with a 600 mg/l sample.")
@click.option("--time-scale", type=float, default=1.0, show_default=True,
              help="Simulated seconds advanced per real second.")
def serve(host: str, port: Optional[int], data_dir: Optional[Path],
          scenario_path: Optional[Path], demo: bool, time_scale: float) -> None:
    """Run the ingest service (HTTP API, broker bus, radio gateway)."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("GLYSCAN_PORT", "8000"))
    if data_dir is None:
        data_dir = Path(os.environ.get("GLYSCAN_DATA_DIR", "glyscan-data"))
    if time_scale <= 0:
        _fail(2, f"--time-scale must be positive: {time_scale}")

    try:
        if scenario_path is not None:
            doc = json.loads(scenario_path.read_text())
            sim, _, _ = simulation_from_scenario(doc, data_dir)
        else:
            sim = Simulation(data_dir)
    except (OSError, ValueError, ScenarioError) as exc:
        _fail(2, str(exc))
    except StorageFailure as exc:
        _fail(1, str(exc))

    if demo:
        sim.add_device("SG-DEMO", "broker", seed=7)
        sim.schedule(sim.now, "start", "SG-DEMO", concentration=600.0)

    stop = threading.Event()
    pump = threading.Thread(target=_pump_loop, args=(sim, time_scale, 0.25, stop),
                            daemon=True)
    pump.start()
    click.echo(f"serving on http://{host}:{port} (data in {data_dir}, "
               f"time x{time_scale:g})", err=True)
    try:
        uvicorn.run(create_app(sim.service), host=host, port=port,
                    log_level="warning")
    finally:
        stop.set()
        pump.join(timeout=2.0)
        sim.close()


if __name__ == "__main__":
    main()
