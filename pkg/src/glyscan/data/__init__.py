"""Bundled reference datasets: calibration readings, validation tests, recorded models."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from importlib import resources

from ..spectral.csvio import read_samples_csv
from ..spectral.types import CalibrationSample, TrafficLight


def _read_text(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def calibration_readings() -> list[CalibrationSample]:
    """The 12-sample dilution series used to build the calibration curve."""
    return read_samples_csv(_read_text("calibration_readings.csv"))


@dataclass(frozen=True)
class ValidationRow:
    """One validation test sample with both instruments' recorded outcome."""

    sample_id: str
    concentration: float
    r560_field: float
    r560_lab: float
    expected_value_field: float
    expected_value_lab: float
    expected_color: TrafficLight


def validation_tests() -> list[ValidationRow]:
    """The 15 test samples used to validate both instrument models."""
    reader = csv.DictReader(io.StringIO(_read_text("validation_tests.csv")))
    rows = []
    for rec in reader:
        rows.append(
            ValidationRow(
                sample_id=rec["sample_id"],
                concentration=float(rec["concentration_mg_l"]),
                r560_field=float(rec["r560_field"]),
                r560_lab=float(rec["r560_lab"]),
                expected_value_field=float(rec["expected_value_field"]),
                expected_value_lab=float(rec["expected_value_lab"]),
                expected_color=TrafficLight.from_label(rec["expected_color"]),
            )
        )
    return rows


def reference_models() -> dict:
    """Recorded model constants, band edges and reproduction tolerances."""
    return json.loads(_read_text("reference_models.json"))
