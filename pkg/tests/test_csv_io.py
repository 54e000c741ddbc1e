"""CSV schema parsing, report output, and round-trip properties."""

from __future__ import annotations

import numpy as np
import pytest

from glyscan.spectral import (
    EXPECTED_HEADER,
    FIELD_MODEL,
    SUPPORTED_WAVELENGTHS_NM,
    CalibrationSample,
    ParseError,
    ReportRow,
    SchemaMismatch,
    Spectrum,
    TrafficLight,
    read_samples_csv,
    write_report,
    write_samples_csv,
)

HEADER_LINE = ",".join(EXPECTED_HEADER)


def test_bundled_calibration_readings(calib_samples):
    assert len(calib_samples) == 12
    s12 = calib_samples[-1]
    assert s12.sample_id == "S12"
    assert s12.concentration == 2000.0
    assert s12.spectrum.reflectance(560) == 375.0


def test_empty_data_section():
    assert read_samples_csv(HEADER_LINE + "\n") == []


def test_round_trip_random_samples():
    rng = np.random.default_rng(11)
    samples = []
    for i in range(100):
        chans = {nm: float(rng.uniform(0, 500)) for nm in SUPPORTED_WAVELENGTHS_NM}
        samples.append(
            CalibrationSample(f"R{i:03d}", float(rng.uniform(0, 2000)), Spectrum(chans))
        )
    again = read_samples_csv(write_samples_csv(samples))
    assert again == samples  # shortest-repr floats round-trip exactly


def test_bundled_file_round_trips_bytes(calib_samples):
    data = write_samples_csv(calib_samples)
    assert read_samples_csv(data) == calib_samples


def test_header_mismatch():
    with pytest.raises(SchemaMismatch):
        read_samples_csv("sample,conc\nfoo,1\n")


def test_missing_header():
    with pytest.raises(SchemaMismatch):
        read_samples_csv("")


def test_parse_error_reports_line_and_column():
    bad = HEADER_LINE + "\nS01,notanumber" + ",0" * 17 + "\n"
    with pytest.raises(ParseError) as exc:
        read_samples_csv(bad)
    assert exc.value.line == 2
    assert exc.value.column == 2


def test_parse_error_on_bad_reflectance():
    row = ["S01", "5"] + ["1"] * 17
    row[2 + 4] = "oops"  # 5th reflectance column
    bad = HEADER_LINE + "\n" + ",".join(row) + "\n"
    with pytest.raises(ParseError) as exc:
        read_samples_csv(bad)
    assert exc.value.line == 2
    assert exc.value.column == 7


def test_parse_error_on_wrong_field_count():
    with pytest.raises(ParseError):
        read_samples_csv(HEADER_LINE + "\nS01,5,1,2\n")


def test_negative_concentration_rejected():
    row = ["S01", "-4"] + ["1"] * 17
    with pytest.raises(ParseError):
        read_samples_csv(HEADER_LINE + "\n" + ",".join(row) + "\n")


def test_write_report_shape():
    rows = [
        ReportRow("TS-11", "field", 989.9125, TrafficLight.POSITIVE),
        ReportRow("TS-01", "field", -589.3535, TrafficLight.NEGATIVE),
    ]
    doc = write_report([FIELD_MODEL], rows)
    assert doc["models"][0]["slope"] == FIELD_MODEL.slope
    assert doc["rows"][0] == {
        "sample_id": "TS-11",
        "instrument": "field",
        "value": 989.9125,
        "color": "Positive",
    }
