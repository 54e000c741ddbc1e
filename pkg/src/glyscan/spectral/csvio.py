"""CSV ingestion of spectral readings and JSON report output.

Schema: header ``sample_id,concentration_mg_l,r410,r435,...,r940`` with one
reflectance column per supported wavelength in ascending order; UTF-8,
``.`` decimal separator, LF line endings. Numeric fields round-trip
losslessly (floats are written with shortest-exact representation).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .types import (
    SUPPORTED_WAVELENGTHS_NM,
    CalibrationModel,
    CalibrationSample,
    Spectrum,
    TrafficLight,
)

EXPECTED_HEADER = ["sample_id", "concentration_mg_l"] + [
    f"r{nm}" for nm in SUPPORTED_WAVELENGTHS_NM
]


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SchemaMismatch(ValueError):
    pass


def read_samples_csv(data: bytes | str) -> list[CalibrationSample]:
    """Parse calibration samples from CSV bytes or text."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaMismatch("empty input: missing header row") from None
    header = [h.strip() for h in header]
    if header != EXPECTED_HEADER:
        raise SchemaMismatch(
            f"unexpected header {header!r}; expected {EXPECTED_HEADER!r}"
        )

    samples: list[CalibrationSample] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # blank line
        if len(row) != len(EXPECTED_HEADER):
            raise ParseError(lineno, len(row), f"expected {len(EXPECTED_HEADER)} fields, got {len(row)}")
        sample_id = row[0].strip()
        if not sample_id:
            raise ParseError(lineno, 1, "empty sample_id")
        try:
            concentration = float(row[1])
        except ValueError:
            raise ParseError(lineno, 2, f"bad concentration: {row[1]!r}") from None
        channels: dict[int, float] = {}
        for i, nm in enumerate(SUPPORTED_WAVELENGTHS_NM):
            col = i + 3
            try:
                channels[nm] = float(row[i + 2])
            except ValueError:
                raise ParseError(lineno, col, f"bad reflectance: {row[i + 2]!r}") from None
        try:
            samples.append(
                CalibrationSample(
                    sample_id=sample_id,
                    concentration=concentration,
                    spectrum=Spectrum(channels),
                )
            )
        except ValueError as exc:
            raise ParseError(lineno, 2, str(exc)) from None
    return samples


def _fmt(value: float) -> str:
    # shortest exact repr; integers without trailing ".0" for readability
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def write_samples_csv(samples: Iterable[CalibrationSample]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EXPECTED_HEADER)
    for s in samples:
        row = [s.sample_id, _fmt(s.concentration)]
        row += [_fmt(s.spectrum.reflectance(nm)) for nm in SUPPORTED_WAVELENGTHS_NM]
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


@dataclass(frozen=True)
class ReportRow:
    """One classified sample in a report."""

    sample_id: str
    instrument: str
    value: float
    color: TrafficLight


def write_report(models: Sequence[CalibrationModel], rows: Sequence[ReportRow]) -> dict:
    """Structured JSON document: model constants plus per-row value and color."""
    return {
        "models": [m.to_dict() for m in models],
        "rows": [
            {
                "sample_id": r.sample_id,
                "instrument": r.instrument,
                "value": r.value,
                "color": r.color.label,
            }
            for r in rows
        ],
    }
