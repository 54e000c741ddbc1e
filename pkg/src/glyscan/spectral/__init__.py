"""Numerical heart: calibration, prediction, classification, channel ranking, CSV I/O.

All operations are pure functions over immutable inputs and safe to share
across threads.
"""

from .calibrate import (
    DegenerateX,
    TooFewSamples,
    ZeroVariance,
    classify,
    fit_ols,
    pearson_r,
    predict,
    rank_channels,
)
from .constants import (
    FIELD_INSTRUMENT,
    FIELD_MODEL,
    FIELD_POLICY,
    LAB_INSTRUMENT,
    LAB_MODEL,
    LAB_POLICY,
    MODELS,
    POLICIES,
)
from .csvio import (
    EXPECTED_HEADER,
    ParseError,
    ReportRow,
    SchemaMismatch,
    read_samples_csv,
    write_report,
    write_samples_csv,
)
from .types import (
    DEFAULT_CHANNEL_NM,
    SUPPORTED_WAVELENGTHS_NM,
    CalibrationModel,
    CalibrationSample,
    ChannelRanking,
    MissingChannel,
    Spectrum,
    TrafficLight,
    TrafficLightPolicy,
    UnsupportedChannel,
)

__all__ = [
    "DEFAULT_CHANNEL_NM",
    "SUPPORTED_WAVELENGTHS_NM",
    "CalibrationModel",
    "CalibrationSample",
    "ChannelRanking",
    "DegenerateX",
    "EXPECTED_HEADER",
    "FIELD_INSTRUMENT",
    "FIELD_MODEL",
    "FIELD_POLICY",
    "LAB_INSTRUMENT",
    "LAB_MODEL",
    "LAB_POLICY",
    "MODELS",
    "MissingChannel",
    "POLICIES",
    "ParseError",
    "ReportRow",
    "SchemaMismatch",
    "Spectrum",
    "TooFewSamples",
    "TrafficLight",
    "TrafficLightPolicy",
    "UnsupportedChannel",
    "ZeroVariance",
    "classify",
    "fit_ols",
    "pearson_r",
    "predict",
    "rank_channels",
    "read_samples_csv",
    "write_report",
    "write_samples_csv",
]
