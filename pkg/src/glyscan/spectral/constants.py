"""Recorded calibration constants for the two reference instruments.

The handheld field analyzer and the benchtop lab spectrometer were both
calibrated at 560 nm against the same 12-sample dilution series. These
constants are the recorded outcome of that calibration; refitting the
bundled readings reproduces the field model, but runtime classification
always defaults to the constants so results never drift with refits.
"""

from __future__ import annotations

from .types import CalibrationModel, TrafficLightPolicy

FIELD_INSTRUMENT = "field"
LAB_INSTRUMENT = "lab"

#: Field analyzer: value = -1318.2455 + 8.0988 * reflectance(560 nm).
#: r_squared recomputed from the bundled calibration readings.
FIELD_MODEL = CalibrationModel(
    instrument=FIELD_INSTRUMENT,
    channel_nm=560,
    slope=8.0988,
    intercept=-1318.2455,
    r_squared=0.9106,
    n_samples=12,
)

#: Lab reference: value = -791.9610 + 6.1200 * reflectance(560 nm).
#: Only the constants were recorded; the raw lab readings were not.
LAB_MODEL = CalibrationModel(
    instrument=LAB_INSTRUMENT,
    channel_nm=560,
    slope=6.1200,
    intercept=-791.9610,
    r_squared=None,
    n_samples=12,
)

#: Field bands: Negative up to -62, Warning -61..537, Positive from 538.
FIELD_POLICY = TrafficLightPolicy(
    instrument=FIELD_INSTRUMENT,
    negative_upper=-62.0,
    positive_lower=538.0,
)

#: Lab bands: Negative up to -57, Warning -56..585, Positive from 586.
LAB_POLICY = TrafficLightPolicy(
    instrument=LAB_INSTRUMENT,
    negative_upper=-57.0,
    positive_lower=586.0,
)

MODELS = {FIELD_INSTRUMENT: FIELD_MODEL, LAB_INSTRUMENT: LAB_MODEL}
POLICIES = {FIELD_INSTRUMENT: FIELD_POLICY, LAB_INSTRUMENT: LAB_POLICY}
