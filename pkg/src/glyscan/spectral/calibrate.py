"""Calibration fitting, prediction, traffic-light classification, channel ranking."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .types import (
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

# The published band edges leave a one-unit gap between bands; continuous
# predictions can land inside it, so the working boundaries sit at the gap
# midpoints: Negative strictly below, Positive at-or-above.
_BAND_GAP_HALF = 0.5


class TooFewSamples(ValueError):
    def __init__(self, needed: int, got: int) -> None:
        super().__init__(f"need at least {needed} samples, got {got}")
        self.needed = needed
        self.got = got


class DegenerateX(ValueError):
    """All reflectance values at the fitted channel are equal."""


class ZeroVariance(ValueError):
    def __init__(self, channel_nm: int) -> None:
        super().__init__(f"channel {channel_nm} nm has zero variance across samples")
        self.channel_nm = channel_nm


def fit_ols(samples: Sequence[CalibrationSample], channel_nm: int,
            instrument: str = "field") -> CalibrationModel:
    """Ordinary least squares of concentration on reflectance at one channel.

    Concentration is the dependent variable, reflectance the independent one;
    returns slope, intercept, r squared (squared Pearson correlation, which
    for a simple regression equals the coefficient of determination) and the
    sample count.
    """
    if channel_nm not in SUPPORTED_WAVELENGTHS_NM:
        raise UnsupportedChannel(channel_nm)
    if len(samples) < 2:
        raise TooFewSamples(2, len(samples))

    x = np.array([s.spectrum.reflectance(channel_nm) for s in samples], dtype=float)
    y = np.array([s.concentration for s in samples], dtype=float)

    dx = x - x.mean()
    if np.all(dx == 0.0):
        raise DegenerateX(f"all reflectance values at {channel_nm} nm are equal")
    dy = y - y.mean()

    sxx = float(dx @ dx)
    sxy = float(dx @ dy)
    syy = float(dy @ dy)

    slope = sxy / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    # Degenerate y (all concentrations equal) fits a flat line with r^2 = 0.
    r_squared = (sxy * sxy) / (sxx * syy) if syy > 0 else 0.0

    return CalibrationModel(
        instrument=instrument,
        channel_nm=channel_nm,
        slope=slope,
        intercept=intercept,
        r_squared=min(r_squared, 1.0),
        n_samples=len(samples),
    )


def predict(model: CalibrationModel, spectrum: Spectrum | Mapping[int, float]) -> float:
    """Predicted traffic-light value: intercept + slope * reflectance(channel)."""
    if isinstance(spectrum, Spectrum):
        x = spectrum.reflectance(model.channel_nm)
    else:
        try:
            x = float(spectrum[model.channel_nm])
        except KeyError:
            raise MissingChannel(model.channel_nm) from None
    return model.intercept + model.slope * x


def classify(policy: TrafficLightPolicy, value: float) -> TrafficLight:
    """Classify a predicted value into the three-band traffic light.

    Total on the reals and monotone non-decreasing in ``value``.
    """
    if value < policy.negative_upper + _BAND_GAP_HALF:
        return TrafficLight.NEGATIVE
    if value >= policy.positive_lower - _BAND_GAP_HALF:
        return TrafficLight.POSITIVE
    return TrafficLight.WARNING


def pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    den = float(np.sqrt((dx @ dx) * (dy @ dy)))
    if den == 0.0:
        raise ZeroDivisionError("zero variance")
    return float((dx @ dy) / den)


def rank_channels(samples: Sequence[CalibrationSample],
                  candidates: Sequence[int]) -> ChannelRanking:
    """Rank candidate channels by |Pearson r| of reflectance vs concentration.

    Ties break toward the lower wavelength.
    """
    if len(samples) < 3:
        raise TooFewSamples(3, len(samples))
    if not candidates:
        raise ValueError("candidates must be non-empty")
    for nm in candidates:
        if nm not in SUPPORTED_WAVELENGTHS_NM:
            raise UnsupportedChannel(nm)

    y = np.array([s.concentration for s in samples], dtype=float)
    if np.all(y == y[0]):
        raise ValueError("concentrations have zero variance; correlation undefined")
    entries: list[tuple[int, float]] = []
    for nm in candidates:
        x = np.array([s.spectrum.reflectance(nm) for s in samples], dtype=float)
        if np.all(x == x[0]):
            raise ZeroVariance(nm)
        entries.append((nm, pearson_r(x, y)))

    entries.sort(key=lambda e: (-abs(e[1]), e[0]))
    return ChannelRanking(entries=tuple(entries))
