"""Synthetic reflectance sensor driven by the bundled calibration readings.

The sensor response is a per-channel piecewise-linear curve through the
anchor readings (replicates at equal concentration averaged into one
anchor), linearly extrapolated past the highest anchor, with optional
multiplicative Gaussian noise on top.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ..data import calibration_readings
from ..spectral import SUPPORTED_WAVELENGTHS_NM, CalibrationSample, Spectrum

DEFAULT_NOISE_REL = 0.12


class NegativeConcentration(ValueError):
    def __init__(self, value: float) -> None:
        super().__init__(f"concentration must be >= 0, got {value}")
        self.value = value


def build_anchor_table(samples: Iterable[CalibrationSample]) -> tuple[tuple[float, Spectrum], ...]:
    """Collapse readings into one averaged Spectrum per distinct concentration."""
    groups: dict[float, list[Spectrum]] = {}
    for s in samples:
        groups.setdefault(float(s.concentration), []).append(s.spectrum)
    anchors = []
    for conc in sorted(groups):
        spectra = groups[conc]
        refl = {
            nm: float(np.mean([sp.reflectance(nm) for sp in spectra]))
            for nm in SUPPORTED_WAVELENGTHS_NM
        }
        anchors.append((conc, Spectrum(refl)))
    return tuple(anchors)


@dataclass(frozen=True)
class SensorModel:
    """Anchor curve plus a relative noise level and a default seed."""

    anchors: tuple[tuple[float, Spectrum], ...]
    noise_rel: float = DEFAULT_NOISE_REL
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.anchors) < 2:
            raise ValueError("need at least two anchors to interpolate")
        concs = [c for c, _ in self.anchors]
        if any(b <= a for a, b in zip(concs, concs[1:])):
            raise ValueError("anchor concentrations must be strictly increasing")
        if self.noise_rel < 0:
            raise ValueError("noise_rel must be >= 0")

    @property
    def max_anchor(self) -> float:
        return self.anchors[-1][0]


def default_sensor_model(noise_rel: float = DEFAULT_NOISE_REL, seed: int = 0) -> SensorModel:
    return SensorModel(anchors=build_anchor_table(calibration_readings()),
                       noise_rel=noise_rel, seed=seed)


def _interp_channel(xs: Sequence[float], ys: Sequence[float], c: float) -> float:
    if c <= xs[-1]:
        return float(np.interp(c, xs, ys))
    # continue the last segment's slope beyond the highest anchor
    slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
    return float(ys[-1] + slope * (c - xs[-1]))


def interpolate_clean(model: SensorModel, concentration: float) -> Spectrum:
    """Noise-free sensor response; the curve the noise multiplies."""
    if concentration < 0:
        raise NegativeConcentration(concentration)
    xs = [c for c, _ in model.anchors]
    refl = {}
    for nm in SUPPORTED_WAVELENGTHS_NM:
        ys = [sp.reflectance(nm) for _, sp in model.anchors]
        refl[nm] = max(0.0, _interp_channel(xs, ys, concentration))
    return Spectrum(refl)


def simulate_spectrum(
    model: SensorModel,
    concentration: float,
    rng: Optional[np.random.Generator] = None,
) -> Spectrum:
    """One noisy reading: clean curve times (1 + N(0, noise_rel)) per channel,
    clamped at zero. Deterministic for a given seed / generator state; channels
    consume draws in ascending wavelength order.
    """
    clean = interpolate_clean(model, concentration)
    if rng is None:
        rng = np.random.default_rng(model.seed)
    refl = {}
    for nm in SUPPORTED_WAVELENGTHS_NM:
        factor = 1.0 + float(rng.normal(0.0, model.noise_rel))
        refl[nm] = max(0.0, clean.reflectance(nm) * factor)
    return Spectrum(refl)
