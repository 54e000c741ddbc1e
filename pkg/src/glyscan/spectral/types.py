"""Domain types for spectral calibration and classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Mapping

#: Wavelength grid (nm) of the emulated AS7265X-style multispectral sensor,
#: as published in the instrument's calibration data tables.
SUPPORTED_WAVELENGTHS_NM: tuple[int, ...] = (
    410, 435, 460, 485, 510, 535, 560, 585, 610,
    645, 705, 730, 760, 810, 860, 900, 940,
)

#: Default working channel for the colorimetric glyphosate reaction
#: (Ruhemann's Purple, maximum VIS absorption near 570 nm).
DEFAULT_CHANNEL_NM = 560


class UnsupportedChannel(ValueError):
    """Wavelength is not one of the sensor's supported channels."""

    def __init__(self, channel_nm: int) -> None:
        super().__init__(f"unsupported channel: {channel_nm} nm")
        self.channel_nm = channel_nm


class MissingChannel(KeyError):
    """Spectrum does not carry the requested channel."""

    def __init__(self, channel_nm: int) -> None:
        super().__init__(f"spectrum has no reading at {channel_nm} nm")
        self.channel_nm = channel_nm


class TrafficLight(enum.IntEnum):
    """Three-band classification of a predicted value, totally ordered."""

    NEGATIVE = 0
    WARNING = 1
    POSITIVE = 2

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_label(cls, label: str) -> "TrafficLight":
        try:
            return cls[label.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown traffic light label: {label!r}") from None


class Spectrum:
    """One diffuse-reflectance reading (uW/cm^2 per wavelength).

    A full reading carries exactly the supported wavelength grid; partial
    spectra (e.g. reconstructed from a minimal telemetry frame) are allowed
    only through :meth:`partial`.
    """

    __slots__ = ("_channels",)

    def __init__(self, channels: Mapping[int, float]) -> None:
        chans = {int(nm): float(v) for nm, v in channels.items()}
        if tuple(sorted(chans)) != SUPPORTED_WAVELENGTHS_NM:
            unexpected = sorted(set(chans) - set(SUPPORTED_WAVELENGTHS_NM))
            if unexpected:
                raise UnsupportedChannel(unexpected[0])
            missing = sorted(set(SUPPORTED_WAVELENGTHS_NM) - set(chans))
            raise ValueError(f"spectrum must cover all supported channels; missing {missing}")
        self._validate_values(chans)
        self._channels = {nm: chans[nm] for nm in SUPPORTED_WAVELENGTHS_NM}

    @staticmethod
    def _validate_values(chans: Mapping[int, float]) -> None:
        for nm, v in chans.items():
            if not math.isfinite(v):
                raise ValueError(f"reflectance at {nm} nm is not finite")
            if v < 0:
                raise ValueError(f"reflectance at {nm} nm is negative: {v}")

    @classmethod
    def partial(cls, channels: Mapping[int, float]) -> "Spectrum":
        """Build a spectrum covering only a subset of the supported grid."""
        chans = {int(nm): float(v) for nm, v in channels.items()}
        for nm in chans:
            if nm not in SUPPORTED_WAVELENGTHS_NM:
                raise UnsupportedChannel(nm)
        cls._validate_values(chans)
        obj = object.__new__(cls)
        obj._channels = {nm: chans[nm] for nm in SUPPORTED_WAVELENGTHS_NM if nm in chans}
        return obj

    @property
    def is_complete(self) -> bool:
        return len(self._channels) == len(SUPPORTED_WAVELENGTHS_NM)

    def reflectance(self, channel_nm: int) -> float:
        try:
            return self._channels[channel_nm]
        except KeyError:
            raise MissingChannel(channel_nm) from None

    def __contains__(self, channel_nm: int) -> bool:
        return channel_nm in self._channels

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return iter(self._channels.items())

    def __len__(self) -> int:
        return len(self._channels)

    def as_dict(self) -> dict[int, float]:
        return dict(self._channels)

    def replace(self, channel_nm: int, value: float) -> "Spectrum":
        """Copy with one channel changed (keeps completeness)."""
        chans = self.as_dict()
        if channel_nm not in chans:
            raise MissingChannel(channel_nm)
        chans[channel_nm] = value
        return Spectrum(chans) if self.is_complete else Spectrum.partial(chans)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Spectrum):
            return NotImplemented
        return self._channels == other._channels

    def __hash__(self) -> int:
        return hash(tuple(self._channels.items()))

    def __repr__(self) -> str:
        return f"Spectrum({self._channels!r})"


@dataclass(frozen=True)
class CalibrationSample:
    """One known-concentration reading used to build a calibration curve."""

    sample_id: str
    concentration: float  # mg/l
    spectrum: Spectrum

    def __post_init__(self) -> None:
        if self.concentration < 0:
            raise ValueError(f"concentration must be >= 0, got {self.concentration}")


@dataclass(frozen=True)
class CalibrationModel:
    """Simple linear model: predicted value = intercept + slope * reflectance(channel).

    ``r_squared`` is the square of the Pearson correlation between the
    channel reflectance and concentration; ``None`` when the model ships as
    recorded constants without its underlying readings.
    """

    instrument: str
    channel_nm: int
    slope: float  # (mg/l) / (uW/cm^2)
    intercept: float  # mg/l
    r_squared: float | None
    n_samples: int

    def __post_init__(self) -> None:
        if self.channel_nm not in SUPPORTED_WAVELENGTHS_NM:
            raise UnsupportedChannel(self.channel_nm)
        if self.n_samples < 2:
            raise ValueError("a calibration model needs at least 2 samples")
        if self.r_squared is not None and not 0.0 <= self.r_squared <= 1.0:
            raise ValueError(f"r_squared out of [0, 1]: {self.r_squared}")

    def to_dict(self) -> dict:
        return {
            "instrument": self.instrument,
            "channel_nm": self.channel_nm,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n_samples": self.n_samples,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CalibrationModel":
        return cls(
            instrument=str(data["instrument"]),
            channel_nm=int(data["channel_nm"]),
            slope=float(data["slope"]),
            intercept=float(data["intercept"]),
            r_squared=None if data.get("r_squared") is None else float(data["r_squared"]),
            n_samples=int(data["n_samples"]),
        )


@dataclass(frozen=True)
class TrafficLightPolicy:
    """Published integer band edges of the digital traffic light.

    ``negative_upper`` is the top of the Negative band and ``positive_lower``
    the bottom of the Positive band; the edges are separated by a one-unit
    gap, and classification places the actual boundaries at the gap
    midpoints (see :func:`glyscan.spectral.calibrate.classify`).
    """

    instrument: str
    negative_upper: float
    positive_lower: float

    def __post_init__(self) -> None:
        if not self.negative_upper < self.positive_lower:
            raise ValueError(
                f"negative_upper ({self.negative_upper}) must be below "
                f"positive_lower ({self.positive_lower})"
            )

    def to_dict(self) -> dict:
        return {
            "instrument": self.instrument,
            "negative_upper": self.negative_upper,
            "positive_lower": self.positive_lower,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "TrafficLightPolicy":
        return cls(
            instrument=str(data["instrument"]),
            negative_upper=float(data["negative_upper"]),
            positive_lower=float(data["positive_lower"]),
        )


@dataclass(frozen=True)
class ChannelRanking:
    """Candidate channels ranked by |Pearson r| against concentration."""

    entries: tuple[tuple[int, float], ...]  # (wavelength nm, r), |r| descending

    def __post_init__(self) -> None:
        for nm, r in self.entries:
            if not -1.0 <= r <= 1.0 + 1e-12:
                raise ValueError(f"correlation out of range at {nm} nm: {r}")

    def best(self) -> int:
        return self.entries[0][0]

    def r_of(self, channel_nm: int) -> float:
        for nm, r in self.entries:
            if nm == channel_nm:
                return r
        raise MissingChannel(channel_nm)
