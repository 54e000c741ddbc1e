"""Device identity, link selection, and calibration settings with JSON persistence."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import ClassVar, Union

from ..spectral import (
    DEFAULT_CHANNEL_NM,
    SUPPORTED_WAVELENGTHS_NM,
    CalibrationModel,
    TrafficLightPolicy,
)
from ..spectral.constants import FIELD_MODEL, FIELD_POLICY


class InvalidConfig(ValueError):
    """A config value or command parameter fails validation."""


@dataclass(frozen=True)
class BrokerLink:
    """Direct broker uplink (WiFi-style credentials plus broker endpoint)."""

    kind: ClassVar[str] = "broker"

    ssid: str
    secret: str
    endpoint: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "ssid": self.ssid, "secret": self.secret,
                "endpoint": self.endpoint}


@dataclass(frozen=True)
class LoRaWanLink:
    """Long-range low-bandwidth uplink through a gateway."""

    kind: ClassVar[str] = "lorawan"

    device_eui: str
    app_key: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "device_eui": self.device_eui, "app_key": self.app_key}


Link = Union[BrokerLink, LoRaWanLink]


def link_from_dict(d: dict) -> Link:
    kind = d.get("kind")
    if kind == "broker":
        return BrokerLink(ssid=d["ssid"], secret=d["secret"], endpoint=d["endpoint"])
    if kind == "lorawan":
        return LoRaWanLink(device_eui=d["device_eui"], app_key=d["app_key"])
    raise InvalidConfig(f"unknown link kind: {kind!r}")


@dataclass(frozen=True)
class DeviceConfig:
    """Everything a device needs to identify itself, measure, and report.

    Exactly one link is active at a time; swapping it is a config change,
    not a runtime mode.
    """

    serial: str
    link: Link
    default_channel_nm: int = DEFAULT_CHANNEL_NM
    policy: TrafficLightPolicy = FIELD_POLICY
    model: CalibrationModel = FIELD_MODEL
    location: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if not self.serial:
            raise InvalidConfig("serial must be non-empty")
        if not isinstance(self.link, (BrokerLink, LoRaWanLink)):
            raise InvalidConfig(f"unsupported link object: {self.link!r}")
        if self.default_channel_nm not in SUPPORTED_WAVELENGTHS_NM:
            raise InvalidConfig(f"unsupported channel: {self.default_channel_nm}")
        if len(self.location) != 3:
            raise InvalidConfig("location must be (lat, lon, alt)")
        object.__setattr__(self, "location", tuple(float(v) for v in self.location))

    def to_dict(self) -> dict:
        return {
            "serial": self.serial,
            "link": self.link.to_dict(),
            "default_channel_nm": self.default_channel_nm,
            "policy": self.policy.to_dict(),
            "model": self.model.to_dict(),
            "location": list(self.location),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeviceConfig":
        try:
            return cls(
                serial=d["serial"],
                link=link_from_dict(d["link"]),
                default_channel_nm=int(d.get("default_channel_nm", DEFAULT_CHANNEL_NM)),
                policy=TrafficLightPolicy.from_dict(d["policy"]) if "policy" in d else FIELD_POLICY,
                model=CalibrationModel.from_dict(d["model"]) if "model" in d else FIELD_MODEL,
                location=tuple(d.get("location", (0.0, 0.0, 0.0))),
            )
        except KeyError as exc:
            raise InvalidConfig(f"missing config field: {exc.args[0]}") from None

    def save(self, path: str | Path) -> None:
        """Atomic write so a crash never leaves a half-written config."""
        path = Path(path)
        fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path: str | Path) -> "DeviceConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
