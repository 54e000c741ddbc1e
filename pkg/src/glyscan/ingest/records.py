"""Platform-side record, alarm, and query types."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from ..spectral import TrafficLight

LINK_KINDS = ("broker", "lorawan")


class SchemaViolation(ValueError):
    """Envelope cannot become a stored record."""


class InvalidRange(ValueError):
    """Query filter with start after end."""


class StorageFailure(Exception):
    """The journal could not be written or replayed."""


class UnknownDevice(LookupError):
    pass


class LinkUnavailable(RuntimeError):
    pass


@dataclass(frozen=True)
class TestRecord:
    """One persisted water test with full traceability.

    `color` is always the server-side classification; a device that
    reported something else gets `color_mismatch` set. `precision` records
    whether values survived a quantizing radio link ("quantized") or came
    over the broker path bit-exact ("exact").
    """

    __test__ = False  # domain type, not a pytest class

    test_id: int
    device_serial: str
    timestamp: float
    link_kind: str
    predicted_mg_l: float
    color: TrafficLight
    spectrum: dict[int, float]
    env: dict[str, float]
    gps: Optional[tuple[float, float, float]]
    request: dict = field(default_factory=dict)
    diagnostic: bool = False
    env_violation: bool = False
    color_mismatch: bool = False
    precision: str = "exact"
    correlation_id: Optional[str] = None

    def __post_init__(self) -> None:
        if self.test_id < 0:
            raise ValueError(f"test_id must be >= 0: {self.test_id}")
        if not self.device_serial:
            raise ValueError("device_serial must be non-empty")
        if self.link_kind not in LINK_KINDS:
            raise ValueError(f"link_kind must be one of {LINK_KINDS}: {self.link_kind!r}")
        if self.precision not in ("exact", "quantized"):
            raise ValueError(f"bad precision: {self.precision!r}")
        object.__setattr__(self, "spectrum",
                           {int(nm): float(v) for nm, v in self.spectrum.items()})
        if self.gps is not None:
            object.__setattr__(self, "gps", tuple(float(v) for v in self.gps))

    @property
    def record_id(self) -> str:
        """Globally unique id (test_id is only unique per device)."""
        return f"{self.device_serial}:{self.test_id}"

    def to_dict(self) -> dict:
        return {
            "test_id": self.test_id,
            "record_id": self.record_id,
            "device_serial": self.device_serial,
            "timestamp": self.timestamp,
            "link_kind": self.link_kind,
            "predicted_mg_l": self.predicted_mg_l,
            "color": self.color.label,
            "spectrum": {str(nm): v for nm, v in sorted(self.spectrum.items())},
            "env": dict(self.env),
            "gps": list(self.gps) if self.gps is not None else None,
            "request": dict(self.request),
            "diagnostic": self.diagnostic,
            "env_violation": self.env_violation,
            "color_mismatch": self.color_mismatch,
            "precision": self.precision,
            "correlation_id": self.correlation_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TestRecord":
        return cls(
            test_id=int(d["test_id"]),
            device_serial=d["device_serial"],
            timestamp=float(d["timestamp"]),
            link_kind=d["link_kind"],
            predicted_mg_l=float(d["predicted_mg_l"]),
            color=TrafficLight.from_label(d["color"]),
            spectrum={int(nm): float(v) for nm, v in d["spectrum"].items()},
            env=dict(d["env"]),
            gps=tuple(d["gps"]) if d.get("gps") is not None else None,
            request=dict(d.get("request") or {}),
            diagnostic=bool(d.get("diagnostic", False)),
            env_violation=bool(d.get("env_violation", False)),
            color_mismatch=bool(d.get("color_mismatch", False)),
            precision=d.get("precision", "exact"),
            correlation_id=d.get("correlation_id"),
        )

    def with_correlation(self, correlation_id: str) -> "TestRecord":
        return replace(self, correlation_id=correlation_id)


@dataclass(frozen=True)
class Alarm:
    alarm_id: int
    test_id: int
    device_serial: str
    severity: str
    created_at: float
    acknowledged: bool = False

    def __post_init__(self) -> None:
        if self.severity not in ("advisory", "critical"):
            raise ValueError(f"bad severity: {self.severity!r}")

    def to_dict(self) -> dict:
        return {
            "alarm_id": self.alarm_id,
            "test_id": self.test_id,
            "record_id": f"{self.device_serial}:{self.test_id}",
            "device_serial": self.device_serial,
            "severity": self.severity,
            "created_at": self.created_at,
            "acknowledged": self.acknowledged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Alarm":
        return cls(
            alarm_id=int(d["alarm_id"]),
            test_id=int(d["test_id"]),
            device_serial=d["device_serial"],
            severity=d["severity"],
            created_at=float(d["created_at"]),
            acknowledged=bool(d.get("acknowledged", False)),
        )


@dataclass(frozen=True)
class QueryFilter:
    device_serial: Optional[str] = None
    t_from: Optional[float] = None
    t_to: Optional[float] = None
    color: Optional[TrafficLight] = None
    region: Optional[str] = None

    def __post_init__(self) -> None:
        if self.t_from is not None and self.t_to is not None and self.t_from > self.t_to:
            raise InvalidRange(f"time range start {self.t_from} after end {self.t_to}")

    def matches(self, record: TestRecord) -> bool:
        if self.device_serial is not None and record.device_serial != self.device_serial:
            return False
        if self.color is not None and record.color != self.color:
            return False
        if self.region is not None and record.request.get("region") != self.region:
            return False
        if self.t_from is not None and record.timestamp < self.t_from:
            return False
        if self.t_to is not None and record.timestamp > self.t_to:
            return False
        return True
