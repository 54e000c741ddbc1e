"""Platform core: envelope ingestion, alarm rules, device registry, RPC dispatch.

Telemetry arrives as flat envelopes from either transport. The service
re-validates environmental bounds, re-classifies from its own stored
policy (the device's reported color is checked, not trusted), persists
durably before acknowledging, and raises alarms for Warning/Positive
field samples.
"""

from __future__ import annotations

import itertools
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..device import EnvReading, env_gate
from ..netsim import (
    Gateway,
    MessageBus,
    TelemetryEnvelope,
    converter_downlink,
    rpc_request_topic,
)
from ..spectral import (
    FIELD_POLICY,
    SUPPORTED_WAVELENGTHS_NM,
    TrafficLight,
    TrafficLightPolicy,
    classify,
)
from .records import (
    LinkUnavailable,
    SchemaViolation,
    TestRecord,
    UnknownDevice,
)
from .store import RecordStore

_REQUEST_KEYS = ("sample_id", "source", "agrochemical", "country", "region",
                 "city", "requested_by")


@dataclass
class RegisteredDevice:
    """Platform-side device shadow."""

    serial: str
    link_kind: str
    device_eui: Optional[str] = None
    policy: TrafficLightPolicy = FIELD_POLICY
    last_seen: Optional[float] = None
    phase: str = "unknown"
    battery_pct: Optional[float] = None
    env_ok: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "serial": self.serial,
            "link_kind": self.link_kind,
            "device_eui": self.device_eui,
            "last_seen": self.last_seen,
            "phase": self.phase,
            "battery_pct": self.battery_pct,
            "env_ok": self.env_ok,
        }


@dataclass
class Dispatch:
    """One platform-to-device command in flight, correlated to its record."""

    correlation_id: str
    device_serial: str
    method: str
    created_at: float
    status: str = "pending"  # pending | acked | matched | failed
    matched_record_id: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "correlation_id": self.correlation_id,
            "device_serial": self.device_serial,
            "method": self.method,
            "created_at": self.created_at,
            "status": self.status,
            "matched_record_id": self.matched_record_id,
        }


class IngestService:
    def __init__(
        self,
        store: RecordStore,
        bus: Optional[MessageBus] = None,
        gateway: Optional[Gateway] = None,
        clock: Callable[[], float] = time.time,
    ) -> None:
        self.store = store
        self.bus = bus
        self.gateway = gateway
        self.clock = clock
        self.devices: dict[str, RegisteredDevice] = {}
        self.dispatches: dict[str, Dispatch] = {}
        self.rejected_envelopes: list[tuple[Optional[TelemetryEnvelope], str]] = []
        self._by_eui: dict[str, str] = {}
        self._dispatch_counter = itertools.count()
        self._write_lock = threading.RLock()  # one serialized writer to the log
        if bus is not None:
            bus.subscribe("v1/devices/+/telemetry", self._on_telemetry)
            bus.subscribe("v1/devices/+/rpc/response", self._on_rpc_response)
        if gateway is not None:
            gateway.on_envelope = self.ingest_lorawan

    # ------------------------------------------------------------- registry

    def register_device(
        self,
        serial: str,
        link_kind: str,
        device_eui: Optional[str] = None,
        policy: Optional[TrafficLightPolicy] = None,
    ) -> RegisteredDevice:
        dev = RegisteredDevice(
            serial=serial,
            link_kind=link_kind,
            device_eui=device_eui,
            policy=policy if policy is not None else FIELD_POLICY,
        )
        self.devices[serial] = dev
        if device_eui:
            self._by_eui[device_eui] = serial
        return dev

    def update_device_status(self, serial: str, phase: Optional[str] = None,
                             battery_pct: Optional[float] = None,
                             env_ok: Optional[bool] = None) -> None:
        dev = self.devices.get(serial)
        if dev is None:
            raise UnknownDevice(serial)
        if phase is not None:
            dev.phase = phase
        if battery_pct is not None:
            dev.battery_pct = battery_pct
        if env_ok is not None:
            dev.env_ok = env_ok

    def _resolve_device(self, device_id: str, link_kind: str) -> RegisteredDevice:
        if device_id in self.devices:
            return self.devices[device_id]
        if device_id in self._by_eui:
            return self.devices[self._by_eui[device_id]]
        # first contact: provision automatically under the transport id
        return self.register_device(
            serial=device_id,
            link_kind=link_kind,
            device_eui=device_id if link_kind == "lorawan" else None,
        )

    # --------------------------------------------------------------- ingest

    def ingest_lorawan(self, envelope: TelemetryEnvelope) -> Optional[TestRecord]:
        """Gateway callback; converter failures are kept, not raised."""
        try:
            return self.ingest_envelope(envelope, link_kind="lorawan")
        except SchemaViolation as exc:
            self.rejected_envelopes.append((envelope, str(exc)))
            return None

    def ingest_envelope(self, envelope: TelemetryEnvelope,
                        link_kind: str = "broker") -> TestRecord:
        with self._write_lock:
            return self._ingest_locked(envelope, link_kind)

    def _ingest_locked(self, envelope: TelemetryEnvelope,
                       link_kind: str) -> TestRecord:
        values = envelope.values
        if values.get("decode_error"):
            raise SchemaViolation(f"undecodable frame: {values.get('detail')}")
        if "seq" not in values:
            raise SchemaViolation("envelope carries no test id (seq)")
        if "predicted_mg_l" not in values:
            raise SchemaViolation("envelope carries no predicted value")

        device = self._resolve_device(envelope.device_id, link_kind)
        test_id = int(values["seq"])

        existing = self.store.get(device.serial, test_id)
        if existing is not None:
            return existing

        value = float(values["predicted_mg_l"])
        server_color = classify(device.policy, value)
        reported = values.get("color")
        color_mismatch = reported is not None and reported != server_color.label

        env = {k: float(values[k]) for k in
               ("temperature_c", "humidity_pct", "accel_x", "accel_y", "accel_z")
               if k in values}
        env_violation = False
        if "temperature_c" in env and "humidity_pct" in env:
            reading = EnvReading(
                temperature_c=env["temperature_c"],
                humidity_pct=env["humidity_pct"],
                accel_g=(env.get("accel_x", 0.0), env.get("accel_y", 0.0),
                         env.get("accel_z", 1.0)),
            )
            env_violation = bool(env_gate(reading))

        spectrum = {nm: float(values[f"r{nm}"])
                    for nm in SUPPORTED_WAVELENGTHS_NM if f"r{nm}" in values}

        gps = None
        if all(k in values for k in ("lat", "lon")):
            gps = (float(values["lat"]), float(values["lon"]),
                   float(values.get("alt", 0.0)))

        request = {k: values[f"request_{k}"] for k in _REQUEST_KEYS
                   if f"request_{k}" in values}
        if "request_reagents" in values:
            request["reagents"] = values["request_reagents"]

        diagnostic = bool(values.get("diagnostic", False))

        record = TestRecord(
            test_id=test_id,
            device_serial=device.serial,
            timestamp=envelope.timestamp,
            link_kind=link_kind,
            predicted_mg_l=value,
            color=server_color,
            spectrum=spectrum,
            env=env,
            gps=gps,
            request=request,
            diagnostic=diagnostic,
            env_violation=env_violation,
            color_mismatch=color_mismatch,
            precision="quantized" if link_kind == "lorawan" else "exact",
        )

        if not diagnostic:
            record = self._correlate(record)

        severity = None
        if not diagnostic:
            if server_color is TrafficLight.POSITIVE:
                severity = "critical"
            elif server_color is TrafficLight.WARNING:
                severity = "advisory"
        self.store.put_record(record, alarm_severity=severity)

        device.last_seen = envelope.timestamp
        return record

    def _correlate(self, record: TestRecord) -> TestRecord:
        pending = [d for d in self.dispatches.values()
                   if d.device_serial == record.device_serial
                   and d.status in ("pending", "acked")]
        if not pending:
            return record
        dispatch = min(pending, key=lambda d: d.created_at)
        dispatch.status = "matched"
        dispatch.matched_record_id = record.record_id
        return record.with_correlation(dispatch.correlation_id)

    # ------------------------------------------------------------------ rpc

    def trigger_manual_test(self, serial: str) -> Dispatch:
        device = self.devices.get(serial)
        if device is None:
            raise UnknownDevice(serial)
        correlation_id = f"cmd-{next(self._dispatch_counter)}"
        dispatch = Dispatch(
            correlation_id=correlation_id,
            device_serial=serial,
            method="manualTest",
            created_at=self.clock(),
        )
        if device.link_kind == "broker":
            if self.bus is None:
                raise LinkUnavailable("no broker bus attached")
            self.dispatches[correlation_id] = dispatch
            self.bus.publish_json(
                rpc_request_topic(serial),
                {"id": correlation_id, "method": "manualTest", "params": {}},
            )
        elif device.link_kind == "lorawan":
            if self.gateway is None:
                raise LinkUnavailable("no gateway attached")
            if not device.device_eui:
                raise LinkUnavailable(f"device {serial} has no EUI on file")
            self.dispatches[correlation_id] = dispatch
            self.gateway.queue_downlink(
                converter_downlink({"method": "manualTest"}, device.device_eui))
        else:
            raise LinkUnavailable(f"unsupported link kind: {device.link_kind}")
        return dispatch

    # ----------------------------------------------------------- bus wiring

    def _on_telemetry(self, msg) -> None:
        try:
            envelope = TelemetryEnvelope.from_dict(msg.json())
            self.ingest_envelope(envelope, link_kind="broker")
        except (SchemaViolation, ValueError, KeyError) as exc:
            self.rejected_envelopes.append((None, f"{msg.topic}: {exc}"))

    def _on_rpc_response(self, msg) -> None:
        try:
            body = msg.json()
        except ValueError:
            return
        dispatch = self.dispatches.get(body.get("id", ""))
        if dispatch is not None and dispatch.status == "pending":
            dispatch.status = "acked" if body.get("ok") else "failed"
