"""Deterministic fleet runner: devices, transports, and platform on one clock.

A Simulation owns the message bus, radio gateway, record store, and any
number of emulated devices, each attached through the adapter matching its
configured link. `run(until)` advances the shared simulated clock, firing
scheduled operator actions at their exact times; nothing sleeps, so a
615-second field test takes milliseconds and is bit-reproducible per seed.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .device import (
    BrokerLink,
    Device,
    DeviceConfig,
    DeviceError,
    EnvReading,
    LoRaWanLink,
    TestRequest,
    default_sensor_model,
    env_gate,
)
from .ingest import IngestService, RecordStore
from .lpp import encode_test_uplink
from .netsim import (
    Gateway,
    LinkProfile,
    MalformedCommand,
    MessageBus,
    PayloadTooLarge,
    UplinkFrame,
    parse_downlink_command,
    payload_from_result,
    result_to_envelope,
    rpc_request_topic,
    rpc_response_topic,
    telemetry_topic,
)

UPLINK_FPORT = 2

DEFAULT_REAGENTS = (("ninhydrin", 5.0), ("sodium molybdate", 5.0))


class ScenarioError(ValueError):
    """Scenario document or run request is not usable."""


@dataclass(frozen=True)
class Action:
    """One scheduled operator/platform action."""

    at: float
    order: int
    kind: str  # start | manualTest | selfTest | ambient
    serial: str
    request: Optional[TestRequest] = None
    concentration: Optional[float] = None
    env: Optional[EnvReading] = None


class BrokerAdapter:
    """Device side of the always-on broker link."""

    link_kind = "broker"

    def __init__(self, device: Device, bus: MessageBus, log,
                 lock: Optional[threading.RLock] = None) -> None:
        self.device = device
        self.bus = bus
        self.log = log
        self.lock = lock if lock is not None else threading.RLock()
        bus.subscribe(rpc_request_topic(device.serial), self._on_request)

    def _on_request(self, msg) -> None:
        with self.lock:
            response = self.device.handle_command_line(msg.payload.decode("utf-8"))
        self.log("rpc", serial=self.device.serial, response=json.loads(response))
        self.bus.publish(rpc_response_topic(self.device.serial),
                         response.encode("utf-8"))

    def pump(self, now: float) -> None:
        try:
            result = self.device.take_transmission()
        except DeviceError:
            return
        envelope = result_to_envelope(result)
        self.bus.publish_json(telemetry_topic(self.device.serial), envelope.to_dict())
        self.device.notify_delivered(True)
        self.log("uplink", serial=self.device.serial, link="broker",
                 seq=result.seq, delivered=True)


class LoRaWanAdapter:
    """Device side of the radio link: polls downlinks, frames uplinks."""

    link_kind = "lorawan"

    def __init__(self, device: Device, gateway: Gateway, log,
                 lock: Optional[threading.RLock] = None) -> None:
        self.device = device
        self.gateway = gateway
        self.log = log
        self.lock = lock if lock is not None else threading.RLock()
        self.eui = device.config.link.device_eui
        self.counter = 0

    def pump(self, now: float) -> None:
        for frame in self.gateway.collect_downlinks(self.eui):
            try:
                command = parse_downlink_command(
                    frame.payload, instrument=self.device.config.policy.instrument)
            except MalformedCommand as exc:
                self.log("downlink_rejected", serial=self.device.serial,
                         detail=str(exc))
                continue
            with self.lock:
                response = self.device.handle_command(command)
            self.log("downlink", serial=self.device.serial, response=response)

        try:
            result = self.device.take_transmission()
        except DeviceError:
            return
        frame = UplinkFrame(
            device_eui=self.eui,
            fport=UPLINK_FPORT,
            payload=encode_test_uplink(payload_from_result(result)),
            counter=self.counter,
            received_at=now,
        )
        self.counter += 1
        try:
            outcome = self.gateway.forward(frame)
        except PayloadTooLarge as exc:
            self.device.notify_delivered(False)
            self.log("uplink_rejected", serial=self.device.serial, detail=str(exc))
            return
        self.device.notify_delivered(outcome.delivered)
        self.log("uplink", serial=self.device.serial, link="lorawan",
                 seq=result.seq, delivered=outcome.delivered, reason=outcome.reason,
                 delay_ms=outcome.delay_ms)


Adapter = Union[BrokerAdapter, LoRaWanAdapter]


class Simulation:
    def __init__(
        self,
        data_dir: str | Path,
        *,
        seed: int = 0,
        loss_probability: float = 0.0,
        delay_ms_range: tuple[float, float] = (0.0, 0.0),
    ) -> None:
        self.now = 0.0
        self.lock = threading.RLock()  # serialize device access across threads
        self.bus = MessageBus()
        self.gateway = Gateway(
            LinkProfile(loss_probability=loss_probability,
                        delay_ms_range=delay_ms_range),
            seed=seed,
        )
        self.store = RecordStore(data_dir)
        self.service = IngestService(self.store, bus=self.bus,
                                     gateway=self.gateway, clock=lambda: self.now)
        self.devices: dict[str, Device] = {}
        self.adapters: dict[str, Adapter] = {}
        self.log: list[dict] = []
        self._actions: list[Action] = []
        self._order = 0
        self._sample_counts: dict[str, int] = {}

    # ------------------------------------------------------------- building

    def _log(self, kind: str, **fields) -> None:
        self.log.append({"at": self.now, "kind": kind, **fields})

    def add_device(
        self,
        serial: str,
        link_kind: str = "lorawan",
        *,
        seed: int = 0,
        noise_rel: float = 0.12,
        location: tuple[float, float, float] = (-31.4, -64.2, 400.0),
        battery_pct: float = 100.0,
        device_eui: Optional[str] = None,
    ) -> Device:
        if serial in self.devices:
            raise ScenarioError(f"duplicate device serial: {serial}")
        if link_kind == "lorawan":
            eui = device_eui or f"eui-{serial.lower()}"
            link = LoRaWanLink(device_eui=eui, app_key="sim-key")
        elif link_kind == "broker":
            eui = None
            link = BrokerLink(ssid="field-net", secret="sim", endpoint="mqtt://sim")
        else:
            raise ScenarioError(f"unknown link kind: {link_kind!r}")

        device = Device(
            DeviceConfig(serial=serial, link=link, location=location),
            sensor=default_sensor_model(noise_rel=noise_rel, seed=seed),
            seed=seed,
            battery_pct=battery_pct,
        )
        if device.clock < self.now:
            device.tick(self.now)
        self.devices[serial] = device
        if link_kind == "lorawan":
            self.adapters[serial] = LoRaWanAdapter(device, self.gateway,
                                                   self._log, self.lock)
        else:
            self.adapters[serial] = BrokerAdapter(device, self.bus,
                                                  self._log, self.lock)
        self.service.register_device(serial, link_kind, device_eui=eui,
                                     policy=device.config.policy)
        self._push_status(serial)
        self._log("device_added", serial=serial, link=link_kind)
        return device

    def schedule(self, at: float, kind: str, serial: str, *,
                 request: Optional[TestRequest] = None,
                 concentration: Optional[float] = None,
                 env: Optional[EnvReading] = None) -> None:
        if kind not in ("start", "manualTest", "selfTest", "ambient"):
            raise ScenarioError(f"unknown action kind: {kind!r}")
        if serial not in self.devices:
            raise ScenarioError(f"schedule references unknown device: {serial}")
        self._actions.append(Action(at=float(at), order=self._order, kind=kind,
                                    serial=serial, request=request,
                                    concentration=concentration, env=env))
        self._order += 1

    def default_request(self, serial: str, *, source: str = "river",
                        region: str = "") -> TestRequest:
        n = self._sample_counts.get(serial, 0)
        self._sample_counts[serial] = n + 1
        return TestRequest(
            sample_id=f"{serial}-S{n:03d}",
            source=source,
            reagents=DEFAULT_REAGENTS,
            region=region,
        )

    # -------------------------------------------------------------- running

    def run(self, until: float, step: float = 1.0) -> None:
        """Advance to `until`, firing scheduled actions at their exact times."""
        if until < self.now:
            raise ScenarioError(f"cannot run backwards: now={self.now}, until={until}")
        if step <= 0:
            raise ScenarioError(f"step must be positive: {step}")
        queue = sorted(self._actions, key=lambda a: (a.at, a.order))
        self._actions = []
        i = 0
        while True:
            while i < len(queue) and queue[i].at <= self.now:
                self._fire(queue[i])
                i += 1
            if self.now >= until:
                break
            boundary = min(until, self.now + step)
            if i < len(queue) and self.now < queue[i].at < boundary:
                boundary = queue[i].at
            self._advance_to(boundary)
        self._actions = list(queue[i:])  # anything scheduled past `until`

    def _advance_to(self, t: float) -> None:
        self.now = t
        for serial in sorted(self.devices):
            device = self.devices[serial]
            device.tick(t)
            self.adapters[serial].pump(t)
            self._push_status(serial)

    def _push_status(self, serial: str) -> None:
        device = self.devices[serial]
        self.service.update_device_status(
            serial,
            phase=device.phase.value,
            battery_pct=device.battery_pct,
            env_ok=not env_gate(device.ambient_env),
        )

    def _fire(self, action: Action) -> None:
        device = self.devices[action.serial]
        if action.kind == "ambient":
            if action.env is None:
                raise ScenarioError("ambient action needs an env reading")
            device.set_ambient(action.env)
            self._log("ambient", serial=action.serial, env=action.env.to_dict())
        elif action.kind == "start":
            if action.concentration is not None:
                device.load_sample(action.concentration)
            request = action.request or self.default_request(action.serial)
            outcome = device.start_test(request, env=action.env)
            self._log("start", serial=action.serial, accepted=outcome.accepted,
                      violations=list(outcome.violations))
        elif action.kind == "manualTest":
            dispatch = self.service.trigger_manual_test(action.serial)
            self._log("dispatch", serial=action.serial,
                      correlation_id=dispatch.correlation_id)
        elif action.kind == "selfTest":
            report = device.self_test()
            self._log("self_test", serial=action.serial, report=report)

    # -------------------------------------------------------------- reports

    def summary(self) -> dict:
        outcomes = [o.reason for _, o in self.gateway.forward_log]
        return {
            "simulated_seconds": self.now,
            "devices": {
                s: {"phase": d.phase.value,
                    "battery_pct": round(d.battery_pct, 3),
                    "fault_reason": d.fault_reason}
                for s, d in sorted(self.devices.items())
            },
            "records": len(self.store),
            "alarms": {
                "critical": len(self.store.alarms(severity="critical")),
                "advisory": len(self.store.alarms(severity="advisory")),
            },
            "radio": {
                "delivered": outcomes.count("delivered"),
                "lost": outcomes.count("loss"),
                "duplicate": outcomes.count("duplicate"),
            },
            "rejected_envelopes": len(self.service.rejected_envelopes),
            "events": len(self.log),
        }

    def close(self) -> None:
        self.store.close()


# ---------------------------------------------------------------- scenarios


def _parse_env(doc: dict) -> EnvReading:
    return EnvReading(
        temperature_c=float(doc["temperature_c"]),
        humidity_pct=float(doc["humidity_pct"]),
        accel_g=tuple(doc.get("accel_g", (0.0, 0.0, 1.0))),
    )


def _parse_request(doc: dict, serial: str, index: int) -> TestRequest:
    return TestRequest(
        sample_id=doc.get("sample_id", f"{serial}-S{index:03d}"),
        source=doc.get("source", "river"),
        reagents=tuple((n, float(q)) for n, q in
                       doc.get("reagents", DEFAULT_REAGENTS)),
        agrochemical=doc.get("agrochemical", "glyphosate"),
        country=doc.get("country", ""),
        region=doc.get("region", ""),
        city=doc.get("city", ""),
        requested_by=doc.get("requested_by", ""),
    )


def simulation_from_scenario(doc: dict, data_dir: str | Path) -> tuple["Simulation", float, float]:
    """Build a Simulation from a scenario document.

    Returns (simulation, duration_s, step_s). Document shape:

        {"seed": 0,
         "link": {"loss_probability": 0.0, "delay_ms_range": [0, 0]},
         "duration_s": 700, "step_s": 5,
         "devices": [{"serial": "SG-01", "link_kind": "lorawan", "seed": 1,
                      "noise_rel": 0.12, "location": [lat, lon, alt],
                      "battery_pct": 100}],
         "schedule": [{"at": 0, "device": "SG-01", "action": "start",
                       "concentration": 600.0,
                       "request": {"sample_id": "...", "source": "river",
                                   "region": "...", "reagents": [["ninhydrin", 5.0]]},
                       "env": {"temperature_c": 22, "humidity_pct": 55}}]}

    Unknown keys raise ScenarioError so typos fail loudly.
    """
    known_top = {"seed", "link", "duration_s", "step_s", "devices", "schedule",
                 "comment"}
    unknown = set(doc) - known_top
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")

    link = doc.get("link", {})
    try:
        sim = Simulation(
            data_dir,
            seed=int(doc.get("seed", 0)),
            loss_probability=float(link.get("loss_probability", 0.0)),
            delay_ms_range=tuple(link.get("delay_ms_range", (0.0, 0.0))),
        )
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None

    try:
        for d in doc.get("devices", []):
            sim.add_device(
                d["serial"],
                d.get("link_kind", "lorawan"),
                seed=int(d.get("seed", 0)),
                noise_rel=float(d.get("noise_rel", 0.12)),
                location=tuple(d.get("location", (-31.4, -64.2, 400.0))),
                battery_pct=float(d.get("battery_pct", 100.0)),
                device_eui=d.get("device_eui"),
            )
        for index, s in enumerate(doc.get("schedule", [])):
            action = s.get("action", "start")
            serial = s["device"]
            request = None
            if action == "start" and "request" in s:
                request = _parse_request(s["request"], serial, index)
            elif action == "start":
                request = _parse_request({}, serial, index)
            env = _parse_env(s["env"]) if "env" in s else None
            sim.schedule(
                float(s["at"]), action, serial,
                request=request,
                concentration=(float(s["concentration"])
                               if "concentration" in s else None),
                env=env,
            )
    except KeyError as exc:
        sim.close()
        raise ScenarioError(f"scenario entry missing key: {exc}") from None
    except (TypeError, ValueError) as exc:
        sim.close()
        raise ScenarioError(str(exc)) from None

    return sim, float(doc.get("duration_s", 700.0)), float(doc.get("step_s", 5.0))
