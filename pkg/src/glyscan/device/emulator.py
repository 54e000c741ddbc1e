"""Firmware stand-in: modes, environmental gating, and the timed test sequence.

One Device instance is one sequential state machine driven by an injected
simulated clock. A water test runs Idle -> Preprocessing (reagent
reaction, 600 s) -> Measuring (sensor read, 15 s) -> Transmitting ->
Idle; any state can drop to Fault. Results surface on a local control
channel (newline-delimited JSON) and, in auto mode, as an outbound
transmission for whichever link is configured.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from ..spectral import Spectrum, TrafficLight, TrafficLightPolicy, classify, predict
from .config import DeviceConfig, InvalidConfig, Link, link_from_dict
from .sensor import SensorModel, default_sensor_model, interpolate_clean, simulate_spectrum

PREPROCESS_SECONDS = 600.0
MEASURE_SECONDS = 15.0
TEST_DURATION_SECONDS = PREPROCESS_SECONDS + MEASURE_SECONDS

TEMPERATURE_RANGE_C = (20.0, 24.0)
HUMIDITY_RANGE_PCT = (40.0, 70.0)
TILT_LIMIT_DEG = 10.0

#: full charge lasts 24 h of active (non-idle) operation
BATTERY_SECONDS_PER_PCT = 864.0

WATER_SOURCES = ("river", "lake", "city water", "well", "other")


class Phase(enum.Enum):
    IDLE = "idle"
    PREPROCESSING = "preprocessing"
    MEASURING = "measuring"
    TRANSMITTING = "transmitting"
    FAULT = "fault"


#: the only legal phase transitions (besides any -> FAULT)
ALLOWED_TRANSITIONS = frozenset(
    {
        (Phase.IDLE, Phase.PREPROCESSING),
        (Phase.PREPROCESSING, Phase.MEASURING),
        (Phase.MEASURING, Phase.TRANSMITTING),
        (Phase.TRANSMITTING, Phase.IDLE),
        (Phase.IDLE, Phase.TRANSMITTING),  # diagnostic self-test, no wet chemistry
    }
)


class Mode(enum.Enum):
    MANUAL = "manual"
    AUTO = "auto"


class DeviceError(Exception):
    """Base for command/state errors raised by the device."""


class Busy(DeviceError):
    pass


class WrongMode(DeviceError):
    pass


class ClockWentBackwards(DeviceError):
    pass


class NoSampleLoaded(DeviceError):
    pass


@dataclass(frozen=True)
class EnvReading:
    """Ambient conditions at the holder: degC, %RH, and orientation in G."""

    temperature_c: float
    humidity_pct: float
    accel_g: tuple[float, float, float]

    def __post_init__(self) -> None:
        if not 0.0 <= self.humidity_pct <= 100.0:
            raise ValueError(f"humidity out of [0, 100]: {self.humidity_pct}")
        if len(self.accel_g) != 3:
            raise ValueError("accel must be a 3-vector")
        object.__setattr__(self, "accel_g", tuple(float(v) for v in self.accel_g))

    def to_dict(self) -> dict:
        return {
            "temperature_c": self.temperature_c,
            "humidity_pct": self.humidity_pct,
            "accel_g": list(self.accel_g),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnvReading":
        return cls(
            temperature_c=float(d["temperature_c"]),
            humidity_pct=float(d["humidity_pct"]),
            accel_g=tuple(d["accel_g"]),
        )


DEFAULT_ENV = EnvReading(temperature_c=22.0, humidity_pct=55.0, accel_g=(0.0, 0.0, 1.0))


@dataclass(frozen=True)
class TestRequest:
    """Operator-entered context for one water test."""

    __test__ = False  # domain type, not a pytest class

    sample_id: str
    source: str
    reagents: tuple[tuple[str, float], ...]
    agrochemical: str = "glyphosate"
    country: str = ""
    region: str = ""
    city: str = ""
    requested_by: str = ""

    def __post_init__(self) -> None:
        if self.source not in WATER_SOURCES:
            raise ValueError(f"source must be one of {WATER_SOURCES}, got {self.source!r}")
        if not self.reagents:
            raise ValueError("a colorimetric test needs at least one reagent")
        object.__setattr__(
            self, "reagents", tuple((str(n), float(mg)) for n, mg in self.reagents)
        )

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "source": self.source,
            "reagents": [list(r) for r in self.reagents],
            "agrochemical": self.agrochemical,
            "country": self.country,
            "region": self.region,
            "city": self.city,
            "requested_by": self.requested_by,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TestRequest":
        return cls(
            sample_id=d["sample_id"],
            source=d["source"],
            reagents=tuple((n, mg) for n, mg in d["reagents"]),
            agrochemical=d.get("agrochemical", "glyphosate"),
            country=d.get("country", ""),
            region=d.get("region", ""),
            city=d.get("city", ""),
            requested_by=d.get("requested_by", ""),
        )


def tilt_degrees(accel_g: tuple[float, float, float]) -> float:
    """Angle between the acceleration vector and straight-down gravity.

    A device sitting level reads roughly (0, 0, 1); an upside-down or
    free-falling device is never "level".
    """
    x, y, z = accel_g
    norm = math.sqrt(x * x + y * y + z * z)
    if norm == 0.0:
        return 180.0
    return math.degrees(math.acos(max(-1.0, min(1.0, z / norm))))


def env_gate(env: EnvReading) -> tuple[str, ...]:
    """Empty tuple when sampling conditions are acceptable, else the violations."""
    violations = []
    if not TEMPERATURE_RANGE_C[0] <= env.temperature_c <= TEMPERATURE_RANGE_C[1]:
        violations.append("TemperatureOutOfRange")
    if not HUMIDITY_RANGE_PCT[0] <= env.humidity_pct <= HUMIDITY_RANGE_PCT[1]:
        violations.append("HumidityOutOfRange")
    if tilt_degrees(env.accel_g) > TILT_LIMIT_DEG:
        violations.append("NotLevel")
    return tuple(violations)


@dataclass(frozen=True)
class ManualTestTrigger:
    requested_by: str = "remote"


@dataclass(frozen=True)
class SetLink:
    link: Link


@dataclass(frozen=True)
class SetPolicy:
    policy: TrafficLightPolicy


Command = object  # ManualTestTrigger | SetLink | SetPolicy


@dataclass(frozen=True)
class StartOutcome:
    accepted: bool
    violations: tuple[str, ...] = ()


@dataclass(frozen=True)
class DeviceTestResult:
    """One finished measurement, ready for local display and transmission."""

    seq: int
    device_serial: str
    request: TestRequest
    started_at: float
    completed_at: float
    spectrum: Spectrum
    env: EnvReading
    location: tuple[float, float, float]
    predicted_mg_l: float
    color: TrafficLight
    diagnostic: bool = False

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "device_serial": self.device_serial,
            "request": self.request.to_dict(),
            "started_at": self.started_at,
            "completed_at": self.completed_at,
            "spectrum": {str(nm): v for nm, v in self.spectrum.as_dict().items()},
            "env": self.env.to_dict(),
            "location": list(self.location),
            "predicted_mg_l": self.predicted_mg_l,
            "color": self.color.label,
            "diagnostic": self.diagnostic,
        }


@dataclass(frozen=True)
class DeviceEvent:
    """One line on the local control channel (display/beeper/app stand-in)."""

    at: float
    kind: str
    severity: str
    text: str
    data: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {"at": self.at, "kind": self.kind, "severity": self.severity,
             "text": self.text, "data": self.data},
            sort_keys=True,
        )


_SELF_TEST_REQUEST = TestRequest(
    sample_id="self-test",
    source="other",
    reagents=(("reference target", 0.0),),
    agrochemical="none",
    requested_by="self-test",
)

_REMOTE_REAGENTS = (("ninhydrin", 5.0), ("sodium molybdate", 5.0))


class Device:
    """Sequential device emulator; drive it with commands and a monotone clock.

    Callers must serialize access (one command/tick at a time), matching a
    single-threaded microcontroller loop.
    """

    def __init__(
        self,
        config: DeviceConfig,
        sensor: Optional[SensorModel] = None,
        mode: Mode = Mode.AUTO,
        seed: int = 0,
        battery_pct: float = 100.0,
        config_path: Optional[str | Path] = None,
    ) -> None:
        self.config = config
        self.sensor = sensor if sensor is not None else default_sensor_model()
        self.mode = mode
        self.battery_pct = float(battery_pct)
        self.config_path = Path(config_path) if config_path is not None else None

        self.phase = Phase.IDLE
        self.fault_reason: Optional[str] = None
        self.clock = 0.0
        self.ambient_env: EnvReading = DEFAULT_ENV
        self.last_delivery_ok: Optional[bool] = None

        self._rng = np.random.default_rng(seed)
        self._next_seq = 0
        self._phase_started_at = 0.0
        self._active_request: Optional[TestRequest] = None
        self._active_env: Optional[EnvReading] = None
        self._active_concentration: Optional[float] = None
        self._loaded_concentration: Optional[float] = None
        self._pending: Optional[DeviceTestResult] = None
        self._events: list[DeviceEvent] = []

    # ------------------------------------------------------------------ state

    @property
    def serial(self) -> str:
        return self.config.serial

    @property
    def pending_transmission(self) -> Optional[DeviceTestResult]:
        return self._pending

    def event_log_lines(self) -> list[str]:
        return [e.to_json() for e in self._events]

    def load_sample(self, concentration: float) -> None:
        """Place water (with its true concentration) into the holder."""
        if concentration < 0:
            raise ValueError(f"concentration must be >= 0, got {concentration}")
        self._loaded_concentration = float(concentration)

    def set_ambient(self, env: EnvReading) -> None:
        self.ambient_env = env

    def _emit(self, kind: str, severity: str, text: str, data: Optional[dict] = None) -> DeviceEvent:
        ev = DeviceEvent(at=self.clock, kind=kind, severity=severity, text=text,
                         data=data or {})
        self._events.append(ev)
        return ev

    def _enter(self, phase: Phase, events: list[DeviceEvent], reason: str = "") -> None:
        prev = self.phase
        if phase is not Phase.FAULT and (prev, phase) not in ALLOWED_TRANSITIONS:
            raise AssertionError(f"illegal transition {prev} -> {phase}")
        self.phase = phase
        self._phase_started_at = self.clock
        data = {"from": prev.value, "to": phase.value}
        if reason:
            data["reason"] = reason
            self.fault_reason = reason if phase is Phase.FAULT else None
        events.append(self._emit("phase", "info" if phase is not Phase.FAULT else "error",
                                 f"{prev.value} -> {phase.value}", data))

    # ------------------------------------------------------------------ clock

    def tick(self, now: float) -> list[DeviceEvent]:
        """Advance the simulated clock, firing any due phase transitions."""
        if now < self.clock:
            raise ClockWentBackwards(f"clock moved from {self.clock} to {now}")
        events: list[DeviceEvent] = []
        while self.clock < now:
            deadline = self._phase_deadline()
            step_end = min(now, deadline) if deadline is not None else now
            if not self._drain_battery(step_end - self.clock, events):
                break
            self.clock = step_end
            if deadline is not None and self.clock >= deadline:
                self._on_deadline(events)
        else:
            # zero-length tick still counts as observing the clock
            self.clock = now
        return events

    def _phase_deadline(self) -> Optional[float]:
        if self.phase is Phase.PREPROCESSING:
            return self._phase_started_at + PREPROCESS_SECONDS
        if self.phase is Phase.MEASURING:
            return self._phase_started_at + MEASURE_SECONDS
        return None

    def _drain_battery(self, seconds: float, events: list[DeviceEvent]) -> bool:
        """Returns False if power ran out inside this interval."""
        if self.phase in (Phase.IDLE, Phase.FAULT) or seconds <= 0:
            return True
        drain = seconds / BATTERY_SECONDS_PER_PCT
        if drain < self.battery_pct:
            self.battery_pct -= drain
            return True
        self.clock += self.battery_pct * BATTERY_SECONDS_PER_PCT
        self.battery_pct = 0.0
        self._pending = None
        self._clear_active_test()
        self._enter(Phase.FAULT, events, reason="PowerLoss")
        return False

    def _on_deadline(self, events: list[DeviceEvent]) -> None:
        if self.phase is Phase.PREPROCESSING:
            self._enter(Phase.MEASURING, events)
        elif self.phase is Phase.MEASURING:
            self._finish_measurement(events)

    def _finish_measurement(self, events: list[DeviceEvent]) -> None:
        assert self._active_request is not None
        assert self._active_env is not None
        assert self._active_concentration is not None
        spectrum = simulate_spectrum(self.sensor, self._active_concentration, rng=self._rng)
        result = self._build_result(
            request=self._active_request,
            env=self._active_env,
            spectrum=spectrum,
            started_at=self._phase_started_at - PREPROCESS_SECONDS,
            completed_at=self.clock,
            diagnostic=False,
        )
        self._clear_active_test()
        # local readout happens even if the uplink later fails
        events.append(self._emit("result", "info",
                                 f"test {result.seq}: {result.color.label} "
                                 f"({result.predicted_mg_l:.2f})",
                                 result.to_dict()))
        self._pending = result
        self._enter(Phase.TRANSMITTING, events)

    def _clear_active_test(self) -> None:
        self._active_request = None
        self._active_env = None
        self._active_concentration = None

    def _build_result(self, request: TestRequest, env: EnvReading, spectrum: Spectrum,
                      started_at: float, completed_at: float, diagnostic: bool) -> DeviceTestResult:
        value = predict(self.config.model, spectrum)
        color = classify(self.config.policy, value)
        seq = self._next_seq
        self._next_seq += 1
        return DeviceTestResult(
            seq=seq,
            device_serial=self.config.serial,
            request=request,
            started_at=started_at,
            completed_at=completed_at,
            spectrum=spectrum,
            env=env,
            location=self.config.location,
            predicted_mg_l=float(value),
            color=color,
            diagnostic=diagnostic,
        )

    # ------------------------------------------------------------------ tests

    def start_test(
        self,
        request: TestRequest,
        env: Optional[EnvReading] = None,
        concentration: Optional[float] = None,
    ) -> StartOutcome:
        """Begin the timed test sequence at the current clock.

        `concentration` is the true (hidden) property of the loaded water;
        it defaults to whatever `load_sample` placed in the holder.
        """
        if self.mode is not Mode.AUTO:
            raise WrongMode("start_test requires auto mode")
        if self.phase is Phase.FAULT:
            raise Busy(f"device is in fault state ({self.fault_reason})")
        if self.phase is not Phase.IDLE:
            raise Busy(f"a test is in flight (phase {self.phase.value})")

        env = env if env is not None else self.ambient_env
        if concentration is None:
            concentration = self._loaded_concentration
        if concentration is None:
            raise NoSampleLoaded("no water sample loaded")

        violations = env_gate(env)
        if violations:
            self._emit("reject", "warning",
                       "test rejected: " + ", ".join(violations),
                       {"sample_id": request.sample_id, "violations": list(violations)})
            return StartOutcome(accepted=False, violations=violations)

        self._active_request = request
        self._active_env = env
        self._active_concentration = float(concentration)
        events: list[DeviceEvent] = []
        self._enter(Phase.PREPROCESSING, events)
        return StartOutcome(accepted=True)

    def manual_read(self, concentration: Optional[float] = None,
                    env: Optional[EnvReading] = None) -> DeviceTestResult:
        """Immediate local sensor read (reaction already done off-device).

        Available only in manual mode; the result goes to the local channel
        and is never transmitted.
        """
        if self.mode is not Mode.MANUAL:
            raise WrongMode("manual_read requires manual mode")
        if concentration is None:
            concentration = self._loaded_concentration
        if concentration is None:
            raise NoSampleLoaded("no water sample loaded")
        spectrum = simulate_spectrum(self.sensor, float(concentration), rng=self._rng)
        result = self._build_result(
            request=replace(_SELF_TEST_REQUEST, sample_id="manual", requested_by="operator"),
            env=env if env is not None else self.ambient_env,
            spectrum=spectrum,
            started_at=self.clock,
            completed_at=self.clock,
            diagnostic=False,
        )
        self._emit("result", "info",
                   f"manual read {result.seq}: {result.color.label} "
                   f"({result.predicted_mg_l:.2f})",
                   result.to_dict())
        return result

    def self_test(self) -> dict:
        """Run a diagnostic on a fixed reference spectrum, end to end.

        The reference is the noise-free blank-water response, so the expected
        outcome is a Negative classification. In auto mode the frame also
        goes out over the link, flagged diagnostic so the platform will not
        treat it as a field sample.
        """
        if self.phase not in (Phase.IDLE, Phase.FAULT):
            raise Busy(f"cannot self-test in phase {self.phase.value}")
        spectrum = interpolate_clean(self.sensor, 0.0)
        result = self._build_result(
            request=_SELF_TEST_REQUEST,
            env=self.ambient_env,
            spectrum=spectrum,
            started_at=self.clock,
            completed_at=self.clock,
            diagnostic=True,
        )
        report = {
            "seq": result.seq,
            "color": result.color.label,
            "predicted_mg_l": result.predicted_mg_l,
            "battery_pct": self.battery_pct,
            "link_kind": self.config.link.kind,
            "last_delivery_ok": self.last_delivery_ok,
            "transmitting": False,
        }
        events: list[DeviceEvent] = []
        if self.mode is Mode.AUTO and self.phase is Phase.IDLE:
            self._pending = result
            self._enter(Phase.TRANSMITTING, events)
            report["transmitting"] = True
        self._emit("selftest", "info",
                   f"self test {result.seq}: {result.color.label}", dict(report))
        return report

    # ------------------------------------------------------------- transport

    def take_transmission(self) -> DeviceTestResult:
        """Hand the pending result to the link layer (phase stays Transmitting)."""
        if self._pending is None:
            raise DeviceError("nothing to transmit")
        result = self._pending
        self._pending = None
        return result

    def notify_delivered(self, ok: bool = True) -> list[DeviceEvent]:
        """Link layer reports the transmission attempt finished; back to Idle."""
        if self.phase is not Phase.TRANSMITTING:
            raise DeviceError(f"not transmitting (phase {self.phase.value})")
        self.last_delivery_ok = ok
        events: list[DeviceEvent] = []
        self._emit("delivered" if ok else "delivery_failed",
                   "info" if ok else "warning",
                   "uplink delivered" if ok else "uplink lost", {})
        self._pending = None
        self._enter(Phase.IDLE, events)
        return events

    # -------------------------------------------------------------- commands

    def set_mode(self, mode: Mode) -> None:
        if self.phase not in (Phase.IDLE, Phase.FAULT):
            raise Busy("cannot change mode mid-test")
        self.mode = mode
        self._emit("mode", "info", f"mode set to {mode.value}", {"mode": mode.value})

    def handle_command(self, cmd: Command) -> dict:
        """Apply one control-channel command; returns a JSON-able response."""
        try:
            if isinstance(cmd, ManualTestTrigger):
                request = TestRequest(
                    sample_id=f"remote-{self._next_seq}",
                    source="other",
                    reagents=_REMOTE_REAGENTS,
                    requested_by=cmd.requested_by,
                )
                outcome = self.start_test(request)
                if not outcome.accepted:
                    return {"ok": False, "error": "EnvViolation",
                            "detail": list(outcome.violations)}
                return {"ok": True, "result": {"accepted": True, "seq": self._next_seq}}
            if isinstance(cmd, SetLink):
                self.config = replace(self.config, link=cmd.link)
                self._persist_config()
                self._emit("config", "info", f"link set to {cmd.link.kind}",
                           {"link": cmd.link.to_dict()})
                return {"ok": True, "result": {"link": cmd.link.kind}}
            if isinstance(cmd, SetPolicy):
                self.config = replace(self.config, policy=cmd.policy)
                self._persist_config()
                self._emit("config", "info", "classification thresholds updated",
                           {"policy": cmd.policy.to_dict()})
                return {"ok": True, "result": {"policy": cmd.policy.to_dict()}}
            return {"ok": False, "error": "UnknownCommand",
                    "detail": type(cmd).__name__}
        except (Busy, WrongMode, NoSampleLoaded) as exc:
            return {"ok": False, "error": type(exc).__name__, "detail": str(exc)}
        except (InvalidConfig, ValueError) as exc:
            return {"ok": False, "error": "InvalidConfig", "detail": str(exc)}

    def handle_command_line(self, line: str) -> str:
        """Local control channel: one JSON command in, one JSON response out."""
        try:
            msg = json.loads(line)
            method = msg["method"]
            params = msg.get("params", {})
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            return json.dumps({"ok": False, "error": "BadRequest", "detail": str(exc)},
                              sort_keys=True)

        try:
            if method == "manualTest":
                resp = self.handle_command(
                    ManualTestTrigger(requested_by=params.get("requested_by", "remote")))
            elif method == "setLink":
                resp = self.handle_command(SetLink(link=link_from_dict(params)))
            elif method == "setPolicy":
                resp = self.handle_command(SetPolicy(
                    policy=TrafficLightPolicy.from_dict(params)))
            elif method == "selfTest":
                resp = {"ok": True, "result": self.self_test()}
            elif method == "setMode":
                self.set_mode(Mode(params["mode"]))
                resp = {"ok": True, "result": {"mode": self.mode.value}}
            elif method == "status":
                resp = {"ok": True, "result": self.status()}
            else:
                resp = {"ok": False, "error": "UnknownCommand", "detail": method}
        except (Busy, WrongMode, NoSampleLoaded) as exc:
            resp = {"ok": False, "error": type(exc).__name__, "detail": str(exc)}
        except (InvalidConfig, ValueError, KeyError) as exc:
            resp = {"ok": False, "error": "InvalidConfig", "detail": str(exc)}
        if "id" in msg:
            resp["id"] = msg["id"]  # caller's correlation id, echoed verbatim
        return json.dumps(resp, sort_keys=True)

    def status(self) -> dict:
        return {
            "serial": self.config.serial,
            "phase": self.phase.value,
            "mode": self.mode.value,
            "battery_pct": self.battery_pct,
            "clock": self.clock,
            "link_kind": self.config.link.kind,
            "fault_reason": self.fault_reason,
            "env_ok": not env_gate(self.ambient_env),
        }

    def _persist_config(self) -> None:
        if self.config_path is not None:
            self.config.save(self.config_path)
