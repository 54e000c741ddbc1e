"""Uplink/downlink converters between device byte frames and platform JSON.

The uplink converter names and types every field of the binary layout;
frames that do not decode produce an error-flagged envelope (never an
exception) and are retained for audit. The downlink converter turns
platform command JSON into the wire format of `frames`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from ..lpp import (
    CH_ACCEL,
    CH_CLAMP,
    CH_COLOR,
    CH_DIAGNOSTIC,
    CH_GPS,
    CH_HUMIDITY,
    CH_SEQ,
    CH_TEMPERATURE,
    CH_VALUE_HUNDREDS,
    CH_VALUE_REMAINDER,
    SPECTRAL_CHANNEL_BASE,
    LppKind,
    UplinkPayload,
    decode,
)
from ..spectral import SUPPORTED_WAVELENGTHS_NM, TrafficLight
from .frames import (
    COMMAND_FPORT,
    OPCODE_MANUAL_TEST,
    DownlinkFrame,
    TelemetryEnvelope,
    UplinkFrame,
    encode_policy_payload,
)

_SPECTRAL_NAME = {
    SPECTRAL_CHANNEL_BASE + i: f"r{nm}" for i, nm in enumerate(SUPPORTED_WAVELENGTHS_NM)
}


class UnknownCommand(ValueError):
    def __init__(self, method: str) -> None:
        super().__init__(f"unknown command method: {method!r}")
        self.method = method


class _BadFrame(ValueError):
    pass


def _envelope_values(payload: bytes) -> dict:
    """Name every record in the frame; raises _BadFrame on anything invalid."""
    try:
        records = decode(payload)
    except ValueError as exc:
        raise _BadFrame(str(exc)) from None
    if not records:
        raise _BadFrame("empty frame")

    values: dict = {}
    hundreds: Optional[float] = None
    remainder: Optional[float] = None
    for rec in records:
        ch = rec.channel
        if ch in _SPECTRAL_NAME and rec.kind is LppKind.ANALOG_INPUT:
            values[_SPECTRAL_NAME[ch]] = float(rec.value)
        elif ch == CH_TEMPERATURE and rec.kind is LppKind.TEMPERATURE:
            values["temperature_c"] = float(rec.value)
        elif ch == CH_HUMIDITY and rec.kind is LppKind.RELATIVE_HUMIDITY:
            values["humidity_pct"] = float(rec.value)
        elif ch == CH_ACCEL and rec.kind is LppKind.ACCELEROMETER:
            values["accel_x"], values["accel_y"], values["accel_z"] = map(float, rec.value)
        elif ch == CH_GPS and rec.kind is LppKind.GPS:
            values["lat"], values["lon"], values["alt"] = map(float, rec.value)
        elif ch == CH_DIAGNOSTIC and rec.kind is LppKind.DIGITAL_INPUT:
            values["diagnostic"] = bool(rec.value)
        elif ch == CH_CLAMP and rec.kind is LppKind.DIGITAL_INPUT:
            values["clamped"] = bool(rec.value)
        elif ch == CH_COLOR and rec.kind is LppKind.DIGITAL_INPUT:
            try:
                values["color"] = TrafficLight(rec.value).label
            except ValueError:
                raise _BadFrame(f"classification byte out of range: {rec.value}") from None
        elif ch == CH_VALUE_HUNDREDS and rec.kind is LppKind.ANALOG_INPUT:
            hundreds = float(rec.value)
        elif ch == CH_VALUE_REMAINDER and rec.kind is LppKind.ANALOG_INPUT:
            remainder = float(rec.value)
        elif ch == CH_SEQ and rec.kind is LppKind.ANALOG_INPUT:
            values["seq"] = int(round(rec.value * 100))
        else:
            raise _BadFrame(f"unexpected record: channel {ch} kind {rec.kind.name}")

    if (hundreds is None) != (remainder is None):
        raise _BadFrame("predicted-value channels must travel together")
    if hundreds is not None and remainder is not None:
        values["predicted_mg_l"] = round(hundreds * 100) + remainder
    return values


def converter_uplink(frame: UplinkFrame) -> TelemetryEnvelope:
    """Binary uplink to flat JSON telemetry; never raises on frame content."""
    try:
        values = _envelope_values(frame.payload)
    except _BadFrame as exc:
        values = {"decode_error": True, "detail": str(exc)}
    return TelemetryEnvelope(
        device_id=frame.device_eui,
        timestamp=frame.received_at,
        values=values,
    )


@dataclass
class UplinkConverter:
    """converter_uplink plus an audit trail of frames that failed to decode."""

    failures: list[UplinkFrame] = field(default_factory=list)

    def convert(self, frame: UplinkFrame) -> TelemetryEnvelope:
        envelope = converter_uplink(frame)
        if envelope.values.get("decode_error"):
            self.failures.append(frame)
        return envelope


def payload_from_result(result) -> UplinkPayload:
    """Radio-frame payload for a finished measurement (LoRaWAN path)."""
    return UplinkPayload(
        seq=result.seq,
        spectrum=result.spectrum,
        temperature_c=result.env.temperature_c,
        humidity_pct=result.env.humidity_pct,
        accel_g=result.env.accel_g,
        location=result.location,
        color=result.color,
        predicted_mg_l=result.predicted_mg_l,
        diagnostic=result.diagnostic,
    )


def result_to_envelope(result, timestamp: Optional[float] = None) -> TelemetryEnvelope:
    """Full-precision broker-path telemetry for a finished measurement.

    Field names match converter_uplink output so the platform ingests
    both transports identically; the broker path additionally carries
    the operator-entered request context as request_* fields.
    """
    values: dict = {}
    for nm, refl in sorted(result.spectrum.as_dict().items()):
        values[f"r{nm}"] = float(refl)
    values["temperature_c"] = float(result.env.temperature_c)
    values["humidity_pct"] = float(result.env.humidity_pct)
    ax, ay, az = result.env.accel_g
    values["accel_x"], values["accel_y"], values["accel_z"] = float(ax), float(ay), float(az)
    values["lat"], values["lon"], values["alt"] = map(float, result.location)
    values["diagnostic"] = bool(result.diagnostic)
    values["clamped"] = False
    values["color"] = result.color.label
    values["predicted_mg_l"] = float(result.predicted_mg_l)
    values["seq"] = int(result.seq)

    req = result.request.to_dict()
    for key, val in req.items():
        if key == "reagents":
            values["request_reagents"] = json.dumps(val)
        else:
            values[f"request_{key}"] = val

    return TelemetryEnvelope(
        device_id=result.device_serial,
        timestamp=result.completed_at if timestamp is None else timestamp,
        values=values,
    )


def converter_downlink(command: dict, device_eui: str) -> DownlinkFrame:
    """Platform command JSON (`{"method": ..., "params": ...}`) to wire bytes."""
    method = command.get("method")
    params = command.get("params") or {}
    if method == "manualTest":
        payload = bytes([OPCODE_MANUAL_TEST])
    elif method == "setPolicy":
        try:
            payload = encode_policy_payload(
                negative_upper=float(params["negative_upper"]),
                positive_lower=float(params["positive_lower"]),
            )
        except (KeyError, TypeError) as exc:
            raise UnknownCommand(f"setPolicy missing parameter: {exc}") from None
    else:
        raise UnknownCommand(str(method))
    return DownlinkFrame(device_eui=device_eui, fport=COMMAND_FPORT, payload=payload)
