"""Link-layer frame types and the downlink command wire format.

Downlink commands are one opcode byte plus fixed arguments:

======  ===========  =====================================================
opcode  command      arguments
======  ===========  =====================================================
0x01    manualTest   none
0x02    setPolicy    three big-endian signed 32-bit fixed-point x100
                     values: negative band upper edge, positive band lower
                     edge, reserved (must be 0)
======  ===========  =====================================================

All commands ride on fport 10.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Mapping, Union

from ..device import ManualTestTrigger, SetPolicy
from ..spectral import TrafficLightPolicy

MAX_PAYLOAD_BYTES = 242
MIN_PAYLOAD_BYTES = 11
COMMAND_FPORT = 10

OPCODE_MANUAL_TEST = 0x01
OPCODE_SET_POLICY = 0x02

Scalar = Union[int, float, str, bool]


@dataclass(frozen=True)
class UplinkFrame:
    """One device-to-platform transmission as the gateway sees it."""

    device_eui: str
    fport: int
    payload: bytes
    counter: int
    received_at: float

    def __post_init__(self) -> None:
        if not self.device_eui:
            raise ValueError("device_eui must be non-empty")
        if not 1 <= self.fport <= 223:
            raise ValueError(f"fport out of range: {self.fport}")
        if self.counter < 0:
            raise ValueError(f"counter must be >= 0: {self.counter}")


@dataclass(frozen=True)
class DownlinkFrame:
    """One platform-to-device command frame."""

    device_eui: str
    fport: int
    payload: bytes

    def __post_init__(self) -> None:
        if not 1 <= self.fport <= 223:
            raise ValueError(f"fport out of range: {self.fport}")
        if len(self.payload) > MAX_PAYLOAD_BYTES:
            raise ValueError(f"payload too large: {len(self.payload)} bytes")


@dataclass(frozen=True)
class LinkProfile:
    """Injectable impairments for the simulated radio link."""

    loss_probability: float = 0.0
    delay_ms_range: tuple[float, float] = (0.0, 0.0)
    max_payload: int = MAX_PAYLOAD_BYTES

    def __post_init__(self) -> None:
        if not 0.0 <= self.loss_probability <= 1.0:
            raise ValueError(f"loss_probability out of [0, 1]: {self.loss_probability}")
        lo, hi = self.delay_ms_range
        if lo < 0 or hi < lo:
            raise ValueError(f"bad delay range: {self.delay_ms_range}")
        if self.max_payload <= 0:
            raise ValueError("max_payload must be positive")


@dataclass(frozen=True)
class TelemetryEnvelope:
    """Flat platform-side telemetry message (the JSON shape)."""

    device_id: str
    timestamp: float
    values: Mapping[str, Scalar]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("values must be non-empty")
        object.__setattr__(self, "values", dict(self.values))

    def to_dict(self) -> dict:
        return {"device_id": self.device_id, "timestamp": self.timestamp,
                "values": dict(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> "TelemetryEnvelope":
        return cls(device_id=d["device_id"], timestamp=float(d["timestamp"]),
                   values=d["values"])


class MalformedCommand(ValueError):
    """Downlink payload does not parse as a known command."""


def encode_policy_payload(negative_upper: float, positive_lower: float) -> bytes:
    return bytes([OPCODE_SET_POLICY]) + struct.pack(
        ">iii", round(negative_upper * 100), round(positive_lower * 100), 0
    )


def parse_downlink_command(payload: bytes, instrument: str = "field"):
    """Device-side command parser; returns a control-channel command object.

    `instrument` labels the policy a setPolicy command produces (the wire
    format carries thresholds only).
    """
    if not payload:
        raise MalformedCommand("empty payload")
    opcode = payload[0]
    if opcode == OPCODE_MANUAL_TEST:
        if len(payload) != 1:
            raise MalformedCommand(f"manualTest takes no arguments, got {len(payload) - 1} bytes")
        return ManualTestTrigger(requested_by="downlink")
    if opcode == OPCODE_SET_POLICY:
        if len(payload) != 13:
            raise MalformedCommand(f"setPolicy needs 12 argument bytes, got {len(payload) - 1}")
        neg_raw, pos_raw, reserved = struct.unpack(">iii", payload[1:])
        if reserved != 0:
            raise MalformedCommand(f"reserved field must be 0, got {reserved}")
        return SetPolicy(policy=TrafficLightPolicy(
            instrument=instrument,
            negative_upper=neg_raw / 100.0,
            positive_lower=pos_raw / 100.0,
        ))
    raise MalformedCommand(f"unknown opcode 0x{opcode:02X}")
