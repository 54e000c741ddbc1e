"""Bit-exact encoder/decoder for compact (channel id, type code, data) telemetry records.

Wire format per record: 1 byte channel id, 1 byte type code, big-endian
payload. Supported kinds and encodings:

==================  ====  =====  ==========================================
kind                code  bytes  payload
==================  ====  =====  ==========================================
DIGITAL_INPUT       0x00      1  unsigned
ANALOG_INPUT        0x02      2  signed, 0.01 resolution
TEMPERATURE         0x67      2  signed, 0.1 degC resolution
RELATIVE_HUMIDITY   0x68      1  unsigned, 0.5 % resolution
ACCELEROMETER       0x71      6  three signed 16-bit, 0.001 G resolution
GPS                 0x88      9  lat, lon signed 24-bit x 0.0001 deg;
                                 alt signed 24-bit x 0.01 m
==================  ====  =====  ==========================================
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Union

Value = Union[int, float, tuple]


class LppKind(enum.Enum):
    DIGITAL_INPUT = 0x00
    ANALOG_INPUT = 0x02
    TEMPERATURE = 0x67
    RELATIVE_HUMIDITY = 0x68
    ACCELEROMETER = 0x71
    GPS = 0x88

    @property
    def type_code(self) -> int:
        return self.value


#: payload size in bytes (excluding the 2-byte record header)
PAYLOAD_SIZE = {
    LppKind.DIGITAL_INPUT: 1,
    LppKind.ANALOG_INPUT: 2,
    LppKind.TEMPERATURE: 2,
    LppKind.RELATIVE_HUMIDITY: 1,
    LppKind.ACCELEROMETER: 6,
    LppKind.GPS: 9,
}

#: value quantization step per kind (per-axis for vector kinds)
RESOLUTION = {
    LppKind.ANALOG_INPUT: 0.01,
    LppKind.TEMPERATURE: 0.1,
    LppKind.RELATIVE_HUMIDITY: 0.5,
    LppKind.ACCELEROMETER: 0.001,
}
GPS_DEG_RESOLUTION = 0.0001
GPS_ALT_RESOLUTION = 0.01

ANALOG_MIN, ANALOG_MAX = -327.68, 327.67

_BY_CODE = {k.type_code: k for k in LppKind}


class ValueOutOfRange(ValueError):
    def __init__(self, record: "LppRecord", detail: str) -> None:
        super().__init__(f"value out of range for {record.kind.name} ch {record.channel}: {detail}")
        self.record = record


class TruncatedFrame(ValueError):
    def __init__(self, offset: int) -> None:
        super().__init__(f"frame truncated mid-record at byte {offset}")
        self.offset = offset


class UnknownTypeCode(ValueError):
    def __init__(self, code: int) -> None:
        super().__init__(f"unknown type code 0x{code:02X}")
        self.code = code


@dataclass(frozen=True)
class LppRecord:
    """One telemetry datum: channel id 0-255 plus a kind-specific value.

    Values: DIGITAL_INPUT int 0-255; ANALOG_INPUT / TEMPERATURE /
    RELATIVE_HUMIDITY float; ACCELEROMETER (x, y, z) in G; GPS
    (lat, lon, alt).
    """

    channel: int
    kind: LppKind
    value: Value

    def __post_init__(self) -> None:
        if not 0 <= self.channel <= 255:
            raise ValueError(f"channel id out of range: {self.channel}")


def record_size(kind: LppKind) -> int:
    """Encoded size of one record, header included."""
    return 2 + PAYLOAD_SIZE[kind]


def quantize(kind: LppKind, value: Value) -> Value:
    """The value as it will read back after an encode/decode round trip."""
    if kind is LppKind.DIGITAL_INPUT:
        return int(value)
    if kind is LppKind.ACCELEROMETER:
        step = RESOLUTION[kind]
        return tuple(round(v / step) * step for v in value)
    if kind is LppKind.GPS:
        lat, lon, alt = value
        return (
            round(lat / GPS_DEG_RESOLUTION) * GPS_DEG_RESOLUTION,
            round(lon / GPS_DEG_RESOLUTION) * GPS_DEG_RESOLUTION,
            round(alt / GPS_ALT_RESOLUTION) * GPS_ALT_RESOLUTION,
        )
    step = RESOLUTION[kind]
    return round(float(value) / step) * step


def _pack_signed(record: LppRecord, value: float, step: float, nbytes: int) -> bytes:
    raw = round(value / step)
    limit = 1 << (8 * nbytes - 1)
    if not -limit <= raw < limit:
        raise ValueOutOfRange(record, f"{value} exceeds {nbytes}-byte signed range at step {step}")
    return raw.to_bytes(nbytes, "big", signed=True)


def _encode_one(record: LppRecord) -> bytes:
    head = bytes([record.channel, record.kind.type_code])
    kind, value = record.kind, record.value

    if kind is LppKind.DIGITAL_INPUT:
        raw = int(value)
        if not 0 <= raw <= 255:
            raise ValueOutOfRange(record, f"{value} not in 0..255")
        return head + bytes([raw])
    if kind in (LppKind.ANALOG_INPUT, LppKind.TEMPERATURE):
        return head + _pack_signed(record, float(value), RESOLUTION[kind], 2)
    if kind is LppKind.RELATIVE_HUMIDITY:
        raw = round(float(value) / RESOLUTION[kind])
        if not 0 <= raw <= 255:
            raise ValueOutOfRange(record, f"{value} not in 0..127.5")
        return head + bytes([raw])
    if kind is LppKind.ACCELEROMETER:
        x, y, z = value
        return head + b"".join(_pack_signed(record, float(v), RESOLUTION[kind], 2) for v in (x, y, z))
    if kind is LppKind.GPS:
        lat, lon, alt = value
        return (
            head
            + _pack_signed(record, float(lat), GPS_DEG_RESOLUTION, 3)
            + _pack_signed(record, float(lon), GPS_DEG_RESOLUTION, 3)
            + _pack_signed(record, float(alt), GPS_ALT_RESOLUTION, 3)
        )
    raise AssertionError(f"unhandled kind {kind}")


def encode(records: Iterable[LppRecord]) -> bytes:
    """Concatenated big-endian encoding, in record order."""
    return b"".join(_encode_one(r) for r in records)


def _unpack_signed(data: bytes) -> int:
    return int.from_bytes(data, "big", signed=True)


def decode(data: bytes) -> tuple[LppRecord, ...]:
    """Inverse of :func:`encode` up to quantization; prefix-safe.

    Raises :class:`TruncatedFrame` if the bytes end mid-record and
    :class:`UnknownTypeCode` on an unrecognized type byte.
    """
    records: list[LppRecord] = []
    pos = 0
    n = len(data)
    while pos < n:
        if n - pos < 2:
            raise TruncatedFrame(pos)
        channel = data[pos]
        code = data[pos + 1]
        kind = _BY_CODE.get(code)
        if kind is None:
            raise UnknownTypeCode(code)
        size = PAYLOAD_SIZE[kind]
        body = data[pos + 2 : pos + 2 + size]
        if len(body) < size:
            raise TruncatedFrame(pos)

        value: Value
        if kind is LppKind.DIGITAL_INPUT:
            value = body[0]
        elif kind is LppKind.ANALOG_INPUT:
            value = _unpack_signed(body) * RESOLUTION[kind]
        elif kind is LppKind.TEMPERATURE:
            value = _unpack_signed(body) * RESOLUTION[kind]
        elif kind is LppKind.RELATIVE_HUMIDITY:
            value = body[0] * RESOLUTION[kind]
        elif kind is LppKind.ACCELEROMETER:
            value = tuple(
                _unpack_signed(body[i : i + 2]) * RESOLUTION[kind] for i in (0, 2, 4)
            )
        else:  # GPS
            value = (
                _unpack_signed(body[0:3]) * GPS_DEG_RESOLUTION,
                _unpack_signed(body[3:6]) * GPS_DEG_RESOLUTION,
                _unpack_signed(body[6:9]) * GPS_ALT_RESOLUTION,
            )
        records.append(LppRecord(channel=channel, kind=kind, value=value))
        pos += 2 + size
    return tuple(records)


@dataclass(frozen=True)
class LppFrame:
    """An encoded record list with its wire length."""

    records: tuple[LppRecord, ...]
    encoded_len: int

    @classmethod
    def build(cls, records: Iterable[LppRecord]) -> "LppFrame":
        recs = tuple(records)
        return cls(records=recs, encoded_len=len(encode(recs)))
