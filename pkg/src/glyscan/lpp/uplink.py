"""Fixed-layout measurement uplink built on the record codec.

Channel map (one frame per completed test):

=========  =============================================================
channel    content
=========  =============================================================
1..17      ANALOG_INPUT, reflectance per wavelength in ascending
           wavelength order (see SUPPORTED_WAVELENGTHS_NM)
20         TEMPERATURE, degC at time of reading
21         RELATIVE_HUMIDITY, percent
22         ACCELEROMETER, orientation in G
23         GPS, latitude / longitude / altitude
28         DIGITAL_INPUT, 1 if this is a diagnostic (self-test) frame
29         DIGITAL_INPUT, 1 if any reflectance was clamped to the
           encodable range
30         DIGITAL_INPUT, classification (0 negative, 1 warning,
           2 positive)
31         ANALOG_INPUT, predicted concentration / 100
32         ANALOG_INPUT, predicted concentration remainder
33         ANALOG_INPUT, test sequence number x 0.01 (raw 16-bit value
           equals the sequence number, 0..32767)
=========  =============================================================

The split across channels 31/32 keeps the reconstructed concentration
within 0.005 mg/l of the encoder input while staying inside the signed
16-bit analog range.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..spectral import SUPPORTED_WAVELENGTHS_NM, Spectrum, TrafficLight
from .codec import (
    ANALOG_MAX,
    LppKind,
    LppRecord,
    decode,
    encode,
    quantize,
    record_size,
)

SPECTRAL_CHANNEL_BASE = 1
CH_TEMPERATURE = 20
CH_HUMIDITY = 21
CH_ACCEL = 22
CH_GPS = 23
CH_DIAGNOSTIC = 28
CH_CLAMP = 29
CH_COLOR = 30
CH_VALUE_HUNDREDS = 31
CH_VALUE_REMAINDER = 32
CH_SEQ = 33

#: hard ceiling imposed by the transmit path
UPLINK_BUDGET_BYTES = 148

SEQ_MAX = 32767

_KIND_BY_CHANNEL = {CH_TEMPERATURE: LppKind.TEMPERATURE,
                    CH_HUMIDITY: LppKind.RELATIVE_HUMIDITY,
                    CH_ACCEL: LppKind.ACCELEROMETER,
                    CH_GPS: LppKind.GPS,
                    CH_DIAGNOSTIC: LppKind.DIGITAL_INPUT,
                    CH_CLAMP: LppKind.DIGITAL_INPUT,
                    CH_COLOR: LppKind.DIGITAL_INPUT,
                    CH_VALUE_HUNDREDS: LppKind.ANALOG_INPUT,
                    CH_VALUE_REMAINDER: LppKind.ANALOG_INPUT,
                    CH_SEQ: LppKind.ANALOG_INPUT}
for _i in range(len(SUPPORTED_WAVELENGTHS_NM)):
    _KIND_BY_CHANNEL[SPECTRAL_CHANNEL_BASE + _i] = LppKind.ANALOG_INPUT

#: every frame carries the same record set, so its size is a constant
UPLINK_FRAME_BYTES = sum(record_size(k) for k in _KIND_BY_CHANNEL.values())


class PayloadBudgetExceeded(ValueError):
    def __init__(self, size: int) -> None:
        super().__init__(f"encoded uplink is {size} bytes, budget is {UPLINK_BUDGET_BYTES}")
        self.size = size


class MalformedUplink(ValueError):
    """Frame decoded, but does not carry the expected record set."""


@dataclass(frozen=True)
class UplinkPayload:
    """Everything a device reports for one finished test."""

    seq: int
    spectrum: Spectrum
    temperature_c: float
    humidity_pct: float
    accel_g: tuple[float, float, float]
    location: tuple[float, float, float]
    color: TrafficLight
    predicted_mg_l: float
    diagnostic: bool = False
    clamped: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.seq <= SEQ_MAX:
            raise ValueError(f"seq out of range: {self.seq}")

    def quantized(self) -> "UplinkPayload":
        """The payload as it will read back after encode + decode."""
        clamped_refl = {nm: min(v, ANALOG_MAX) for nm, v in self.spectrum.as_dict().items()}
        hundreds = int(round(self.predicted_mg_l))
        remainder = quantize(LppKind.ANALOG_INPUT, self.predicted_mg_l - hundreds)
        return replace(
            self,
            spectrum=Spectrum({nm: quantize(LppKind.ANALOG_INPUT, v) for nm, v in clamped_refl.items()}),
            temperature_c=quantize(LppKind.TEMPERATURE, self.temperature_c),
            humidity_pct=quantize(LppKind.RELATIVE_HUMIDITY, self.humidity_pct),
            accel_g=quantize(LppKind.ACCELEROMETER, self.accel_g),
            location=quantize(LppKind.GPS, self.location),
            predicted_mg_l=hundreds + remainder,
            clamped=any(v > ANALOG_MAX for v in self.spectrum.as_dict().values()),
        )


def encode_test_uplink(payload: UplinkPayload) -> bytes:
    """Fixed-size frame (UPLINK_FRAME_BYTES) for one test result.

    Reflectance above the analog ceiling is clamped and flagged on
    channel 29 rather than rejected, since high-concentration samples
    legitimately exceed it on some wavelengths.
    """
    records: list[LppRecord] = []
    clamped = False
    for i, nm in enumerate(SUPPORTED_WAVELENGTHS_NM):
        v = payload.spectrum.reflectance(nm)
        if v > ANALOG_MAX:
            v = ANALOG_MAX
            clamped = True
        records.append(LppRecord(SPECTRAL_CHANNEL_BASE + i, LppKind.ANALOG_INPUT, v))

    hundreds = int(round(payload.predicted_mg_l))
    remainder = payload.predicted_mg_l - hundreds

    records.extend([
        LppRecord(CH_TEMPERATURE, LppKind.TEMPERATURE, payload.temperature_c),
        LppRecord(CH_HUMIDITY, LppKind.RELATIVE_HUMIDITY, payload.humidity_pct),
        LppRecord(CH_ACCEL, LppKind.ACCELEROMETER, payload.accel_g),
        LppRecord(CH_GPS, LppKind.GPS, payload.location),
        LppRecord(CH_DIAGNOSTIC, LppKind.DIGITAL_INPUT, int(payload.diagnostic)),
        LppRecord(CH_CLAMP, LppKind.DIGITAL_INPUT, int(clamped)),
        LppRecord(CH_COLOR, LppKind.DIGITAL_INPUT, int(payload.color)),
        LppRecord(CH_VALUE_HUNDREDS, LppKind.ANALOG_INPUT, hundreds / 100.0),
        LppRecord(CH_VALUE_REMAINDER, LppKind.ANALOG_INPUT, remainder),
        LppRecord(CH_SEQ, LppKind.ANALOG_INPUT, payload.seq * 0.01),
    ])

    frame = encode(records)
    if len(frame) > UPLINK_BUDGET_BYTES:
        raise PayloadBudgetExceeded(len(frame))
    return frame


def decode_test_uplink(frame: bytes) -> UplinkPayload:
    """Parse a frame produced by :func:`encode_test_uplink`."""
    by_channel: dict[int, LppRecord] = {}
    for rec in decode(frame):
        if rec.channel in by_channel:
            raise MalformedUplink(f"duplicate channel {rec.channel}")
        by_channel[rec.channel] = rec

    missing = sorted(set(_KIND_BY_CHANNEL) - set(by_channel))
    if missing:
        raise MalformedUplink(f"missing channels {missing}")
    extra = sorted(set(by_channel) - set(_KIND_BY_CHANNEL))
    if extra:
        raise MalformedUplink(f"unexpected channels {extra}")
    for ch, kind in _KIND_BY_CHANNEL.items():
        if by_channel[ch].kind is not kind:
            raise MalformedUplink(
                f"channel {ch} carries {by_channel[ch].kind.name}, expected {kind.name}"
            )

    refl = {
        nm: by_channel[SPECTRAL_CHANNEL_BASE + i].value
        for i, nm in enumerate(SUPPORTED_WAVELENGTHS_NM)
    }
    color_raw = by_channel[CH_COLOR].value
    try:
        color = TrafficLight(color_raw)
    except ValueError:
        raise MalformedUplink(f"classification byte out of range: {color_raw}") from None

    hundreds = round(by_channel[CH_VALUE_HUNDREDS].value * 100)
    predicted = hundreds + by_channel[CH_VALUE_REMAINDER].value

    return UplinkPayload(
        seq=round(by_channel[CH_SEQ].value * 100),
        spectrum=Spectrum(refl),
        temperature_c=by_channel[CH_TEMPERATURE].value,
        humidity_pct=by_channel[CH_HUMIDITY].value,
        accel_g=by_channel[CH_ACCEL].value,
        location=by_channel[CH_GPS].value,
        color=color,
        predicted_mg_l=predicted,
        diagnostic=bool(by_channel[CH_DIAGNOSTIC].value),
        clamped=bool(by_channel[CH_CLAMP].value),
    )
