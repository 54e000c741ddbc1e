"""Compact binary telemetry codec and the fixed measurement-uplink layout."""

from .codec import (
    ANALOG_MAX,
    ANALOG_MIN,
    GPS_ALT_RESOLUTION,
    GPS_DEG_RESOLUTION,
    PAYLOAD_SIZE,
    RESOLUTION,
    LppFrame,
    LppKind,
    LppRecord,
    TruncatedFrame,
    UnknownTypeCode,
    ValueOutOfRange,
    decode,
    encode,
    quantize,
    record_size,
)
from .uplink import (
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
    SEQ_MAX,
    SPECTRAL_CHANNEL_BASE,
    UPLINK_BUDGET_BYTES,
    UPLINK_FRAME_BYTES,
    MalformedUplink,
    PayloadBudgetExceeded,
    UplinkPayload,
    decode_test_uplink,
    encode_test_uplink,
)

__all__ = [
    "ANALOG_MAX",
    "ANALOG_MIN",
    "GPS_ALT_RESOLUTION",
    "GPS_DEG_RESOLUTION",
    "PAYLOAD_SIZE",
    "RESOLUTION",
    "LppFrame",
    "LppKind",
    "LppRecord",
    "TruncatedFrame",
    "UnknownTypeCode",
    "ValueOutOfRange",
    "decode",
    "encode",
    "quantize",
    "record_size",
    "CH_ACCEL",
    "CH_CLAMP",
    "CH_COLOR",
    "CH_DIAGNOSTIC",
    "CH_GPS",
    "CH_HUMIDITY",
    "CH_SEQ",
    "CH_TEMPERATURE",
    "CH_VALUE_HUNDREDS",
    "CH_VALUE_REMAINDER",
    "SEQ_MAX",
    "SPECTRAL_CHANNEL_BASE",
    "UPLINK_BUDGET_BYTES",
    "UPLINK_FRAME_BYTES",
    "MalformedUplink",
    "PayloadBudgetExceeded",
    "UplinkPayload",
    "decode_test_uplink",
    "encode_test_uplink",
]
