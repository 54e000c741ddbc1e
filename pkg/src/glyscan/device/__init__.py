"""Device emulator: synthetic sensor, firmware state machine, local control channel."""

from .config import (
    BrokerLink,
    DeviceConfig,
    InvalidConfig,
    Link,
    LoRaWanLink,
    link_from_dict,
)
from .emulator import (
    ALLOWED_TRANSITIONS,
    BATTERY_SECONDS_PER_PCT,
    DEFAULT_ENV,
    HUMIDITY_RANGE_PCT,
    MEASURE_SECONDS,
    PREPROCESS_SECONDS,
    TEMPERATURE_RANGE_C,
    TEST_DURATION_SECONDS,
    TILT_LIMIT_DEG,
    WATER_SOURCES,
    Busy,
    ClockWentBackwards,
    Device,
    DeviceError,
    DeviceEvent,
    DeviceTestResult,
    EnvReading,
    ManualTestTrigger,
    Mode,
    NoSampleLoaded,
    Phase,
    SetLink,
    SetPolicy,
    StartOutcome,
    TestRequest,
    WrongMode,
    env_gate,
    tilt_degrees,
)
from .sensor import (
    DEFAULT_NOISE_REL,
    NegativeConcentration,
    SensorModel,
    build_anchor_table,
    default_sensor_model,
    interpolate_clean,
    simulate_spectrum,
)

__all__ = [
    "BrokerLink",
    "DeviceConfig",
    "InvalidConfig",
    "Link",
    "LoRaWanLink",
    "link_from_dict",
    "ALLOWED_TRANSITIONS",
    "BATTERY_SECONDS_PER_PCT",
    "DEFAULT_ENV",
    "HUMIDITY_RANGE_PCT",
    "MEASURE_SECONDS",
    "PREPROCESS_SECONDS",
    "TEMPERATURE_RANGE_C",
    "TEST_DURATION_SECONDS",
    "TILT_LIMIT_DEG",
    "WATER_SOURCES",
    "Busy",
    "ClockWentBackwards",
    "Device",
    "DeviceError",
    "DeviceEvent",
    "DeviceTestResult",
    "EnvReading",
    "ManualTestTrigger",
    "Mode",
    "NoSampleLoaded",
    "Phase",
    "SetLink",
    "SetPolicy",
    "StartOutcome",
    "TestRequest",
    "WrongMode",
    "env_gate",
    "tilt_degrees",
    "DEFAULT_NOISE_REL",
    "NegativeConcentration",
    "SensorModel",
    "build_anchor_table",
    "default_sensor_model",
    "interpolate_clean",
    "simulate_spectrum",
]
