"""Simulated transport: gateway with converters, in-process broker bus, wire client."""

from .bus import (
    BusMessage,
    Handler,
    MessageBus,
    Subscription,
    Transport,
    rpc_request_topic,
    rpc_response_topic,
    telemetry_topic,
    topic_matches,
)
from .converters import (
    UnknownCommand,
    UplinkConverter,
    converter_downlink,
    converter_uplink,
    payload_from_result,
    result_to_envelope,
)
from .frames import (
    COMMAND_FPORT,
    MAX_PAYLOAD_BYTES,
    MIN_PAYLOAD_BYTES,
    OPCODE_MANUAL_TEST,
    OPCODE_SET_POLICY,
    DownlinkFrame,
    LinkProfile,
    MalformedCommand,
    TelemetryEnvelope,
    UplinkFrame,
    encode_policy_payload,
    parse_downlink_command,
)
from .gateway import ForwardOutcome, Gateway, PayloadTooLarge

__all__ = [
    "BusMessage",
    "Handler",
    "MessageBus",
    "Subscription",
    "Transport",
    "rpc_request_topic",
    "rpc_response_topic",
    "telemetry_topic",
    "topic_matches",
    "UnknownCommand",
    "UplinkConverter",
    "converter_downlink",
    "converter_uplink",
    "payload_from_result",
    "result_to_envelope",
    "COMMAND_FPORT",
    "MAX_PAYLOAD_BYTES",
    "MIN_PAYLOAD_BYTES",
    "OPCODE_MANUAL_TEST",
    "OPCODE_SET_POLICY",
    "DownlinkFrame",
    "LinkProfile",
    "MalformedCommand",
    "TelemetryEnvelope",
    "UplinkFrame",
    "encode_policy_payload",
    "parse_downlink_command",
    "ForwardOutcome",
    "Gateway",
    "PayloadTooLarge",
]
