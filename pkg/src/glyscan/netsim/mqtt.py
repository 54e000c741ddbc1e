"""Minimal MQTT 3.1.1 wire protocol: packet codec plus a small blocking client.

Deployment transport behind the same publish/subscribe surface as the
in-process bus. Only what this package needs: CONNECT/CONNACK, PUBLISH
QoS 0-1, SUBSCRIBE/SUBACK, PING, DISCONNECT; optional TLS via the stdlib.
Nothing here is used by default in tests or simulations.
"""

from __future__ import annotations

import socket
import ssl
import struct
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

from .bus import BusMessage, Handler, topic_matches

CONNECT, CONNACK, PUBLISH, PUBACK = 1, 2, 3, 4
SUBSCRIBE, SUBACK = 8, 9
PINGREQ, PINGRESP, DISCONNECT = 12, 13, 14

PROTOCOL_NAME = b"MQTT"
PROTOCOL_LEVEL = 4


class MqttProtocolError(ValueError):
    pass


def encode_varint(n: int) -> bytes:
    """MQTT remaining-length encoding (7 bits per byte, max 4 bytes)."""
    if not 0 <= n <= 268_435_455:
        raise MqttProtocolError(f"remaining length out of range: {n}")
    out = bytearray()
    while True:
        n, digit = divmod(n, 128)
        out.append(digit | (0x80 if n else 0))
        if not n:
            return bytes(out)


def decode_varint(data: bytes, offset: int = 0) -> tuple[int, int]:
    """Returns (value, bytes consumed); raises on truncation or overlength."""
    value = 0
    for i in range(4):
        if offset + i >= len(data):
            raise MqttProtocolError("truncated remaining length")
        byte = data[offset + i]
        value |= (byte & 0x7F) << (7 * i)
        if not byte & 0x80:
            return value, i + 1
    raise MqttProtocolError("remaining length exceeds 4 bytes")


def _utf8_field(s: str) -> bytes:
    raw = s.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise MqttProtocolError("string field too long")
    return struct.pack(">H", len(raw)) + raw


def _read_utf8(data: bytes, offset: int) -> tuple[str, int]:
    if offset + 2 > len(data):
        raise MqttProtocolError("truncated string length")
    (n,) = struct.unpack_from(">H", data, offset)
    end = offset + 2 + n
    if end > len(data):
        raise MqttProtocolError("truncated string body")
    return data[offset + 2 : end].decode("utf-8"), end


def _packet(ptype: int, flags: int, body: bytes) -> bytes:
    return bytes([(ptype << 4) | flags]) + encode_varint(len(body)) + body


def encode_connect(client_id: str, keepalive: int = 60, clean_session: bool = True,
                   username: Optional[str] = None, password: Optional[str] = None) -> bytes:
    flags = 0x02 if clean_session else 0x00
    body = _utf8_field(PROTOCOL_NAME.decode())
    tail = _utf8_field(client_id)
    if username is not None:
        flags |= 0x80
        tail += _utf8_field(username)
        if password is not None:
            flags |= 0x40
            tail += _utf8_field(password)
    body += bytes([PROTOCOL_LEVEL, flags]) + struct.pack(">H", keepalive) + tail
    return _packet(CONNECT, 0, body)


def encode_connack(session_present: bool = False, return_code: int = 0) -> bytes:
    return _packet(CONNACK, 0, bytes([int(session_present), return_code]))


def encode_publish(topic: str, payload: bytes, qos: int = 0,
                   packet_id: Optional[int] = None, retain: bool = False,
                   dup: bool = False) -> bytes:
    if qos not in (0, 1):
        raise MqttProtocolError(f"unsupported qos: {qos}")
    if qos == 1 and packet_id is None:
        raise MqttProtocolError("qos 1 publish needs a packet id")
    flags = (int(dup) << 3) | (qos << 1) | int(retain)
    body = _utf8_field(topic)
    if qos == 1:
        body += struct.pack(">H", packet_id)
    return _packet(PUBLISH, flags, body + payload)


def encode_puback(packet_id: int) -> bytes:
    return _packet(PUBACK, 0, struct.pack(">H", packet_id))


def encode_subscribe(packet_id: int, filters: list[tuple[str, int]]) -> bytes:
    body = struct.pack(">H", packet_id)
    for pattern, qos in filters:
        body += _utf8_field(pattern) + bytes([qos])
    return _packet(SUBSCRIBE, 0x02, body)


def encode_suback(packet_id: int, return_codes: list[int]) -> bytes:
    return _packet(SUBACK, 0, struct.pack(">H", packet_id) + bytes(return_codes))


def encode_pingreq() -> bytes:
    return _packet(PINGREQ, 0, b"")


def encode_pingresp() -> bytes:
    return _packet(PINGRESP, 0, b"")


def encode_disconnect() -> bytes:
    return _packet(DISCONNECT, 0, b"")


@dataclass(frozen=True)
class Packet:
    ptype: int
    flags: int
    body: bytes

    @property
    def qos(self) -> int:
        return (self.flags >> 1) & 0x03


def parse_packet(data: bytes) -> tuple[Packet, int]:
    """Parse one packet from the head of `data`; returns (packet, total size)."""
    if not data:
        raise MqttProtocolError("empty buffer")
    ptype = data[0] >> 4
    flags = data[0] & 0x0F
    length, n = decode_varint(data, 1)
    end = 1 + n + length
    if end > len(data):
        raise MqttProtocolError("truncated packet body")
    return Packet(ptype=ptype, flags=flags, body=data[1 + n : end]), end


@dataclass(frozen=True)
class PublishInfo:
    topic: str
    payload: bytes
    qos: int
    packet_id: Optional[int]
    retain: bool


def parse_publish(pkt: Packet) -> PublishInfo:
    if pkt.ptype != PUBLISH:
        raise MqttProtocolError(f"not a publish packet: type {pkt.ptype}")
    topic, offset = _read_utf8(pkt.body, 0)
    packet_id = None
    if pkt.qos == 1:
        if offset + 2 > len(pkt.body):
            raise MqttProtocolError("truncated packet id")
        (packet_id,) = struct.unpack_from(">H", pkt.body, offset)
        offset += 2
    elif pkt.qos not in (0,):
        raise MqttProtocolError(f"unsupported qos: {pkt.qos}")
    return PublishInfo(topic=topic, payload=pkt.body[offset:], qos=pkt.qos,
                       packet_id=packet_id, retain=bool(pkt.flags & 0x01))


def parse_connack(pkt: Packet) -> tuple[bool, int]:
    if pkt.ptype != CONNACK or len(pkt.body) != 2:
        raise MqttProtocolError("malformed connack")
    return bool(pkt.body[0] & 0x01), pkt.body[1]


def parse_suback(pkt: Packet) -> tuple[int, list[int]]:
    if pkt.ptype != SUBACK or len(pkt.body) < 3:
        raise MqttProtocolError("malformed suback")
    (packet_id,) = struct.unpack_from(">H", pkt.body, 0)
    return packet_id, list(pkt.body[2:])


class MqttClient:
    """Blocking client over a socket; same surface as the in-process bus.

    Incoming publishes are dispatched to matching local subscriptions on a
    reader thread. QoS 1 inbound is acked immediately (at-least-once).
    """

    def __init__(self, client_id: str) -> None:
        self.client_id = client_id
        self._sock: Optional[socket.socket] = None
        self._buffer = b""
        self._subs: list[tuple[str, Handler]] = []
        self._next_packet_id = 1
        self._lock = threading.Lock()
        self._reader: Optional[threading.Thread] = None
        self._closing = False

    def connect(self, host: str, port: int = 1883, use_tls: bool = False,
                username: Optional[str] = None, password: Optional[str] = None,
                timeout: float = 10.0, sock: Optional[socket.socket] = None) -> None:
        if sock is None:
            sock = socket.create_connection((host, port), timeout=timeout)
            if use_tls:
                context = ssl.create_default_context()
                sock = context.wrap_socket(sock, server_hostname=host)
        self._sock = sock
        self._sock.sendall(encode_connect(self.client_id, username=username,
                                          password=password))
        pkt = self._read_packet_blocking()
        _, code = parse_connack(pkt)
        if code != 0:
            raise MqttProtocolError(f"broker refused connection: code {code}")
        self._reader = threading.Thread(target=self._reader_loop, daemon=True)
        self._reader.start()

    def publish(self, topic: str, payload: bytes, qos: int = 0) -> None:
        packet_id = self._claim_packet_id() if qos == 1 else None
        data = encode_publish(topic, payload, qos=qos, packet_id=packet_id)
        with self._lock:
            assert self._sock is not None, "not connected"
            self._sock.sendall(data)

    def subscribe(self, pattern: str, handler: Handler) -> None:
        self._subs.append((pattern, handler))
        packet_id = self._claim_packet_id()
        with self._lock:
            assert self._sock is not None, "not connected"
            self._sock.sendall(encode_subscribe(packet_id, [(pattern, 1)]))

    def close(self) -> None:
        self._closing = True
        if self._sock is not None:
            try:
                self._sock.sendall(encode_disconnect())
            except OSError:
                pass
            self._sock.close()

    def _claim_packet_id(self) -> int:
        with self._lock:
            pid = self._next_packet_id
            self._next_packet_id = pid % 0xFFFF + 1
            return pid

    def _read_packet_blocking(self) -> Packet:
        assert self._sock is not None
        while True:
            try:
                pkt, used = parse_packet(self._buffer)
            except MqttProtocolError:
                chunk = self._sock.recv(4096)
                if not chunk:
                    raise
                self._buffer += chunk
                continue
            self._buffer = self._buffer[used:]
            return pkt

    def _reader_loop(self) -> None:
        while not self._closing:
            try:
                pkt = self._read_packet_blocking()
            except (OSError, MqttProtocolError):
                return
            if pkt.ptype == PUBLISH:
                info = parse_publish(pkt)
                if info.qos == 1 and info.packet_id is not None:
                    with self._lock:
                        if self._sock is not None:
                            self._sock.sendall(encode_puback(info.packet_id))
                msg = BusMessage(topic=info.topic, payload=info.payload)
                for pattern, handler in list(self._subs):
                    if topic_matches(pattern, info.topic):
                        handler(msg)
            elif pkt.ptype == PINGREQ:
                with self._lock:
                    if self._sock is not None:
                        self._sock.sendall(encode_pingresp())
            # CONNACK handled in connect; SUBACK/PUBACK/PINGRESP need no action
