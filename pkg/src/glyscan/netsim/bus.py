"""In-process publish/subscribe bus with broker-style topic filters.

Default transport for everything in this package: per-topic FIFO order,
at-least-once delivery to every matching subscriber, callbacks allowed to
publish re-entrantly. A thin protocol mirror of an external broker so the
same wiring runs against a real one in deployment.
"""

from __future__ import annotations

import json
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol


def topic_matches(pattern: str, topic: str) -> bool:
    """Broker wildcard semantics: `+` one level, `#` all remaining levels."""
    p_parts = pattern.split("/")
    t_parts = topic.split("/")
    for i, p in enumerate(p_parts):
        if p == "#":
            return i == len(p_parts) - 1
        if i >= len(t_parts):
            return False
        if p != "+" and p != t_parts[i]:
            return False
    return len(p_parts) == len(t_parts)


@dataclass(frozen=True)
class BusMessage:
    topic: str
    payload: bytes

    def json(self) -> dict:
        return json.loads(self.payload.decode("utf-8"))


Handler = Callable[[BusMessage], None]


class Transport(Protocol):
    """What the platform and device adapters need from any broker."""

    def publish(self, topic: str, payload: bytes) -> None: ...

    def subscribe(self, pattern: str, handler: Handler) -> "Subscription": ...


class Subscription:
    def __init__(self, bus: "MessageBus", pattern: str, handler: Handler) -> None:
        self.bus = bus
        self.pattern = pattern
        self.handler = handler
        self.active = True

    def unsubscribe(self) -> None:
        self.bus._remove(self)


class MessageBus:
    """Synchronous in-process broker.

    Publishes enqueue; the first frame in the call stack drains the queue, so
    handlers that publish never recurse and per-topic order is global publish
    order. All state is lock-protected; callers need no external locking.
    """

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._subs: list[Subscription] = []
        self._queue: deque[BusMessage] = deque()
        self._dispatching = False
        self.published_count = 0
        self.delivered_count = 0
        self.handler_errors: list[tuple[str, Exception]] = []

    def subscribe(self, pattern: str, handler: Handler) -> Subscription:
        sub = Subscription(self, pattern, handler)
        with self._lock:
            self._subs.append(sub)
        return sub

    def _remove(self, sub: Subscription) -> None:
        with self._lock:
            sub.active = False
            self._subs = [s for s in self._subs if s is not sub]

    def publish(self, topic: str, payload: bytes) -> None:
        with self._lock:
            self._queue.append(BusMessage(topic=topic, payload=bytes(payload)))
            self.published_count += 1
            if self._dispatching:
                return
            self._dispatching = True
        self._drain()

    def _drain(self) -> None:
        while True:
            with self._lock:
                if not self._queue:
                    self._dispatching = False
                    return
                msg = self._queue.popleft()
                targets = [s for s in self._subs if topic_matches(s.pattern, msg.topic)]
            for sub in targets:
                if not sub.active:
                    continue
                try:
                    sub.handler(msg)
                except Exception as exc:  # a broken handler must not wedge the bus
                    with self._lock:
                        self.handler_errors.append((msg.topic, exc))
                else:
                    with self._lock:
                        self.delivered_count += 1

    def publish_json(self, topic: str, obj: dict) -> None:
        self.publish(topic, json.dumps(obj, sort_keys=True).encode("utf-8"))


def telemetry_topic(serial: str) -> str:
    return f"v1/devices/{serial}/telemetry"


def rpc_request_topic(serial: str) -> str:
    return f"v1/devices/{serial}/rpc/request"


def rpc_response_topic(serial: str) -> str:
    return f"v1/devices/{serial}/rpc/response"
