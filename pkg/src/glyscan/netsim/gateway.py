"""Simulated long-range gateway: payload policing, dedup, seeded loss/delay.

The gateway takes uplink frames from devices, applies the link profile,
converts survivors to telemetry envelopes, and hands them to the platform
callback. Downlink frames queue here until the device side collects them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .converters import UplinkConverter
from .frames import DownlinkFrame, LinkProfile, TelemetryEnvelope, UplinkFrame


class PayloadTooLarge(ValueError):
    def __init__(self, size: int, limit: int) -> None:
        super().__init__(f"payload is {size} bytes, link limit is {limit}")
        self.size = size
        self.limit = limit


@dataclass(frozen=True)
class ForwardOutcome:
    delivered: bool
    reason: str  # "delivered" | "loss" | "duplicate"
    delay_ms: float
    envelope: Optional[TelemetryEnvelope] = None


class Gateway:
    """One radio region: many devices, one uplink pipe to the platform."""

    def __init__(
        self,
        profile: LinkProfile = LinkProfile(),
        seed: int = 0,
        on_envelope: Optional[Callable[[TelemetryEnvelope], None]] = None,
    ) -> None:
        self.profile = profile
        self.on_envelope = on_envelope
        self.converter = UplinkConverter()
        self._rng = np.random.default_rng(seed)
        self._last_counter: dict[str, int] = {}
        self._downlinks: dict[str, deque[DownlinkFrame]] = {}
        self.forward_log: list[tuple[UplinkFrame, ForwardOutcome]] = []

    def forward(self, frame: UplinkFrame) -> ForwardOutcome:
        """Police, dedup, roll loss/delay, convert, deliver. Never sleeps;
        the drawn delay is recorded for the caller's simulated clock."""
        if len(frame.payload) > self.profile.max_payload:
            raise PayloadTooLarge(len(frame.payload), self.profile.max_payload)

        last = self._last_counter.get(frame.device_eui)
        if last is not None and frame.counter <= last:
            outcome = ForwardOutcome(delivered=False, reason="duplicate", delay_ms=0.0)
            self.forward_log.append((frame, outcome))
            return outcome

        lost = self._rng.random() < self.profile.loss_probability
        delay_ms = float(self._rng.uniform(*self.profile.delay_ms_range))
        if lost:
            outcome = ForwardOutcome(delivered=False, reason="loss", delay_ms=delay_ms)
            self.forward_log.append((frame, outcome))
            return outcome

        self._last_counter[frame.device_eui] = frame.counter
        envelope = self.converter.convert(frame)
        outcome = ForwardOutcome(delivered=True, reason="delivered",
                                 delay_ms=delay_ms, envelope=envelope)
        self.forward_log.append((frame, outcome))
        if self.on_envelope is not None:
            self.on_envelope(envelope)
        return outcome

    # ------------------------------------------------------------- downlink

    def queue_downlink(self, frame: DownlinkFrame) -> None:
        self._downlinks.setdefault(frame.device_eui, deque()).append(frame)

    def collect_downlinks(self, device_eui: str) -> list[DownlinkFrame]:
        """Device side drains its pending commands (next radio window)."""
        queue = self._downlinks.get(device_eui)
        if not queue:
            return []
        out = list(queue)
        queue.clear()
        return out

    def pending_downlink_count(self, device_eui: str) -> int:
        return len(self._downlinks.get(device_eui, ()))
