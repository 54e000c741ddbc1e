"""Durable record/alarm store: append-only JSON-lines journal + in-memory index.

Every mutation is one fsynced journal line; the index is rebuilt by replay
on start. A torn final line (crash mid-append) is ignored on replay, which
is exactly the not-yet-acknowledged write.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterator, Optional

from ..spectral import TrafficLight
from .records import Alarm, InvalidRange, QueryFilter, StorageFailure, TestRecord

DEFAULT_PAGE_SIZE = 100

JOURNAL_NAME = "journal.jsonl"


def _sort_key(r: TestRecord):
    # newest first, deterministic tiebreak for equal timestamps
    return (-r.timestamp, r.device_serial, -r.test_id)


class RecordStore:
    """Single-writer store; callers serialize mutations (the service does)."""

    def __init__(self, data_dir: str | Path) -> None:
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.journal_path = self.data_dir / JOURNAL_NAME

        self._records: dict[tuple[str, int], TestRecord] = {}
        self._alarms: dict[int, Alarm] = {}
        self._next_alarm_id = 0
        self._replay()
        self._journal = open(self.journal_path, "ab")

    # ------------------------------------------------------------- journal

    def _replay(self) -> None:
        if not self.journal_path.exists():
            return
        raw = self.journal_path.read_bytes()
        pos = 0
        n = len(raw)
        while pos < n:
            nl = raw.find(b"\n", pos)
            if nl == -1:
                break  # unterminated tail from a crash mid-append; never acknowledged
            line = raw[pos:nl]
            if line:
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError:
                    raise StorageFailure(f"corrupt journal at byte {pos}") from None
                self._apply(entry)
            pos = nl + 1
        if pos < n:
            # chop the torn tail so future appends keep the journal well formed
            with open(self.journal_path, "r+b") as f:
                f.truncate(pos)

    def _apply(self, entry: dict) -> None:
        kind = entry.get("kind")
        if kind == "record":
            record = TestRecord.from_dict(entry["data"])
            self._records[(record.device_serial, record.test_id)] = record
            if entry.get("alarm") is not None:
                alarm = Alarm.from_dict(entry["alarm"])
                self._alarms[alarm.alarm_id] = alarm
                self._next_alarm_id = max(self._next_alarm_id, alarm.alarm_id + 1)
        elif kind == "alarm":
            alarm = Alarm.from_dict(entry["data"])
            self._alarms[alarm.alarm_id] = alarm
            self._next_alarm_id = max(self._next_alarm_id, alarm.alarm_id + 1)
        elif kind == "alarm_ack":
            alarm_id = int(entry["alarm_id"])
            if alarm_id in self._alarms:
                self._alarms[alarm_id] = Alarm.from_dict(
                    {**self._alarms[alarm_id].to_dict(), "acknowledged": True})
        else:
            raise StorageFailure(f"unknown journal entry kind: {kind!r}")

    def _append(self, entry: dict) -> None:
        try:
            line = json.dumps(entry, sort_keys=True).encode("utf-8") + b"\n"
            self._journal.write(line)
            self._journal.flush()
            os.fsync(self._journal.fileno())
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc

    def close(self) -> None:
        self._journal.close()

    # ------------------------------------------------------------- records

    def get(self, device_serial: str, test_id: int) -> Optional[TestRecord]:
        return self._records.get((device_serial, test_id))

    def get_by_record_id(self, record_id: str) -> Optional[TestRecord]:
        serial, sep, test_id = record_id.rpartition(":")
        if not sep or not test_id.isdigit():
            return None
        return self.get(serial, int(test_id))

    def put_record(self, record: TestRecord,
                   alarm_severity: Optional[str] = None) -> tuple[TestRecord, Optional[Alarm]]:
        """Durably append the record and (optionally) its alarm as ONE journal
        line, so a crash can never separate a Positive/Warning record from its
        alarm. Idempotent upserts are the caller's concern (the service checks
        `get` first)."""
        alarm = None
        entry: dict = {"kind": "record", "data": record.to_dict()}
        if alarm_severity is not None:
            alarm = Alarm(
                alarm_id=self._next_alarm_id,
                test_id=record.test_id,
                device_serial=record.device_serial,
                severity=alarm_severity,
                created_at=record.timestamp,
            )
            entry["alarm"] = alarm.to_dict()
        self._append(entry)
        self._records[(record.device_serial, record.test_id)] = record
        if alarm is not None:
            self._alarms[alarm.alarm_id] = alarm
            self._next_alarm_id += 1
        return record, alarm

    def all_records(self) -> list[TestRecord]:
        return list(self._records.values())

    def __len__(self) -> int:
        return len(self._records)

    # --------------------------------------------------------------- query

    def query(
        self,
        query_filter: QueryFilter = QueryFilter(),
        cursor: Optional[str] = None,
        limit: int = DEFAULT_PAGE_SIZE,
    ) -> tuple[list[TestRecord], Optional[str]]:
        """Newest-first page plus the cursor for the next one (None = done)."""
        if limit <= 0:
            raise InvalidRange(f"limit must be positive: {limit}")
        matched = sorted(
            (r for r in self._records.values() if query_filter.matches(r)),
            key=_sort_key,
        )
        if cursor is not None:
            after = self._parse_cursor(cursor)
            matched = [r for r in matched if _sort_key(r) > after]
        page = matched[:limit]
        next_cursor = self._format_cursor(page[-1]) if len(matched) > limit else None
        return page, next_cursor

    @staticmethod
    def _format_cursor(record: TestRecord) -> str:
        return f"{record.timestamp!r}:{record.device_serial}:{record.test_id}"

    @staticmethod
    def _parse_cursor(cursor: str):
        try:
            ts_str, rest = cursor.split(":", 1)
            serial, test_id_str = rest.rsplit(":", 1)
            return (-float(ts_str), serial, -int(test_id_str))
        except ValueError:
            raise InvalidRange(f"malformed cursor: {cursor!r}") from None

    def stats(self, query_filter: QueryFilter = QueryFilter()) -> dict:
        """Counts per color/region/device over matching non-diagnostic records."""
        by_color: dict[str, int] = {}
        by_region: dict[str, int] = {}
        by_device: dict[str, int] = {}
        count = 0
        for r in self._records.values():
            if r.diagnostic or not query_filter.matches(r):
                continue
            count += 1
            by_color[r.color.label] = by_color.get(r.color.label, 0) + 1
            region = r.request.get("region") or ""
            by_region[region] = by_region.get(region, 0) + 1
            by_device[r.device_serial] = by_device.get(r.device_serial, 0) + 1
        return {"count": count, "by_color": by_color, "by_region": by_region,
                "by_device": by_device}

    # -------------------------------------------------------------- alarms

    def ack_alarm(self, alarm_id: int) -> Alarm:
        if alarm_id not in self._alarms:
            raise KeyError(f"no such alarm: {alarm_id}")
        self._append({"kind": "alarm_ack", "alarm_id": alarm_id})
        updated = Alarm.from_dict({**self._alarms[alarm_id].to_dict(),
                                   "acknowledged": True})
        self._alarms[alarm_id] = updated
        return updated

    def alarms(self, severity: Optional[str] = None,
               acknowledged: Optional[bool] = None) -> list[Alarm]:
        out = [
            a for a in self._alarms.values()
            if (severity is None or a.severity == severity)
            and (acknowledged is None or a.acknowledged == acknowledged)
        ]
        return sorted(out, key=lambda a: a.alarm_id)
