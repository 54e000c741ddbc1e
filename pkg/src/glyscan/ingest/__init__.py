"""Telemetry persistence and query platform: journal store, ingest service, HTTP API."""

from .http import create_app
from .records import (
    Alarm,
    InvalidRange,
    LinkUnavailable,
    QueryFilter,
    SchemaViolation,
    StorageFailure,
    TestRecord,
    UnknownDevice,
)
from .service import Dispatch, IngestService, RegisteredDevice
from .store import DEFAULT_PAGE_SIZE, JOURNAL_NAME, RecordStore

__all__ = [
    "create_app",
    "Alarm",
    "InvalidRange",
    "LinkUnavailable",
    "QueryFilter",
    "SchemaViolation",
    "StorageFailure",
    "TestRecord",
    "UnknownDevice",
    "Dispatch",
    "IngestService",
    "RegisteredDevice",
    "DEFAULT_PAGE_SIZE",
    "JOURNAL_NAME",
    "RecordStore",
]
