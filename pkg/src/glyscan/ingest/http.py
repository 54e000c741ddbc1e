"""HTTP JSON API over the ingest service.

Thin adapter: every endpoint parses query/path inputs, delegates to
IngestService/RecordStore, and returns plain JSON. CORS is open so a
separately served dashboard can poll from the browser.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware

from ..netsim import TelemetryEnvelope
from ..spectral import TrafficLight
from .records import (
    InvalidRange,
    LinkUnavailable,
    QueryFilter,
    SchemaViolation,
    StorageFailure,
    UnknownDevice,
)
from .service import IngestService


def _parse_filter(
    t_from: Optional[float],
    t_to: Optional[float],
    device: Optional[str],
    color: Optional[str],
    region: Optional[str],
) -> QueryFilter:
    parsed_color = None
    if color is not None:
        try:
            parsed_color = TrafficLight.from_label(color)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
    try:
        return QueryFilter(
            device_serial=device,
            t_from=t_from,
            t_to=t_to,
            color=parsed_color,
            region=region,
        )
    except InvalidRange as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


def create_app(service: IngestService) -> FastAPI:
    app = FastAPI(title="water-test platform", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.service = service

    @app.post("/api/ingest")
    async def ingest(request: Request, link_kind: str = Query("broker")):
        try:
            body = await request.json()
        except ValueError:
            raise HTTPException(status_code=400, detail="body is not JSON") from None
        try:
            envelope = TelemetryEnvelope.from_dict(body)
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"bad envelope: {exc}") from None
        try:
            record = service.ingest_envelope(envelope, link_kind=link_kind)
        except SchemaViolation as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        except StorageFailure as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from None
        return record.to_dict()

    @app.get("/api/records")
    def records(
        t_from: Optional[float] = Query(None, alias="from"),
        t_to: Optional[float] = Query(None, alias="to"),
        device: Optional[str] = None,
        color: Optional[str] = None,
        region: Optional[str] = None,
        cursor: Optional[str] = None,
        limit: int = Query(100, ge=1, le=1000),
    ):
        flt = _parse_filter(t_from, t_to, device, color, region)
        try:
            page, next_cursor = service.store.query(flt, cursor=cursor, limit=limit)
        except InvalidRange as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {
            "records": [r.to_dict() for r in page],
            "next_cursor": next_cursor,
        }

    @app.get("/api/stats")
    def stats(
        t_from: Optional[float] = Query(None, alias="from"),
        t_to: Optional[float] = Query(None, alias="to"),
        device: Optional[str] = None,
        color: Optional[str] = None,
        region: Optional[str] = None,
    ):
        flt = _parse_filter(t_from, t_to, device, color, region)
        return service.store.stats(flt)

    @app.post("/api/devices/{serial}/rpc/manualTest")
    def manual_test(serial: str):
        try:
            dispatch = service.trigger_manual_test(serial)
        except UnknownDevice as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        except LinkUnavailable as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from None
        return dispatch.to_dict()

    @app.get("/api/devices")
    def devices():
        return [d.to_dict() for d in service.devices.values()]

    @app.get("/api/alarms")
    def alarms(
        severity: Optional[str] = None,
        acknowledged: Optional[bool] = None,
    ):
        if severity is not None and severity not in ("advisory", "critical"):
            raise HTTPException(status_code=400, detail=f"unknown severity: {severity!r}")
        return [a.to_dict() for a in
                service.store.alarms(severity=severity, acknowledged=acknowledged)]

    @app.post("/api/alarms/{alarm_id}/ack")
    def ack_alarm(alarm_id: int):
        try:
            alarm = service.store.ack_alarm(alarm_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no alarm {alarm_id!r}") from None
        return alarm.to_dict()

    @app.get("/api/records/{record_id}/spectrum")
    def spectrum(record_id: str):
        record = service.store.get_by_record_id(record_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"no record {record_id!r}")
        wavelengths = sorted(record.spectrum)
        return {
            "record_id": record.record_id,
            "wavelengths_nm": wavelengths,
            "reflectance": [record.spectrum[nm] for nm in wavelengths],
            "precision": record.precision,
        }

    @app.get("/api/dispatches")
    def dispatches():
        return [d.to_dict() for d in service.dispatches.values()]

    return app
