"""Subprocess body for the kill-recovery test: ingest forever, print each ack.

Each printed line is `record_id<TAB>sha256(canonical record json)`, flushed
before the next ingest, so the parent knows exactly which ingests were
acknowledged when it sends SIGKILL. Values are a pure function of seq, which
makes re-ingestion after restart idempotent and byte-comparable.
"""

from __future__ import annotations

import hashlib
import json
import sys

from glyscan.ingest import IngestService, RecordStore
from glyscan.netsim import TelemetryEnvelope
from glyscan.spectral import FIELD_POLICY, classify


def values_for(seq: int) -> dict:
    predicted = float((seq * 37) % 1800 - 200)  # sweeps all three bands
    return {
        "seq": seq,
        "predicted_mg_l": predicted,
        "color": classify(FIELD_POLICY, predicted).label,
        "temperature_c": 22.0,
        "humidity_pct": 55.0,
        "accel_x": 0.0,
        "accel_y": 0.0,
        "accel_z": 1.0,
        "r560": 100.0 + (seq % 50),
        "request_region": ("north", "south", "")[seq % 3],
    }


def main() -> None:
    data_dir = sys.argv[1]
    store = RecordStore(data_dir)
    service = IngestService(store)
    service.register_device("SG-KILL", "broker")
    seq = 0
    while True:
        envelope = TelemetryEnvelope(
            device_id="SG-KILL",
            timestamp=1000.0 + seq,
            values=values_for(seq),
        )
        record = service.ingest_envelope(envelope)
        canonical = json.dumps(record.to_dict(), sort_keys=True).encode("utf-8")
        digest = hashlib.sha256(canonical).hexdigest()
        print(f"{record.record_id}\t{digest}", flush=True)
        seq += 1


if __name__ == "__main__":
    main()
