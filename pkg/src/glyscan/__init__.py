"""Glyscan: a software ecosystem for VIS-NIR glyphosate screening in water.

Subpackages:

* ``glyscan.spectral`` -- calibration fitting, prediction, traffic-light
  classification, channel ranking and CSV ingestion.
* ``glyscan.lpp`` -- compact binary telemetry codec for the constrained
  LoRaWAN-style uplink.
* ``glyscan.device`` -- emulated handheld analyzer: synthetic sensor,
  firmware state machine, local control channel.
* ``glyscan.netsim`` -- simulated dual-path transport: gateway with
  uplink/downlink converters, and an in-process broker bus with RPC.
* ``glyscan.ingest`` -- platform core: durable record store, alarms,
  queries, HTTP API.
* ``glyscan.cli`` -- operator command line.
"""

__version__ = "0.1.0"
