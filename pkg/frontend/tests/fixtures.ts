/**
 * Recorded API responses used as fixtures by the view tests.
 *
 * positiveRecord mirrors a stored field test whose 560 nm reflectance
 * of 285 predicts 989.9226 mg/l, classified Positive by the server.
 */

import type {
  Alarm,
  Device,
  Dispatch,
  Stats,
  TestRecord,
} from "../src/types.js";

export function positiveRecord(): TestRecord {
  return {
    test_id: 17,
    record_id: "SG-100:17",
    device_serial: "SG-100",
    timestamp: 615.0,
    link_kind: "lorawan",
    predicted_mg_l: 989.9226,
    color: "Positive",
    spectrum: {
      "410": 180.25, "435": 171.5, "460": 163.75, "485": 210.0,
      "510": 235.5, "535": 261.25, "560": 285.0, "585": 289.5,
      "610": 248.0, "645": 216.75, "705": 190.5, "730": 184.25,
      "760": 176.0, "810": 168.5, "860": 161.25, "900": 155.0,
      "940": 149.75,
    },
    env: {
      temperature_c: 22.0,
      humidity_pct: 55.0,
      accel_x: 0.0,
      accel_y: 0.0,
      accel_z: 1.0,
    },
    gps: [-31.4, -64.2, 400.0],
    request: {
      sample_id: "SG-100-S017",
      source: "well",
      region: "Cordoba",
    },
    diagnostic: false,
    env_violation: false,
    color_mismatch: false,
    precision: "quantized",
    correlation_id: null,
  };
}

export function negativeRecord(): TestRecord {
  return {
    ...positiveRecord(),
    test_id: 18,
    record_id: "SG-100:18",
    timestamp: 1330.0,
    predicted_mg_l: -14.07,
    color: "Negative",
    spectrum: {
      ...positiveRecord().spectrum,
      "560": 161.04,
      "585": 158.2,
    },
    request: { sample_id: "SG-100-S018", source: "tap", region: "Cordoba" },
  };
}

export function warningRecord(): TestRecord {
  return {
    ...positiveRecord(),
    test_id: 3,
    record_id: "SG-200:3",
    device_serial: "SG-200",
    timestamp: 900.0,
    link_kind: "broker",
    predicted_mg_l: 240.5,
    color: "Warning",
    precision: "exact",
    gps: null,
    correlation_id: "cmd-1",
  };
}

export function idleDevice(): Device {
  return {
    serial: "SG-100",
    link_kind: "lorawan",
    device_eui: "0011223344556677",
    last_seen: 615.0,
    phase: "idle",
    battery_pct: 87.4,
    env_ok: true,
  };
}

export function freshDevice(): Device {
  return {
    serial: "SG-200",
    link_kind: "broker",
    device_eui: null,
    last_seen: null,
    phase: "unknown",
    battery_pct: null,
    env_ok: null,
  };
}

export function criticalAlarm(): Alarm {
  return {
    alarm_id: 1,
    test_id: 17,
    record_id: "SG-100:17",
    device_serial: "SG-100",
    severity: "critical",
    created_at: 615.0,
    acknowledged: false,
  };
}

export function pendingDispatch(): Dispatch {
  return {
    correlation_id: "cmd-1",
    device_serial: "SG-200",
    method: "manualTest",
    created_at: 640.0,
    status: "pending",
    matched_record_id: null,
  };
}

export function sampleStats(): Stats {
  return {
    count: 3,
    by_color: { Negative: 1, Warning: 1, Positive: 1 },
    by_region: { Cordoba: 3 },
    by_device: { "SG-100": 2, "SG-200": 1 },
  };
}
