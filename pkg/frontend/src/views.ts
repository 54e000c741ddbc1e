/**
 * Pure view models computed from API responses.
 *
 * Every function here is a pure projection: same JSON in, same view
 * out, so each view can be snapshot-tested against recorded fixtures.
 * The traffic light badge is a straight lookup of the server-reported
 * color label; the predicted value is displayed but never used to
 * pick a color on the client.
 */

import type {
  Alarm,
  ColorLabel,
  Device,
  Dispatch,
  Stats,
  TestRecord,
} from "./types.js";

/** Lamp shown for each server-reported color label. */
export type BadgeColor = "green" | "yellow" | "red";

export const BADGE_BY_LABEL: Readonly<Record<ColorLabel, BadgeColor>> = {
  Negative: "green",
  Warning: "yellow",
  Positive: "red",
};

function formatSeconds(t: number | null): string {
  return t === null ? "never" : `${t.toFixed(1)} s`;
}

function formatGps(gps: number[] | null): string | null {
  if (gps === null || gps.length < 3) {
    return null;
  }
  const [lat, lon, alt] = gps;
  return `${lat.toFixed(4)}, ${lon.toFixed(4)} (${alt.toFixed(0)} m)`;
}

function requestText(request: Record<string, unknown>, key: string): string | null {
  const value = request[key];
  return typeof value === "string" && value !== "" ? value : null;
}

// ---------------------------------------------------------------- devices

/** One fleet table row projected from a /api/devices entry. */
export interface DeviceView {
  serial: string;
  linkKind: string;
  lastSeenText: string;
  phase: string;
  batteryText: string;
  envOk: boolean | null;
  envGateText: string;
}

export function deviceView(device: Device): DeviceView {
  return {
    serial: device.serial,
    linkKind: device.link_kind,
    lastSeenText: formatSeconds(device.last_seen),
    phase: device.phase,
    batteryText:
      device.battery_pct === null ? "n/a" : `${Math.round(device.battery_pct)}%`,
    envOk: device.env_ok,
    envGateText:
      device.env_ok === null ? "unknown" : device.env_ok ? "ok" : "blocked",
  };
}

/** Fleet row enriched with the device's latest record and alarm load. */
export interface FleetRow extends DeviceView {
  gpsText: string | null;
  lastColor: BadgeColor | null;
  lastValueText: string | null;
  unackedAlarms: number;
  criticalUnacked: boolean;
}

/**
 * Join devices with their most recent record (for GPS and last result)
 * and with unacknowledged alarms. Rows keep the /api/devices order.
 */
export function fleetView(
  devices: Device[],
  records: TestRecord[],
  alarms: Alarm[],
): FleetRow[] {
  const latest = new Map<string, TestRecord>();
  for (const record of records) {
    const seen = latest.get(record.device_serial);
    if (seen === undefined || record.timestamp >= seen.timestamp) {
      latest.set(record.device_serial, record);
    }
  }
  return devices.map((device) => {
    const record = latest.get(device.serial);
    const open = alarms.filter(
      (a) => a.device_serial === device.serial && !a.acknowledged,
    );
    return {
      ...deviceView(device),
      gpsText: record === undefined ? null : formatGps(record.gps),
      lastColor: record === undefined ? null : BADGE_BY_LABEL[record.color],
      lastValueText:
        record === undefined ? null : record.predicted_mg_l.toFixed(2),
      unackedAlarms: open.length,
      criticalUnacked: open.some((a) => a.severity === "critical"),
    };
  });
}

// ---------------------------------------------------------------- records

/** Result view: badge, value, spectrum series and traceability fields. */
export interface RecordView {
  recordId: string;
  testId: string;
  deviceSerial: string;
  timestamp: number;
  timestampText: string;
  linkKind: string;
  badge: BadgeColor;
  colorLabel: ColorLabel;
  valueText: string;
  unit: "mg/l";
  spectrum: { wavelengthsNm: number[]; reflectance: number[] };
  envText: string | null;
  envViolation: boolean;
  colorMismatch: boolean;
  diagnostic: boolean;
  precision: "quantized" | "exact";
  gpsText: string | null;
  sampleId: string | null;
  source: string | null;
  region: string | null;
  correlationId: string | null;
}

export function recordView(record: TestRecord): RecordView {
  const wavelengthsNm = Object.keys(record.spectrum)
    .map(Number)
    .sort((a, b) => a - b);
  const reflectance = wavelengthsNm.map((nm) => record.spectrum[String(nm)]);
  const parts: string[] = [];
  if ("temperature_c" in record.env) {
    parts.push(`${record.env.temperature_c.toFixed(1)} C`);
  }
  if ("humidity_pct" in record.env) {
    parts.push(`${record.env.humidity_pct.toFixed(1)} %RH`);
  }
  return {
    recordId: record.record_id,
    testId: String(record.test_id),
    deviceSerial: record.device_serial,
    timestamp: record.timestamp,
    timestampText: formatSeconds(record.timestamp),
    linkKind: record.link_kind,
    badge: BADGE_BY_LABEL[record.color],
    colorLabel: record.color,
    valueText: record.predicted_mg_l.toFixed(2),
    unit: "mg/l",
    spectrum: { wavelengthsNm, reflectance },
    envText: parts.length === 0 ? null : parts.join(", "),
    envViolation: record.env_violation,
    colorMismatch: record.color_mismatch,
    diagnostic: record.diagnostic,
    precision: record.precision,
    gpsText: formatGps(record.gps),
    sampleId: requestText(record.request, "sample_id"),
    source: requestText(record.request, "source"),
    region: requestText(record.request, "region"),
    correlationId: record.correlation_id,
  };
}

// ---------------------------------------------------------------- history

export interface StatsTile {
  label: string;
  value: number;
}

/** Summary tiles: total plus one tile per traffic light color. */
export function statsTiles(stats: Stats): StatsTile[] {
  const order: ColorLabel[] = ["Negative", "Warning", "Positive"];
  return [
    { label: "Total", value: stats.count },
    ...order.map((label) => ({
      label,
      value: stats.by_color[label] ?? 0,
    })),
  ];
}

export interface HistoryView {
  rows: RecordView[];
  tiles: StatsTile[];
}

/** Records newest first plus the matching stats tiles. */
export function historyView(records: TestRecord[], stats: Stats): HistoryView {
  const rows = [...records]
    .sort((a, b) => b.timestamp - a.timestamp || (a.record_id < b.record_id ? 1 : -1))
    .map(recordView);
  return { rows, tiles: statsTiles(stats) };
}

// ---------------------------------------------------------------- triggers

/** Lifecycle of one manual test trigger, keyed by correlation id. */
export type TriggerState =
  | { kind: "pending"; correlationId: string; status: "pending" | "acked" }
  | { kind: "failed"; correlationId: string }
  | { kind: "matched"; correlationId: string; record: TestRecord };

/**
 * Resolve a dispatched manual test against the records seen so far.
 * The trigger stays pending until the correlated record arrives, even
 * after the device acknowledged the command.
 */
export function resolveTrigger(
  dispatch: Dispatch,
  records: TestRecord[],
): TriggerState {
  const match =
    records.find((r) => r.correlation_id === dispatch.correlation_id) ??
    records.find(
      (r) =>
        dispatch.matched_record_id !== null &&
        r.record_id === dispatch.matched_record_id,
    );
  if (match !== undefined) {
    return {
      kind: "matched",
      correlationId: dispatch.correlation_id,
      record: match,
    };
  }
  if (dispatch.status === "failed") {
    return { kind: "failed", correlationId: dispatch.correlation_id };
  }
  return {
    kind: "pending",
    correlationId: dispatch.correlation_id,
    status: dispatch.status === "acked" ? "acked" : "pending",
  };
}
