/**
 * Wire types for the water-test platform HTTP JSON API.
 *
 * Every interface mirrors a server response shape one-to-one. The
 * dashboard never invents fields and never re-derives the traffic
 * light color: the server-reported `color` label is authoritative.
 */

/** Traffic light labels as reported by the server. */
export type ColorLabel = "Negative" | "Warning" | "Positive";

/** Alarm severities accepted by GET /api/alarms?severity=. */
export type Severity = "advisory" | "critical";

/** Reflectance channels every sensor reports, in nm. */
export const SUPPORTED_WAVELENGTHS_NM: readonly number[] = [
  410, 435, 460, 485, 510, 535, 560, 585, 610, 645,
  705, 730, 760, 810, 860, 900, 940,
];

/** One stored test result, as returned by /api/records and /api/ingest. */
export interface TestRecord {
  /** Per-device test counter; record_id ("serial:test_id") is globally unique. */
  test_id: number;
  record_id: string;
  device_serial: string;
  timestamp: number;
  link_kind: string;
  predicted_mg_l: number;
  color: ColorLabel;
  /** Reflectance keyed by wavelength in nm (JSON object keys are strings). */
  spectrum: Record<string, number>;
  /** Ambient readings captured with the test (temperature_c, humidity_pct, accel_*). */
  env: Record<string, number>;
  /** [lat_deg, lon_deg, alt_m] or null when the device has no fix. */
  gps: number[] | null;
  /** Requester-supplied metadata (sample_id, source, region, ...). */
  request: Record<string, unknown>;
  diagnostic: boolean;
  env_violation: boolean;
  color_mismatch: boolean;
  precision: "quantized" | "exact";
  correlation_id: string | null;
}

/** One raised alarm, as returned by /api/alarms. */
export interface Alarm {
  alarm_id: number;
  test_id: number;
  record_id: string;
  device_serial: string;
  severity: Severity;
  created_at: number;
  acknowledged: boolean;
}

/** Registered device shadow, as returned by /api/devices. */
export interface Device {
  serial: string;
  link_kind: string;
  device_eui: string | null;
  last_seen: number | null;
  phase: string;
  battery_pct: number | null;
  env_ok: boolean | null;
}

/** One platform-to-device command in flight, as returned by the rpc endpoints. */
export interface Dispatch {
  correlation_id: string;
  device_serial: string;
  method: string;
  created_at: number;
  status: "pending" | "acked" | "matched" | "failed";
  matched_record_id: string | null;
}

/** Page of records from GET /api/records. */
export interface RecordsPage {
  records: TestRecord[];
  next_cursor: string | null;
}

/** Aggregates from GET /api/stats (diagnostics excluded server-side). */
export interface Stats {
  count: number;
  by_color: Record<string, number>;
  by_region: Record<string, number>;
  by_device: Record<string, number>;
}

/** Aligned spectrum series from GET /api/records/{id}/spectrum. */
export interface SpectrumSeries {
  record_id: string;
  wavelengths_nm: number[];
  reflectance: number[];
  precision: "quantized" | "exact";
}
