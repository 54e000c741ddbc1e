/**
 * Typed fetch client for the water-test platform HTTP JSON API.
 *
 * The client is the dashboard's only channel to the platform: every
 * view is computed from the JSON these calls return. A fetch
 * implementation can be injected for tests.
 */

import type {
  Alarm,
  Device,
  Dispatch,
  RecordsPage,
  SpectrumSeries,
  Stats,
} from "./types.js";

/** Filter and paging parameters for /api/records and /api/stats. */
export interface RecordQuery {
  from?: number;
  to?: number;
  device?: string;
  color?: string;
  region?: string;
  cursor?: string;
  limit?: number;
}

export interface AlarmQuery {
  severity?: string;
  acknowledged?: boolean;
}

/** Non-2xx response, carrying the server's detail message. */
export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
  }
}

type QueryParams = Record<string, string | number | boolean | undefined>;

/** Build a query string, skipping undefined values. Empty input gives "". */
export function buildQuery(params: QueryParams): string {
  const search = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined) {
      search.set(key, String(value));
    }
  }
  const encoded = search.toString();
  return encoded === "" ? "" : `?${encoded}`;
}

export interface ApiClient {
  readonly baseUrl: string;
  listRecords(query?: RecordQuery): Promise<RecordsPage>;
  getStats(query?: RecordQuery): Promise<Stats>;
  listDevices(): Promise<Device[]>;
  listAlarms(query?: AlarmQuery): Promise<Alarm[]>;
  ackAlarm(alarmId: number): Promise<Alarm>;
  triggerManualTest(serial: string): Promise<Dispatch>;
  listDispatches(): Promise<Dispatch[]>;
  getSpectrum(recordId: string): Promise<SpectrumSeries>;
}

/**
 * Create a client bound to a base URL such as "http://127.0.0.1:8000".
 */
export function createApiClient(
  baseUrl: string,
  fetchFn: typeof fetch = fetch,
): ApiClient {
  const root = baseUrl.replace(/\/+$/, "");

  async function request<T>(method: string, path: string): Promise<T> {
    const response = await fetchFn(`${root}${path}`, { method });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (typeof body.detail === "string") {
          detail = body.detail;
        }
      } catch {
        // keep the status text when the error body is not JSON
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  return {
    baseUrl: root,
    listRecords(query = {}) {
      return request<RecordsPage>("GET", `/api/records${buildQuery({ ...query })}`);
    },
    getStats(query = {}) {
      const { cursor, limit, ...filter } = query;
      return request<Stats>("GET", `/api/stats${buildQuery({ ...filter })}`);
    },
    listDevices() {
      return request<Device[]>("GET", "/api/devices");
    },
    listAlarms(query = {}) {
      return request<Alarm[]>("GET", `/api/alarms${buildQuery({ ...query })}`);
    },
    ackAlarm(alarmId) {
      return request<Alarm>("POST", `/api/alarms/${alarmId}/ack`);
    },
    triggerManualTest(serial) {
      return request<Dispatch>(
        "POST",
        `/api/devices/${encodeURIComponent(serial)}/rpc/manualTest`,
      );
    },
    listDispatches() {
      return request<Dispatch[]>("GET", "/api/dispatches");
    },
    getSpectrum(recordId) {
      return request<SpectrumSeries>(
        "GET",
        `/api/records/${encodeURIComponent(recordId)}/spectrum`,
      );
    },
  };
}
