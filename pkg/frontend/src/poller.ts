/**
 * Polling loop that keeps a dashboard snapshot in sync with the API.
 *
 * The platform has no push channel, so the dashboard polls every
 * POLL_INTERVAL_MS. Records are merged last-write-wins keyed by
 * record id: re-delivered or re-fetched records replace their earlier
 * copy instead of duplicating it.
 */

import type { ApiClient } from "./api.js";
import type { Alarm, Device, Dispatch, TestRecord } from "./types.js";

export const POLL_INTERVAL_MS = 2000;

/** Everything a render pass needs, as last reported by the server. */
export interface DashboardSnapshot {
  devices: Device[];
  recordsById: Map<string, TestRecord>;
  records: TestRecord[];
  alarms: Alarm[];
  dispatches: Dispatch[];
}

/** Merge incoming records into the map, newest write winning per id. */
export function mergeRecords(
  recordsById: Map<string, TestRecord>,
  incoming: TestRecord[],
): Map<string, TestRecord> {
  const merged = new Map(recordsById);
  for (const record of incoming) {
    merged.set(record.record_id, record);
  }
  return merged;
}

export function emptySnapshot(): DashboardSnapshot {
  return {
    devices: [],
    recordsById: new Map(),
    records: [],
    alarms: [],
    dispatches: [],
  };
}

export interface Poller {
  /** Run one fetch-and-merge pass immediately. */
  tick(): Promise<DashboardSnapshot>;
  start(): void;
  stop(): void;
  readonly snapshot: DashboardSnapshot;
}

/**
 * Create a poller that reports each fresh snapshot to onUpdate and
 * fetch failures to onError (the loop keeps running either way).
 */
export function createPoller(
  client: ApiClient,
  onUpdate: (snapshot: DashboardSnapshot) => void,
  onError: (error: unknown) => void = () => undefined,
  intervalMs: number = POLL_INTERVAL_MS,
): Poller {
  let snapshot = emptySnapshot();
  let timer: ReturnType<typeof setInterval> | null = null;

  async function tick(): Promise<DashboardSnapshot> {
    const [devices, page, alarms, dispatches] = await Promise.all([
      client.listDevices(),
      client.listRecords({ limit: 1000 }),
      client.listAlarms(),
      client.listDispatches(),
    ]);
    const recordsById = mergeRecords(snapshot.recordsById, page.records);
    snapshot = {
      devices,
      recordsById,
      records: [...recordsById.values()],
      alarms,
      dispatches,
    };
    onUpdate(snapshot);
    return snapshot;
  }

  return {
    tick,
    start() {
      if (timer !== null) {
        return;
      }
      const safeTick = () => tick().catch(onError);
      void safeTick();
      timer = setInterval(safeTick, intervalMs);
    },
    stop() {
      if (timer !== null) {
        clearInterval(timer);
        timer = null;
      }
    },
    get snapshot() {
      return snapshot;
    },
  };
}
