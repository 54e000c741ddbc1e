/**
 * Browser entry point: wires the poller, the pure views and the
 * renderers to the DOM. All state lives in the latest snapshot plus
 * three UI selections (active trigger, open record, history filter);
 * every pass re-renders from those, so the newest copy of a record
 * always wins.
 */

import { createApiClient, type RecordQuery } from "./api.js";
import {
  createPoller,
  type DashboardSnapshot,
  emptySnapshot,
} from "./poller.js";
import {
  renderAlarms,
  renderFleet,
  renderHistory,
  renderResult,
  renderTriggerState,
} from "./render.js";
import type { Dispatch, TestRecord } from "./types.js";
import {
  fleetView,
  historyView,
  recordView,
  resolveTrigger,
} from "./views.js";

function apiBase(): string {
  const override = new URLSearchParams(window.location.search).get("api");
  return override ?? window.location.origin;
}

function mount(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing #${id}`);
  }
  return node;
}

export function startApp(): void {
  const client = createApiClient(apiBase());
  const fleetEl = mount("fleet");
  const triggerEl = mount("trigger");
  const resultEl = mount("result");
  const historyEl = mount("history");
  const alarmsEl = mount("alarms");
  const statusEl = mount("status");
  const form = mount("search") as unknown as HTMLFormElement;

  let snapshot: DashboardSnapshot = emptySnapshot();
  let activeDispatch: Dispatch | null = null;
  let openRecordId: string | null = null;
  let historyRecords: TestRecord[] = [];
  let historyStats = { count: 0, by_color: {}, by_region: {}, by_device: {} };

  function render(): void {
    fleetEl.innerHTML = renderFleet(
      fleetView(snapshot.devices, snapshot.records, snapshot.alarms),
    );
    const trigger =
      activeDispatch === null
        ? null
        : resolveTrigger(activeDispatch, snapshot.records);
    triggerEl.innerHTML = renderTriggerState(trigger);
    if (trigger !== null && trigger.kind === "matched") {
      openRecordId = trigger.record.record_id;
    }
    const open =
      openRecordId === null
        ? undefined
        : snapshot.recordsById.get(openRecordId) ??
          historyRecords.find((r) => r.record_id === openRecordId);
    resultEl.innerHTML = open === undefined ? "" : renderResult(recordView(open));
    const history = historyView(historyRecords, historyStats);
    historyEl.innerHTML = renderHistory(history.rows, history.tiles);
    alarmsEl.innerHTML = renderAlarms(snapshot.alarms);
  }

  async function searchHistory(query: RecordQuery): Promise<void> {
    const [page, stats] = await Promise.all([
      client.listRecords(query),
      client.getStats(query),
    ]);
    historyRecords = page.records;
    historyStats = stats;
    render();
  }

  document.body.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const serial = target.closest<HTMLElement>("button.trigger")?.dataset.serial;
    if (serial !== undefined) {
      client
        .triggerManualTest(serial)
        .then((dispatch) => {
          activeDispatch = dispatch;
          render();
        })
        .catch((error) => {
          statusEl.textContent = String(error);
        });
      return;
    }
    const ackId = target.closest<HTMLElement>("button.ack")?.dataset.alarmId;
    if (ackId !== undefined) {
      client
        .ackAlarm(Number(ackId))
        .then(() => poller.tick())
        .catch((error) => {
          statusEl.textContent = String(error);
        });
      return;
    }
    const recordId = target.closest<HTMLElement>("button.open")?.dataset.recordId;
    if (recordId !== undefined) {
      openRecordId = recordId;
      render();
    }
  });

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const query: RecordQuery = {};
    const from = String(data.get("from") ?? "");
    const to = String(data.get("to") ?? "");
    const color = String(data.get("color") ?? "");
    if (from !== "") {
      query.from = Number(from);
    }
    if (to !== "") {
      query.to = Number(to);
    }
    if (color !== "") {
      query.color = color;
    }
    searchHistory(query).catch((error) => {
      statusEl.textContent = String(error);
    });
  });

  const poller = createPoller(
    client,
    (fresh) => {
      snapshot = fresh;
      statusEl.textContent = `connected to ${client.baseUrl}`;
      render();
    },
    (error) => {
      statusEl.textContent = `poll failed: ${String(error)}`;
    },
  );
  poller.start();
}

startApp();
