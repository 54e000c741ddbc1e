/**
 * HTML renderers for the dashboard views.
 *
 * Each renderer turns a view model into a markup string, keeping the
 * whole render path pure and testable without a browser. data-*
 * attributes expose the machine-readable facts (badge, record id) the
 * tests and the app shell key on.
 */

import { chartModel, renderChartSvg } from "./chart.js";
import type { Alarm } from "./types.js";
import type {
  BadgeColor,
  FleetRow,
  RecordView,
  StatsTile,
  TriggerState,
} from "./views.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function esc(value: string | null): string {
  return value === null ? "" : escapeHtml(value);
}

/** Three-lamp traffic light with the reported lamp lit. */
export function renderTrafficLight(badge: BadgeColor): string {
  const lamp = (color: BadgeColor) =>
    `<span class="lamp ${color}${color === badge ? " on" : ""}"></span>`;
  return (
    `<div class="traffic-light" data-badge="${badge}">` +
    lamp("red") +
    lamp("yellow") +
    lamp("green") +
    `</div>`
  );
}

function traceRow(label: string, value: string | null): string {
  if (value === null) {
    return "";
  }
  return (
    `<tr><th>${escapeHtml(label)}</th>` +
    `<td>${escapeHtml(value)}</td></tr>`
  );
}

/** Full result panel: light, value, spectrum chart, traceability table. */
export function renderResult(view: RecordView): string {
  const banner = view.envViolation
    ? `<div class="banner warning" role="alert">` +
      `ambient conditions were out of range during this test</div>`
    : "";
  const mismatch = view.colorMismatch
    ? `<div class="banner notice">device and platform color differ;` +
      ` showing the platform color</div>`
    : "";
  const chart = renderChartSvg(
    chartModel(view.spectrum.wavelengthsNm, view.spectrum.reflectance),
  );
  return (
    `<section class="result" data-record-id="${escapeHtml(view.recordId)}"` +
    ` data-badge="${view.badge}">` +
    banner +
    mismatch +
    renderTrafficLight(view.badge) +
    `<p class="reading"><span class="value">${escapeHtml(view.valueText)}</span>` +
    ` <span class="unit">${view.unit}</span>` +
    ` <span class="color-label">${view.colorLabel}</span></p>` +
    chart +
    `<table class="traceability">` +
    traceRow("test", view.testId) +
    traceRow("record", view.recordId) +
    traceRow("device", view.deviceSerial) +
    traceRow("link", view.linkKind) +
    traceRow("measured at", view.timestampText) +
    traceRow("precision", view.precision) +
    traceRow("ambient", view.envText) +
    traceRow("position", view.gpsText) +
    traceRow("sample", view.sampleId) +
    traceRow("source", view.source) +
    traceRow("region", view.region) +
    traceRow("correlation", view.correlationId) +
    `</table>` +
    `</section>`
  );
}

/** Fleet table; one row per device with trigger buttons. */
export function renderFleet(rows: FleetRow[]): string {
  const body = rows
    .map((row) => {
      const alarmCell = row.unackedAlarms === 0
        ? ""
        : `<span class="alarm-count${row.criticalUnacked ? " critical" : ""}">` +
          `${row.unackedAlarms}</span>`;
      const lamp = row.lastColor === null
        ? ""
        : `<span class="dot ${row.lastColor}" data-badge="${row.lastColor}"></span>`;
      return (
        `<tr data-serial="${escapeHtml(row.serial)}">` +
        `<td>${escapeHtml(row.serial)}</td>` +
        `<td>${escapeHtml(row.linkKind)}</td>` +
        `<td>${escapeHtml(row.lastSeenText)}</td>` +
        `<td>${escapeHtml(row.phase)}</td>` +
        `<td>${escapeHtml(row.batteryText)}</td>` +
        `<td class="env-${esc(row.envGateText)}">${esc(row.envGateText)}</td>` +
        `<td>${esc(row.gpsText)}</td>` +
        `<td>${lamp}${esc(row.lastValueText)}</td>` +
        `<td>${alarmCell}</td>` +
        `<td><button class="trigger" data-serial="${escapeHtml(row.serial)}">` +
        `run test</button></td>` +
        `</tr>`
      );
    })
    .join("");
  return (
    `<table class="fleet"><thead><tr>` +
    `<th>device</th><th>link</th><th>last seen</th><th>phase</th>` +
    `<th>battery</th><th>env gate</th><th>position</th><th>last result</th>` +
    `<th>alarms</th><th></th>` +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}

/** Stats tiles plus a result table, newest first. */
export function renderHistory(rows: RecordView[], tiles: StatsTile[]): string {
  const tileHtml = tiles
    .map(
      (tile) =>
        `<div class="tile" data-label="${escapeHtml(tile.label)}">` +
        `<span class="tile-value">${tile.value}</span>` +
        `<span class="tile-label">${escapeHtml(tile.label)}</span></div>`,
    )
    .join("");
  const body = rows
    .map(
      (row) =>
        `<tr data-record-id="${escapeHtml(row.recordId)}">` +
        `<td>${escapeHtml(row.timestampText)}</td>` +
        `<td>${escapeHtml(row.deviceSerial)}</td>` +
        `<td><span class="dot ${row.badge}" data-badge="${row.badge}"></span>` +
        `${row.colorLabel}</td>` +
        `<td>${escapeHtml(row.valueText)} ${row.unit}</td>` +
        `<td>${esc(row.sampleId)}</td>` +
        `<td>${row.diagnostic ? "diagnostic" : ""}</td>` +
        `<td><button class="open" data-record-id="${escapeHtml(row.recordId)}">` +
        `view</button></td>` +
        `</tr>`,
    )
    .join("");
  return (
    `<div class="tiles">${tileHtml}</div>` +
    `<table class="history"><thead><tr>` +
    `<th>time</th><th>device</th><th>color</th><th>value</th>` +
    `<th>sample</th><th></th><th></th>` +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}

/** Alarm list with acknowledge buttons. */
export function renderAlarms(alarms: Alarm[]): string {
  if (alarms.length === 0) {
    return `<p class="no-alarms">no alarms</p>`;
  }
  const items = alarms
    .map(
      (alarm) =>
        `<li class="alarm ${alarm.severity}" data-alarm-id="${alarm.alarm_id}">` +
        `<span class="severity">${alarm.severity}</span> ` +
        `${escapeHtml(alarm.device_serial)} ` +
        `<span class="at">${alarm.created_at.toFixed(1)} s</span>` +
        (alarm.acknowledged
          ? ` <span class="acked">acknowledged</span>`
          : ` <button class="ack" data-alarm-id="${alarm.alarm_id}">ack</button>`) +
        `</li>`,
    )
    .join("");
  return `<ul class="alarms">${items}</ul>`;
}

/** Banner for a manual test in flight, resolved, or failed. */
export function renderTriggerState(state: TriggerState | null): string {
  if (state === null) {
    return "";
  }
  if (state.kind === "pending") {
    return (
      `<div class="trigger-state pending" data-correlation="` +
      `${escapeHtml(state.correlationId)}">test requested (${state.status}),` +
      ` waiting for the result...</div>`
    );
  }
  if (state.kind === "failed") {
    return (
      `<div class="trigger-state failed" data-correlation="` +
      `${escapeHtml(state.correlationId)}">the device rejected the command</div>`
    );
  }
  return (
    `<div class="trigger-state matched" data-correlation="` +
    `${escapeHtml(state.correlationId)}" data-record-id="` +
    `${escapeHtml(state.record.record_id)}">result received</div>`
  );
}
