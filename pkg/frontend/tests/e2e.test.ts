/**
 * End-to-end: spawn the platform server with one emulated demo
 * device, then drive it exactly as the browser app would, through the
 * typed client, the poller and the pure views. Asserts that a manual
 * test triggered from the dashboard produces a rendered traffic light
 * and spectrum chart matching the stored record, and that a history
 * search by time range finds it.
 */

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { createApiClient, type ApiClient } from "../src/api.js";
import { chartModel } from "../src/chart.js";
import { createPoller, type Poller } from "../src/poller.js";
import { renderResult, renderTrafficLight } from "../src/render.js";
import { SUPPORTED_WAVELENGTHS_NM, type TestRecord } from "../src/types.js";
import {
  BADGE_BY_LABEL,
  recordView,
  resolveTrigger,
} from "../src/views.js";

const LONG = 120_000;
const SERIAL = "SG-DEMO";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        probe.close(() => reject(new Error("no port assigned")));
        return;
      }
      probe.close(() => resolve(address.port));
    });
  });
}

async function waitFor<T>(
  probe: () => Promise<T | undefined>,
  what: string,
  deadlineMs = 60_000,
  stepMs = 250,
): Promise<T> {
  const deadline = Date.now() + deadlineMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const value = await probe();
      if (value !== undefined) {
        return value;
      }
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, stepMs));
  }
  throw new Error(`timed out waiting for ${what}: ${String(lastError)}`);
}

describe("dashboard against a live server", () => {
  let child: ChildProcess;
  let dataDir: string;
  let client: ApiClient;
  let poller: Poller;
  const serverLog: string[] = [];

  beforeAll(async () => {
    const port = await freePort();
    dataDir = mkdtempSync(join(tmpdir(), "dashboard-e2e-"));
    child = spawn(
      "python3",
      [
        "-m", "glyscan.cli", "serve",
        "--demo",
        "--time-scale", "400",
        "--host", "127.0.0.1",
        "--port", String(port),
        "--data-dir", dataDir,
      ],
      { stdio: ["ignore", "pipe", "pipe"] },
    );
    child.stdout?.on("data", (chunk: Buffer) => serverLog.push(String(chunk)));
    child.stderr?.on("data", (chunk: Buffer) => serverLog.push(String(chunk)));
    client = createApiClient(`http://127.0.0.1:${port}`);
    poller = createPoller(client, () => undefined);
    await waitFor(async () => {
      const devices = await client.listDevices();
      return devices.length > 0 ? devices : undefined;
    }, `server on port ${port} (log: ${serverLog.join("") || "empty"})`);
  }, LONG);

  afterAll(() => {
    child?.kill("SIGTERM");
    if (dataDir !== undefined) {
      rmSync(dataDir, { recursive: true, force: true });
    }
  });

  it(
    "runs a manual test end to end and renders the stored result",
    async () => {
      // the demo schedule runs one test on its own; wait for the device
      // to go back to idle so the manual trigger is not rejected as busy
      await waitFor(async () => {
        const snapshot = await poller.tick();
        const device = snapshot.devices.find((d) => d.serial === SERIAL);
        const settled =
          device !== undefined &&
          device.phase === "idle" &&
          snapshot.records.length > 0;
        return settled ? true : undefined;
      }, "the demo test to finish");
      const before = new Set(poller.snapshot.records.map((r) => r.record_id));

      const dispatch = await client.triggerManualTest(SERIAL);
      expect(dispatch.device_serial).toBe(SERIAL);
      expect(dispatch.method).toBe("manualTest");
      // over the in-process broker the device may ack immediately, but
      // the trigger stays in the waiting state until the record lands
      expect(["pending", "acked"]).toContain(dispatch.status);
      expect(
        resolveTrigger(dispatch, poller.snapshot.records).kind,
      ).toBe("pending");

      // poll exactly as the app does until the correlated record lands
      const record = await waitFor<TestRecord>(async () => {
        const snapshot = await poller.tick();
        const latest = snapshot.dispatches.find(
          (d) => d.correlation_id === dispatch.correlation_id,
        );
        const state = resolveTrigger(latest ?? dispatch, snapshot.records);
        return state.kind === "matched" ? state.record : undefined;
      }, "the manual test record");

      expect(before.has(record.record_id)).toBe(false);
      expect(record.device_serial).toBe(SERIAL);
      expect(record.correlation_id).toBe(dispatch.correlation_id);

      // the rendered light is a pure function of the stored color
      const view = recordView(record);
      expect(view.badge).toBe(BADGE_BY_LABEL[record.color]);
      const html = renderResult(view);
      expect(html).toContain(`data-badge="${view.badge}"`);
      expect(html).toContain(renderTrafficLight(view.badge));
      expect(html).toContain(
        `<span class="value">${record.predicted_mg_l.toFixed(2)}</span>`,
      );

      // the chart spans exactly the supported wavelength set and plots
      // the stored reflectance values
      const model = chartModel(
        view.spectrum.wavelengthsNm,
        view.spectrum.reflectance,
      );
      expect(model.xTicks).toEqual([...SUPPORTED_WAVELENGTHS_NM]);
      for (const point of model.points) {
        expect(point.value).toBe(record.spectrum[String(point.nm)]);
      }
      expect(html).toContain(`points="${model.polyline}"`);

      // the spectrum endpoint agrees with the record the view rendered
      const series = await client.getSpectrum(record.record_id);
      expect(series.wavelengths_nm).toEqual(view.spectrum.wavelengthsNm);
      expect(series.reflectance).toEqual(view.spectrum.reflectance);

      // history search by time range around the record finds it
      const hit = await client.listRecords({
        from: record.timestamp - 1,
        to: record.timestamp + 1,
        device: SERIAL,
      });
      expect(hit.records.map((r) => r.record_id)).toContain(record.record_id);
      const colored = await client.listRecords({
        from: record.timestamp - 1,
        to: record.timestamp + 1,
        color: record.color,
      });
      expect(colored.records.map((r) => r.record_id)).toContain(record.record_id);
      const stats = await client.getStats({
        from: record.timestamp - 1,
        to: record.timestamp + 1,
      });
      expect(stats.count).toBeGreaterThanOrEqual(1);
      expect(stats.by_color[record.color]).toBeGreaterThanOrEqual(1);

      // a disjoint range does not return it
      const miss = await client.listRecords({
        from: record.timestamp + 10_000,
        to: record.timestamp + 10_001,
      });
      expect(miss.records.map((r) => r.record_id)).not.toContain(record.record_id);
    },
    LONG,
  );

  it(
    "acknowledges an alarm raised by the demo device",
    async () => {
      // the 600 mg/l demo sample classifies Positive, raising an alarm
      const alarm = await waitFor(async () => {
        const alarms = await client.listAlarms({ acknowledged: false });
        return alarms.length > 0 ? alarms[0] : undefined;
      }, "an open alarm");
      expect(alarm.device_serial).toBe(SERIAL);

      const acked = await client.ackAlarm(alarm.alarm_id);
      expect(acked.alarm_id).toBe(alarm.alarm_id);
      expect(acked.acknowledged).toBe(true);

      const stillOpen = await client.listAlarms({ acknowledged: false });
      expect(stillOpen.map((a) => a.alarm_id)).not.toContain(alarm.alarm_id);
    },
    LONG,
  );
});
