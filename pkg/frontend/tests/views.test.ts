import { describe, expect, it } from "vitest";

import { SUPPORTED_WAVELENGTHS_NM, type TestRecord } from "../src/types.js";
import {
  BADGE_BY_LABEL,
  deviceView,
  fleetView,
  historyView,
  recordView,
  resolveTrigger,
  statsTiles,
} from "../src/views.js";
import {
  criticalAlarm,
  freshDevice,
  idleDevice,
  negativeRecord,
  pendingDispatch,
  positiveRecord,
  sampleStats,
  warningRecord,
} from "./fixtures.js";

describe("recordView", () => {
  it("shows a red light and the value 989.92 for the positive fixture", () => {
    const view = recordView(positiveRecord());
    expect(view.badge).toBe("red");
    expect(view.colorLabel).toBe("Positive");
    expect(view.valueText).toBe("989.92");
    expect(view.unit).toBe("mg/l");
  });

  it("maps every server color label to its lamp", () => {
    expect(BADGE_BY_LABEL).toEqual({
      Negative: "green",
      Warning: "yellow",
      Positive: "red",
    });
    expect(recordView(negativeRecord()).badge).toBe("green");
    expect(recordView(warningRecord()).badge).toBe("yellow");
  });

  it("renders the server color even when the value alone would suggest another", () => {
    const contradictory: TestRecord = {
      ...positiveRecord(),
      color: "Negative",
    };
    const view = recordView(contradictory);
    expect(view.valueText).toBe("989.92");
    expect(view.badge).toBe("green");
    expect(view.colorLabel).toBe("Negative");
  });

  it("spans exactly the supported wavelength set, sorted", () => {
    const view = recordView(positiveRecord());
    expect(view.spectrum.wavelengthsNm).toEqual([...SUPPORTED_WAVELENGTHS_NM]);
    expect(view.spectrum.reflectance).toHaveLength(SUPPORTED_WAVELENGTHS_NM.length);
  });

  it("aligns reflectance with wavelengths regardless of key order", () => {
    const record = positiveRecord();
    const shuffled: TestRecord = {
      ...record,
      spectrum: { "940": 149.75, "410": 180.25, "560": 285.0 },
    };
    const view = recordView(shuffled);
    expect(view.spectrum.wavelengthsNm).toEqual([410, 560, 940]);
    expect(view.spectrum.reflectance).toEqual([180.25, 285.0, 149.75]);
  });

  it("carries the violation and mismatch flags through unchanged", () => {
    const flagged = recordView({
      ...positiveRecord(),
      env_violation: true,
      color_mismatch: true,
    });
    expect(flagged.envViolation).toBe(true);
    expect(flagged.colorMismatch).toBe(true);
    expect(recordView(positiveRecord()).envViolation).toBe(false);
  });

  it("fills the traceability fields from the record", () => {
    const view = recordView(positiveRecord());
    expect(view.testId).toBe("17");
    expect(view.recordId).toBe("SG-100:17");
    expect(view.deviceSerial).toBe("SG-100");
    expect(view.linkKind).toBe("lorawan");
    expect(view.timestampText).toBe("615.0 s");
    expect(view.precision).toBe("quantized");
    expect(view.envText).toBe("22.0 C, 55.0 %RH");
    expect(view.gpsText).toBe("-31.4000, -64.2000 (400 m)");
    expect(view.sampleId).toBe("SG-100-S017");
    expect(view.source).toBe("well");
  });

  it("matches the recorded snapshot for the positive fixture", () => {
    expect(recordView(positiveRecord())).toMatchSnapshot();
  });
});

describe("deviceView", () => {
  it("projects a seen device", () => {
    const view = deviceView(idleDevice());
    expect(view).toEqual({
      serial: "SG-100",
      linkKind: "lorawan",
      lastSeenText: "615.0 s",
      phase: "idle",
      batteryText: "87%",
      envOk: true,
      envGateText: "ok",
    });
  });

  it("handles a never-seen device with unknown env state", () => {
    const view = deviceView(freshDevice());
    expect(view.lastSeenText).toBe("never");
    expect(view.batteryText).toBe("n/a");
    expect(view.envGateText).toBe("unknown");
  });

  it("marks a blocked env gate", () => {
    const view = deviceView({ ...idleDevice(), env_ok: false });
    expect(view.envGateText).toBe("blocked");
  });
});

describe("fleetView", () => {
  it("joins each device with its latest record and open alarms", () => {
    const rows = fleetView(
      [idleDevice(), freshDevice()],
      [positiveRecord(), negativeRecord(), warningRecord()],
      [criticalAlarm()],
    );
    expect(rows).toHaveLength(2);
    const [sg100, sg200] = rows;
    expect(sg100.serial).toBe("SG-100");
    expect(sg100.lastColor).toBe("green");
    expect(sg100.lastValueText).toBe("-14.07");
    expect(sg100.gpsText).toBe("-31.4000, -64.2000 (400 m)");
    expect(sg100.unackedAlarms).toBe(1);
    expect(sg100.criticalUnacked).toBe(true);
    expect(sg200.lastColor).toBe("yellow");
    expect(sg200.gpsText).toBeNull();
    expect(sg200.unackedAlarms).toBe(0);
  });

  it("ignores acknowledged alarms and devices without records", () => {
    const acked = { ...criticalAlarm(), acknowledged: true };
    const rows = fleetView([idleDevice()], [], [acked]);
    expect(rows[0].unackedAlarms).toBe(0);
    expect(rows[0].lastColor).toBeNull();
    expect(rows[0].lastValueText).toBeNull();
  });
});

describe("statsTiles and historyView", () => {
  it("builds a total tile plus one tile per color", () => {
    expect(statsTiles(sampleStats())).toEqual([
      { label: "Total", value: 3 },
      { label: "Negative", value: 1 },
      { label: "Warning", value: 1 },
      { label: "Positive", value: 1 },
    ]);
  });

  it("defaults missing colors to zero", () => {
    const tiles = statsTiles({
      count: 1,
      by_color: { Positive: 1 },
      by_region: {},
      by_device: {},
    });
    expect(tiles).toContainEqual({ label: "Negative", value: 0 });
    expect(tiles).toContainEqual({ label: "Warning", value: 0 });
  });

  it("orders history rows newest first", () => {
    const view = historyView(
      [positiveRecord(), warningRecord(), negativeRecord()],
      sampleStats(),
    );
    expect(view.rows.map((r) => r.recordId)).toEqual([
      "SG-100:18",
      "SG-200:3",
      "SG-100:17",
    ]);
    expect(view.tiles[0]).toEqual({ label: "Total", value: 3 });
  });
});

describe("resolveTrigger", () => {
  it("stays pending until the correlated record arrives", () => {
    const dispatch = pendingDispatch();
    expect(resolveTrigger(dispatch, [])).toEqual({
      kind: "pending",
      correlationId: "cmd-1",
      status: "pending",
    });
    expect(resolveTrigger({ ...dispatch, status: "acked" }, [positiveRecord()]))
      .toMatchObject({ kind: "pending", status: "acked" });
  });

  it("resolves when a record carries the correlation id", () => {
    const state = resolveTrigger(pendingDispatch(), [warningRecord()]);
    expect(state.kind).toBe("matched");
    if (state.kind === "matched") {
      expect(state.record.record_id).toBe("SG-200:3");
    }
  });

  it("resolves through matched_record_id when the record lost its id", () => {
    const dispatch = {
      ...pendingDispatch(),
      status: "matched" as const,
      matched_record_id: "SG-100:17",
    };
    const state = resolveTrigger(dispatch, [positiveRecord()]);
    expect(state.kind).toBe("matched");
  });

  it("reports a failed dispatch", () => {
    const state = resolveTrigger(
      { ...pendingDispatch(), status: "failed" },
      [],
    );
    expect(state).toEqual({ kind: "failed", correlationId: "cmd-1" });
  });
});
