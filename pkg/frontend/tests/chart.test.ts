import { describe, expect, it } from "vitest";

import { chartModel, renderChartSvg } from "../src/chart.js";
import { SUPPORTED_WAVELENGTHS_NM } from "../src/types.js";
import { recordView } from "../src/views.js";
import { positiveRecord } from "./fixtures.js";

function fullSeries(): { nm: number[]; values: number[] } {
  const view = recordView(positiveRecord());
  return {
    nm: view.spectrum.wavelengthsNm,
    values: view.spectrum.reflectance,
  };
}

describe("chartModel", () => {
  it("puts one x tick per supported wavelength, in order", () => {
    const { nm, values } = fullSeries();
    const model = chartModel(nm, values);
    expect(model.xTicks).toEqual([...SUPPORTED_WAVELENGTHS_NM]);
  });

  it("sorts an unordered series by wavelength", () => {
    const model = chartModel([940, 410, 560], [1.0, 3.0, 2.0]);
    expect(model.xTicks).toEqual([410, 560, 940]);
    expect(model.points.map((p) => p.value)).toEqual([3.0, 2.0, 1.0]);
  });

  it("maps points inside the padded frame with x increasing", () => {
    const { nm, values } = fullSeries();
    const model = chartModel(nm, values, { width: 640, height: 240, padding: 36 });
    for (const point of model.points) {
      expect(point.x).toBeGreaterThanOrEqual(36);
      expect(point.x).toBeLessThanOrEqual(640 - 36);
      expect(point.y).toBeGreaterThanOrEqual(36);
      expect(point.y).toBeLessThanOrEqual(240 - 36);
    }
    for (let i = 1; i < model.points.length; i += 1) {
      expect(model.points[i].x).toBeGreaterThan(model.points[i - 1].x);
    }
  });

  it("places the minimum at the bottom and the maximum at the top", () => {
    const model = chartModel([410, 560, 940], [10.0, 30.0, 20.0], {
      height: 240,
      padding: 36,
    });
    const byNm = new Map(model.points.map((p) => [p.nm, p]));
    expect(byNm.get(410)?.y).toBe(240 - 36);
    expect(byNm.get(560)?.y).toBe(36);
  });

  it("survives a flat series without collapsing the y scale", () => {
    const model = chartModel([410, 560], [5.0, 5.0]);
    expect(model.yMin).toBeLessThan(model.yMax);
    expect(Number.isFinite(model.points[0].y)).toBe(true);
  });

  it("rejects misaligned or empty series", () => {
    expect(() => chartModel([410, 560], [1.0])).toThrow(/length mismatch/);
    expect(() => chartModel([], [])).toThrow(/empty/);
  });
});

describe("renderChartSvg", () => {
  it("emits one polyline and a tick label per wavelength", () => {
    const { nm, values } = fullSeries();
    const svg = renderChartSvg(chartModel(nm, values));
    expect(svg).toContain("<svg");
    expect(svg.match(/<polyline/g)).toHaveLength(1);
    for (const wavelength of SUPPORTED_WAVELENGTHS_NM) {
      expect(svg).toContain(`>${wavelength}</text>`);
    }
  });

  it("matches the recorded snapshot for the positive fixture", () => {
    const { nm, values } = fullSeries();
    expect(renderChartSvg(chartModel(nm, values))).toMatchSnapshot();
  });
});
