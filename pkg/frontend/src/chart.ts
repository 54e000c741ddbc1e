/**
 * Spectrum line chart as a pure SVG string.
 *
 * The chart is computed in two stages so tests can assert on the
 * geometry without parsing markup: chartModel() maps the series to
 * pixel coordinates, renderChartSvg() serializes the model. The x
 * axis carries one tick per reported wavelength, nothing else.
 */

export interface ChartOptions {
  width?: number;
  height?: number;
  padding?: number;
}

export interface ChartPoint {
  nm: number;
  value: number;
  x: number;
  y: number;
}

export interface ChartModel {
  width: number;
  height: number;
  padding: number;
  xTicks: number[];
  points: ChartPoint[];
  polyline: string;
  yMin: number;
  yMax: number;
}

const DEFAULTS = { width: 640, height: 240, padding: 36 };

/**
 * Map an aligned (wavelength, reflectance) series to chart geometry.
 * Wavelengths may arrive in any order; the model is sorted by nm.
 */
export function chartModel(
  wavelengthsNm: number[],
  reflectance: number[],
  options: ChartOptions = {},
): ChartModel {
  if (wavelengthsNm.length !== reflectance.length) {
    throw new Error(
      `series length mismatch: ${wavelengthsNm.length} wavelengths, ` +
        `${reflectance.length} values`,
    );
  }
  if (wavelengthsNm.length === 0) {
    throw new Error("empty spectrum");
  }
  const { width, height, padding } = { ...DEFAULTS, ...options };
  const series = wavelengthsNm
    .map((nm, i) => ({ nm, value: reflectance[i] }))
    .sort((a, b) => a.nm - b.nm);

  const nmMin = series[0].nm;
  const nmMax = series[series.length - 1].nm;
  const nmSpan = nmMax - nmMin;
  let yMin = Math.min(...series.map((p) => p.value));
  let yMax = Math.max(...series.map((p) => p.value));
  if (yMin === yMax) {
    yMin -= 1;
    yMax += 1;
  }

  const innerWidth = width - 2 * padding;
  const innerHeight = height - 2 * padding;
  const points = series.map(({ nm, value }) => {
    const fx = nmSpan === 0 ? 0.5 : (nm - nmMin) / nmSpan;
    const fy = (value - yMin) / (yMax - yMin);
    return {
      nm,
      value,
      x: padding + fx * innerWidth,
      y: height - padding - fy * innerHeight,
    };
  });

  return {
    width,
    height,
    padding,
    xTicks: series.map((p) => p.nm),
    points,
    polyline: points
      .map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`)
      .join(" "),
    yMin,
    yMax,
  };
}

/** Serialize the model to a standalone SVG element. */
export function renderChartSvg(model: ChartModel): string {
  const { width, height, padding } = model;
  const axisY = height - padding;
  const ticks = model.points
    .map(
      (p) =>
        `<text class="tick" x="${p.x.toFixed(1)}" y="${(axisY + 14).toFixed(1)}"` +
        ` text-anchor="middle" font-size="8">${p.nm}</text>`,
    )
    .join("");
  const markers = model.points
    .map(
      (p) =>
        `<circle cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="2"` +
        ` data-nm="${p.nm}"><title>${p.nm} nm: ${p.value}</title></circle>`,
    )
    .join("");
  return (
    `<svg class="spectrum-chart" viewBox="0 0 ${width} ${height}"` +
    ` xmlns="http://www.w3.org/2000/svg">` +
    `<line class="axis" x1="${padding}" y1="${axisY}"` +
    ` x2="${width - padding}" y2="${axisY}" stroke="currentColor"/>` +
    `<polyline fill="none" stroke="currentColor" points="${model.polyline}"/>` +
    markers +
    ticks +
    `</svg>`
  );
}
