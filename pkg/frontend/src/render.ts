/** The three plot kinds: observable series, |rho| heatmaps, comparison bars. */

import { basename } from "node:path";

import {
  labelWithUnit,
  numericColumn,
  readDensityDump,
  readTable,
  stringColumn,
  type Table,
} from "./data.js";
import { encodePng } from "./png.js";
import {
  ACCENTS,
  BLACK,
  GREY,
  LIGHT_GREY,
  Raster,
  formatTick,
  viridis,
  type Color,
} from "./raster.js";

export type PlotKind = "series" | "heatmap" | "compare";

export interface PlotJob {
  kind: PlotKind;
  input: string;
  input2?: string;
  /** heatmap pixels per matrix cell (default 1: an n x n dump gives an n x n image) */
  scale?: number;
  /** series panels to draw (default: every column after the first) */
  columns?: string[];
}

export function render(job: PlotJob): Buffer {
  switch (job.kind) {
    case "series":
      return renderSeries(job);
    case "heatmap":
      return renderHeatmap(job);
    case "compare":
      return renderCompare(job);
  }
}

interface Range {
  lo: number;
  hi: number;
}

function niceRange(values: number[]): Range {
  const finite = values.filter(Number.isFinite);
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    lo = 0;
    hi = 1;
  }
  if (hi === lo) {
    lo -= 1;
    hi += 1;
  }
  const pad = 0.06 * (hi - lo);
  return { lo: lo - pad, hi: hi + pad };
}

function toY(value: number, range: Range, top: number, bottom: number): number {
  const f = (value - range.lo) / (range.hi - range.lo);
  return bottom - f * (bottom - top);
}

function renderSeries(job: PlotJob): Buffer {
  const table = readTable(job.input);
  const xName = table.header[0];
  const x = numericColumn(table, xName);
  const columns = job.columns ?? table.header.slice(1);
  if (columns.length === 0) {
    throw new Error(`${job.input}: no data columns beyond '${xName}'`);
  }
  const overlay = job.input2 ? readTable(job.input2) : undefined;

  const left = 86;
  const right = 16;
  const top = 30;
  const panelHeight = 110;
  const panelGap = 22;
  const bottom = 34;
  const width = 860;
  const height = top + columns.length * (panelHeight + panelGap) + bottom;
  const canvas = new Raster(width, height);
  canvas.text(left, 10, basename(job.input), BLACK);

  const xRange = niceRange(x);
  for (let p = 0; p < columns.length; p++) {
    const name = columns[p];
    const values = numericColumn(table, name);
    const panelTop = top + p * (panelHeight + panelGap);
    const panelBottom = panelTop + panelHeight;
    const overlayValues =
      overlay && overlay.header.includes(name) ? numericColumn(overlay, name) : undefined;
    const overlayX = overlay && overlayValues ? numericColumn(overlay, overlay.header[0]) : undefined;
    const yRange = niceRange(overlayValues ? values.concat(overlayValues) : values);

    canvas.rect(left, panelTop, width - right, panelBottom, GREY);
    for (let tick = 0; tick <= 3; tick++) {
      const value = yRange.lo + ((yRange.hi - yRange.lo) * tick) / 3;
      const y = toY(value, yRange, panelTop, panelBottom);
      canvas.line(left, y, width - right, y, LIGHT_GREY);
      const label = formatTick(value);
      canvas.text(left - 6 - canvas.textWidth(label), y - 3, label, BLACK);
    }
    drawPolyline(canvas, x, values, xRange, yRange, left, width - right, panelTop, panelBottom, ACCENTS[p % ACCENTS.length]);
    if (overlayValues && overlayX) {
      drawPolyline(canvas, overlayX, overlayValues, xRange, yRange, left, width - right, panelTop, panelBottom, ACCENTS[(p + 1) % ACCENTS.length]);
    }
    canvas.text(left + 6, panelTop + 5, labelWithUnit(name), BLACK);
  }

  // shared time axis on the bottom panel
  const axisY = top + columns.length * (panelHeight + panelGap) - panelGap;
  for (let tick = 0; tick <= 5; tick++) {
    const value = xRange.lo + ((xRange.hi - xRange.lo) * tick) / 5;
    const px = left + ((width - right - left) * tick) / 5;
    canvas.line(px, axisY, px, axisY + 4, BLACK);
    const label = formatTick(value);
    canvas.text(px - canvas.textWidth(label) / 2, axisY + 8, label, BLACK);
  }
  const xLabel = labelWithUnit(xName);
  canvas.text((width - canvas.textWidth(xLabel)) / 2, height - 12, xLabel, BLACK);

  return encodePng(width, height, canvas.data);
}

function drawPolyline(
  canvas: Raster,
  x: number[],
  y: number[],
  xRange: Range,
  yRange: Range,
  left: number,
  right: number,
  top: number,
  bottom: number,
  color: Color,
): void {
  const n = Math.min(x.length, y.length);
  let prev: [number, number] | undefined;
  for (let i = 0; i < n; i++) {
    if (!Number.isFinite(x[i]) || !Number.isFinite(y[i])) {
      prev = undefined;
      continue;
    }
    const px = left + ((x[i] - xRange.lo) / (xRange.hi - xRange.lo)) * (right - left);
    const py = toY(y[i], yRange, top, bottom);
    if (prev) {
      canvas.line(prev[0], prev[1], px, py, color);
    } else if (n === 1) {
      canvas.set(px, py, color);
    }
    prev = [px, py];
  }
}

/** Log-scaled |rho| cells; the display floor is 1e-12 (or ten decades
 * below the peak when the peak is smaller than 1e-2). */
function heatmapCells(magnitude: Float64Array): Float64Array {
  const FLOOR = 1e-12;
  let peak = 0;
  for (const v of magnitude) peak = Math.max(peak, v);
  const floor = Math.max(FLOOR, peak * 1e-10);
  const hi = Math.log10(Math.max(peak, floor * 10));
  const lo = Math.log10(floor);
  const out = new Float64Array(magnitude.length);
  for (let i = 0; i < magnitude.length; i++) {
    out[i] = (Math.log10(Math.max(magnitude[i], floor)) - lo) / (hi - lo);
  }
  return out;
}

function paintMatrix(canvas: Raster, cells: Float64Array, n: number, x0: number, scale: number): void {
  for (let row = 0; row < n; row++) {
    for (let col = 0; col < n; col++) {
      const color = viridis(cells[row * n + col]);
      for (let dy = 0; dy < scale; dy++) {
        for (let dx = 0; dx < scale; dx++) {
          canvas.set(x0 + col * scale + dx, row * scale + dy, color);
        }
      }
    }
  }
}

function renderHeatmap(job: PlotJob): Buffer {
  const scale = Math.max(1, Math.floor(job.scale ?? 1));
  const first = readDensityDump(job.input);
  const second = job.input2 ? readDensityDump(job.input2) : undefined;
  const gap = second ? 4 : 0;
  const width = first.n * scale + (second ? second.n * scale + gap : 0);
  const height = Math.max(first.n, second?.n ?? 0) * scale;
  const canvas = new Raster(width, height);
  paintMatrix(canvas, heatmapCells(first.magnitude), first.n, 0, scale);
  if (second) {
    canvas.rect(first.n * scale, 0, first.n * scale + gap - 1, height - 1, BLACK, true);
    paintMatrix(canvas, heatmapCells(second.magnitude), second.n, first.n * scale + gap, scale);
  }
  return encodePng(width, height, canvas.data);
}

function compareRows(table: Table) {
  const pairs = stringColumn(table, "pair");
  const distances = numericColumn(table, "hs_distance");
  const statuses = stringColumn(table, "status");
  const toleranceIndex = table.header.indexOf("tolerance");
  const tolerances = table.cells.map((row) =>
    toleranceIndex < 0 || row[toleranceIndex] === "" ? NaN : Number(row[toleranceIndex]),
  );
  return pairs.map((pair, i) => ({
    pair,
    distance: distances[i],
    tolerance: tolerances[i],
    status: statuses[i],
  }));
}

function renderCompare(job: PlotJob): Buffer {
  const table = readTable(job.input);
  const rows = compareRows(table);
  if (rows.length === 0) {
    throw new Error(`${job.input}: no comparison rows`);
  }
  const left = 86;
  const right = 16;
  const top = 30;
  const plotHeight = 260;
  const bottom = 64;
  const width = Math.max(620, left + right + rows.length * 150);
  const height = top + plotHeight + bottom;
  const canvas = new Raster(width, height);
  canvas.text(left, 10, basename(job.input), BLACK);

  const peak = Math.max(
    ...rows.map((row) => Math.max(row.distance, Number.isFinite(row.tolerance) ? row.tolerance : 0)),
  );
  const range: Range = { lo: 0, hi: peak > 0 ? 1.15 * peak : 1 };
  const panelBottom = top + plotHeight;
  canvas.rect(left, top, width - right, panelBottom, GREY);
  for (let tick = 0; tick <= 4; tick++) {
    const value = (range.hi * tick) / 4;
    const y = toY(value, range, top, panelBottom);
    canvas.line(left, y, width - right, y, LIGHT_GREY);
    const label = formatTick(value);
    canvas.text(left - 6 - canvas.textWidth(label), y - 3, label, BLACK);
  }
  canvas.text(left + 6, top + 5, labelWithUnit("hs_distance"), BLACK);

  const slot = (width - left - right) / rows.length;
  rows.forEach((row, i) => {
    const x0 = left + i * slot + 0.2 * slot;
    const x1 = left + i * slot + 0.8 * slot;
    const color: Color =
      row.status === "fail" ? [214, 39, 40] : row.status === "pass" ? [44, 160, 44] : [110, 110, 180];
    const yBar = toY(row.distance, range, top, panelBottom);
    canvas.rect(x0, yBar, x1, panelBottom - 1, color, true);
    const value = formatTick(row.distance);
    canvas.text((x0 + x1 - canvas.textWidth(value)) / 2, yBar - 10, value, BLACK);
    if (Number.isFinite(row.tolerance)) {
      const yTol = toY(row.tolerance, range, top, panelBottom);
      for (let px = x0 - 4; px <= x1 + 4; px += 4) {
        canvas.line(px, yTol, Math.min(px + 2, x1 + 4), yTol, [214, 39, 40]);
      }
    }
    const [partA, partB = ""] = row.pair.split("_vs_");
    const yLabel = panelBottom + 10;
    canvas.text(left + i * slot + (slot - canvas.textWidth(partA)) / 2, yLabel, partA, BLACK);
    canvas.text(left + i * slot + (slot - canvas.textWidth("vs " + partB)) / 2, yLabel + 11, "vs " + partB, BLACK);
    canvas.text(left + i * slot + (slot - canvas.textWidth(row.status)) / 2, yLabel + 24, row.status, color);
  });

  return encodePng(width, height, canvas.data);
}
