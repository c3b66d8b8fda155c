/** Readers for the simulator's interchange formats. */

import { readFileSync } from "node:fs";

import { CorruptBinaryError, MissingColumnError } from "./errors.js";

export interface Table {
  path: string;
  header: string[];
  /** string cells kept for label-like columns */
  cells: string[][];
}

export function readTable(path: string): Table {
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n").filter((line) => line.length > 0 && !line.startsWith("#"));
  if (lines.length === 0) {
    throw new MissingColumnError("(header)", path);
  }
  const header = lines[0].split(",").map((name) => name.trim());
  const cells = lines.slice(1).map((line) => line.split(","));
  return { path, header, cells };
}

export function numericColumn(table: Table, name: string): number[] {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new MissingColumnError(name, table.path);
  }
  return table.cells.map((row) => Number(row[index] ?? NaN));
}

export function stringColumn(table: Table, name: string): string[] {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new MissingColumnError(name, table.path);
  }
  return table.cells.map((row) => row[index] ?? "");
}

export interface DensityDump {
  path: string;
  n: number;
  xMin: number;
  xMax: number;
  /** |rho| values, row-major n x n */
  magnitude: Float64Array;
}

const HEADER_BYTES = 16;

export function readDensityDump(path: string): DensityDump {
  const buf = readFileSync(path);
  if (buf.length < HEADER_BYTES) {
    throw new CorruptBinaryError(path, `only ${buf.length} bytes, header needs ${HEADER_BYTES}`);
  }
  const n = Number(buf.readBigUInt64LE(0));
  const xMin = buf.readFloatLE(8);
  const xMax = buf.readFloatLE(12);
  if (!Number.isInteger(n) || n < 1 || n > 1 << 20) {
    throw new CorruptBinaryError(path, `implausible n_points ${n}`);
  }
  const expected = HEADER_BYTES + 16 * n * n;
  if (buf.length !== expected) {
    throw new CorruptBinaryError(path, `expected ${expected} bytes for n=${n}, found ${buf.length}`);
  }
  const magnitude = new Float64Array(n * n);
  for (let i = 0; i < n * n; i++) {
    const re = buf.readDoubleLE(HEADER_BYTES + 16 * i);
    const im = buf.readDoubleLE(HEADER_BYTES + 16 * i + 8);
    if (!Number.isFinite(re) || !Number.isFinite(im)) {
      throw new CorruptBinaryError(path, `non-finite entry at index ${i}`);
    }
    magnitude[i] = Math.hypot(re, im);
  }
  return { path, n, xMin, xMax, magnitude };
}

/** Axis-label units for the simulator's natural-unit columns. */
export const COLUMN_UNITS: Record<string, string> = {
  t: "[time]",
  trace: "[1]",
  purity: "[1]",
  norm: "[1]",
  x_mean: "[length]",
  x_var: "[length^2]",
  p_mean: "[momentum]",
  p2: "[momentum^2]",
  rate: "[1/time]",
  t_jump: "[time]",
  rate_at_jump: "[1/time]",
  hs_distance: "[1/length]",
  mean_jump_count: "[1]",
  mean_integrated_rate: "[1]",
};

export function labelWithUnit(column: string): string {
  const unit = COLUMN_UNITS[column] ?? "[a.u.]";
  return `${column} ${unit}`;
}
