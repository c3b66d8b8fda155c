import { writeFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { numericColumn, readDensityDump, readTable, stringColumn } from "../src/data.js";
import { CorruptBinaryError, MissingColumnError } from "../src/errors.js";
import { densityDumpBuffer, fixtureDir } from "./fixtures.js";

describe("readTable", () => {
  it("parses header and numeric columns", () => {
    const dir = fixtureDir();
    const table = readTable(join(dir, "master_observables.csv"));
    expect(table.header[0]).toBe("t");
    const purity = numericColumn(table, "purity");
    expect(purity).toHaveLength(5);
    expect(purity[0]).toBe(1.0);
    expect(purity[4]).toBeCloseTo(0.5222, 10);
  });

  it("names the missing column and the file", () => {
    const dir = fixtureDir();
    const table = readTable(join(dir, "traj_series.csv"));
    try {
      numericColumn(table, "purity");
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(MissingColumnError);
      expect((err as Error).message).toContain("purity");
      expect((err as Error).message).toContain("traj_series.csv");
    }
  });

  it("keeps label columns as strings", () => {
    const dir = fixtureDir();
    const table = readTable(join(dir, "compare_report.csv"));
    expect(stringColumn(table, "pair")[0]).toBe("jump_vs_master_quadratic");
    expect(stringColumn(table, "status")).toEqual(["pass", "pass", "info", "info"]);
  });
});

describe("readDensityDump", () => {
  it("round-trips the synthesized dump", () => {
    const dir = fixtureDir();
    const dump = readDensityDump(join(dir, "rho_final.bin"));
    expect(dump.n).toBe(32);
    expect(dump.xMin).toBe(-10.0);
    expect(dump.xMax).toBe(10.0);
    expect(dump.magnitude).toHaveLength(32 * 32);
    // the peak sits on the diagonal at the box center
    const peakIndex = dump.magnitude.indexOf(Math.max(...dump.magnitude));
    expect(peakIndex % 32).toBe(Math.floor(peakIndex / 32));
  });

  it("rejects a truncated dump, naming the path", () => {
    const dir = fixtureDir();
    const path = join(dir, "short.bin");
    writeFileSync(path, densityDumpBuffer(8).subarray(0, 100));
    try {
      readDensityDump(path);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(CorruptBinaryError);
      expect((err as Error).message).toContain("short.bin");
    }
  });

  it("rejects an implausible header", () => {
    const dir = fixtureDir();
    const path = join(dir, "bad_n.bin");
    const buf = densityDumpBuffer(8);
    buf.writeBigUInt64LE(BigInt("9007199254740991"), 0);
    writeFileSync(path, buf);
    expect(() => readDensityDump(path)).toThrow(CorruptBinaryError);
  });
});
