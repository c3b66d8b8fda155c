import { existsSync, readFileSync, statSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it, vi } from "vitest";

import { main } from "../src/cli.js";
import { densityDumpBuffer, fixtureDir } from "./fixtures.js";

function runQuiet(argv: string[]): { code: number; stderr: string } {
  let stderr = "";
  const spy = vi
    .spyOn(process.stderr, "write")
    .mockImplementation(((chunk: string | Uint8Array) => {
      stderr += chunk.toString();
      return true;
    }) as typeof process.stderr.write);
  try {
    return { code: main(argv), stderr };
  } finally {
    spy.mockRestore();
  }
}

describe("plot CLI", () => {
  it("renders all three kinds from canned fixtures", () => {
    const dir = fixtureDir();
    const jobs: Array<[string, string]> = [
      ["series", "master_observables.csv"],
      ["heatmap", "rho_final.bin"],
      ["compare", "compare_report.csv"],
    ];
    for (const [kind, input] of jobs) {
      const out = join(dir, `${kind}.png`);
      const { code } = runQuiet([kind, "--in", join(dir, input), "--out", out]);
      expect(code).toBe(0);
      expect(existsSync(out)).toBe(true);
      expect(statSync(out).size).toBeGreaterThan(0);
    }
  });

  it("re-rendering produces byte-identical output", () => {
    const dir = fixtureDir();
    const out1 = join(dir, "a.png");
    const out2 = join(dir, "b.png");
    const argvBase = ["series", "--in", join(dir, "traj_series.csv")];
    expect(runQuiet([...argvBase, "--out", out1]).code).toBe(0);
    expect(runQuiet([...argvBase, "--out", out2]).code).toBe(0);
    expect(readFileSync(out1).equals(readFileSync(out2))).toBe(true);
  });

  it("reports a missing column by name", () => {
    const dir = fixtureDir();
    const { code, stderr } = runQuiet([
      "series",
      "--in", join(dir, "traj_series.csv"),
      "--columns", "purity",
      "--out", join(dir, "x.png"),
    ]);
    expect(code).toBe(1);
    expect(stderr).toContain("missing column 'purity'");
  });

  it("reports a corrupt dump by path", () => {
    const dir = fixtureDir();
    const bad = join(dir, "broken.bin");
    writeFileSync(bad, densityDumpBuffer(8).subarray(0, 40));
    const { code, stderr } = runQuiet(["heatmap", "--in", bad, "--out", join(dir, "x.png")]);
    expect(code).toBe(1);
    expect(stderr).toContain("broken.bin");
  });

  it("reports a missing input file", () => {
    const dir = fixtureDir();
    const { code, stderr } = runQuiet([
      "series", "--in", join(dir, "nope.csv"), "--out", join(dir, "x.png"),
    ]);
    expect(code).toBe(1);
    expect(stderr).toContain("nope.csv");
  });

  it("rejects bad usage", () => {
    const dir = fixtureDir();
    expect(runQuiet(["spectrogram", "--in", "a", "--out", "b"]).code).toBe(2);
    expect(runQuiet(["series", "--in", join(dir, "traj_series.csv")]).code).toBe(2);
    expect(runQuiet([]).code).toBe(2);
  });
});
