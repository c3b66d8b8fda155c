/** Canned fixtures synthesized to the documented interchange formats. */

import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const MASTER_OBSERVABLES_CSV = [
  "t,trace,purity,x_mean,p_mean,x_var,p2",
  "0.0,1.0,1.0,0.0,0.0,0.5,0.5",
  "0.5,1.0,0.8861,0.0,1e-14,0.656,0.625",
  "1.0,1.0000000001,0.7704,0.0,-2e-14,1.104,0.75",
  "1.5,1.0,0.658,0.0,0.0,1.932,0.875",
  "2.0,1.0,0.5222,0.0,1e-13,3.1667,1.0",
].join("\n") + "\n";

export const TRAJECTORY_SERIES_CSV = [
  "t,norm,x_mean,x_var,rate",
  "0.0,1.0,0.0,0.5,0.125",
  "0.25,1.0,0.01,0.55,0.1375",
  "0.5,0.9999999999,-0.02,0.63,0.1575",
  "0.75,1.0,0.05,0.8,0.2",
  "1.0,1.0,0.04,1.01,0.2525",
].join("\n") + "\n";

export const COMPARE_REPORT_CSV = [
  "pair,hs_distance,delta_x_mean,delta_p2,delta_purity,tolerance,status",
  "jump_vs_master_quadratic,0.0078,7.4e-08,0.006,0.002,0.05,pass",
  "whitenoise_vs_master_general,0.0098,0.002,0.007,0.0042,0.08,pass",
  "master_quadratic_vs_master_general,0.082,1.6e-06,4e-12,0.0425,,info",
  "jump_vs_whitenoise,0.091,0.0021,0.001,0.0487,,info",
].join("\n") + "\n";

/** Gaussian pure-state density dump, n x n, on [-10, 10). */
export function densityDumpBuffer(n: number): Buffer {
  const header = Buffer.alloc(16);
  header.writeBigUInt64LE(BigInt(n), 0);
  header.writeFloatLE(-10.0, 8);
  header.writeFloatLE(10.0, 12);
  const dx = 20.0 / n;
  const psi: number[] = [];
  let norm = 0;
  for (let i = 0; i < n; i++) {
    const x = -10.0 + i * dx;
    const v = Math.exp(-(x * x) / 2.0);
    psi.push(v);
    norm += v * v * dx;
  }
  const scale = 1 / Math.sqrt(norm);
  const payload = Buffer.alloc(16 * n * n);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      payload.writeDoubleLE(psi[i] * psi[j] * scale * scale, 16 * (i * n + j));
      payload.writeDoubleLE(0.0, 16 * (i * n + j) + 8);
    }
  }
  return Buffer.concat([header, payload]);
}

export function fixtureDir(): string {
  const dir = mkdtempSync(join(tmpdir(), "qjumps-plots-"));
  writeFileSync(join(dir, "master_observables.csv"), MASTER_OBSERVABLES_CSV);
  writeFileSync(join(dir, "traj_series.csv"), TRAJECTORY_SERIES_CSV);
  writeFileSync(join(dir, "compare_report.csv"), COMPARE_REPORT_CSV);
  writeFileSync(join(dir, "rho_final.bin"), densityDumpBuffer(32));
  return dir;
}
