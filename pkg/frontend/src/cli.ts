#!/usr/bin/env node
/** plot series|heatmap|compare --in PATH [--in2 PATH] --out PATH.png [--scale N]
 *
 * Renders the simulator's CSV/binary outputs to PNG.  The output file is
 * written atomically (temp file + rename); inputs are never modified.
 * Exit codes: 0 success, 1 bad input or rendering error, 2 usage error.
 */

import { mkdirSync, renameSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import process from "node:process";
import { parseArgs } from "node:util";

import { CorruptBinaryError, MissingColumnError } from "./errors.js";
import { render, type PlotKind } from "./render.js";

const KINDS: PlotKind[] = ["series", "heatmap", "compare"];

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string" },
        in2: { type: "string" },
        out: { type: "string" },
        scale: { type: "string" },
        columns: { type: "string" },
      },
    });
  } catch (err) {
    process.stderr.write(`usage error: ${(err as Error).message}\n`);
    return 2;
  }
  const kind = parsed.positionals[0] as PlotKind | undefined;
  const { in: input, in2: input2, out, scale, columns } = parsed.values;
  if (!kind || !KINDS.includes(kind) || !input || !out || parsed.positionals.length !== 1) {
    process.stderr.write(
      `usage: plot ${KINDS.join("|")} --in PATH [--in2 PATH] --out PATH.png [--scale N] [--columns a,b]\n`,
    );
    return 2;
  }

  try {
    const png = render({
      kind,
      input,
      input2,
      scale: scale === undefined ? undefined : Number(scale),
      columns: columns === undefined ? undefined : columns.split(","),
    });
    mkdirSync(dirname(out), { recursive: true });
    const tmp = `${out}.tmp-${process.pid}`;
    writeFileSync(tmp, png);
    renameSync(tmp, out);
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnError || err instanceof CorruptBinaryError) {
      process.stderr.write(`${err.message}\n`);
    } else if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(`input not found: ${(err as NodeJS.ErrnoException).path}\n`);
    } else {
      process.stderr.write(`error: ${(err as Error).message}\n`);
    }
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
