#!/usr/bin/env node
/** render_figures --in sweep.csv --kind fig1|fig2 --out fig.svg [--asymptote v]
 *
 * Exit codes: 0 success (possibly with warnings), 1 I/O failure, 2 usage or
 * schema errors. Output is written atomically.
 */

import fs from "node:fs";
import path from "node:path";

import { SchemaError, parseSweepCsv } from "./csv.js";
import { FigureKind, render } from "./render.js";

interface CliArgs {
  input: string;
  kind: FigureKind;
  out: string;
  asymptote?: number;
}

export function parseArgs(argv: string[]): CliArgs {
  const values = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near '${flag}'`);
    }
    values.set(flag.slice(2), value);
  }
  const input = values.get("in");
  const kind = values.get("kind");
  const out = values.get("out");
  if (!input || !kind || !out) {
    throw new Error("usage: render_figures --in sweep.csv --kind fig1|fig2 --out fig.svg [--asymptote v]");
  }
  if (kind !== "fig1" && kind !== "fig2") {
    throw new Error(`--kind must be fig1 or fig2, got '${kind}'`);
  }
  const args: CliArgs = { input, kind, out };
  const asymptote = values.get("asymptote");
  if (asymptote !== undefined) {
    const value = Number(asymptote);
    if (Number.isNaN(value)) {
      throw new Error(`--asymptote must be numeric, got '${asymptote}'`);
    }
    args.asymptote = value;
  }
  return args;
}

function writeAtomic(target: string, text: string): void {
  const tmp = path.join(
    path.dirname(target) || ".",
    `${path.basename(target)}.tmp-${process.pid}`,
  );
  fs.writeFileSync(tmp, text);
  fs.renameSync(tmp, target);
}

export function run(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 2;
  }
  let text: string;
  try {
    text = fs.readFileSync(args.input, "utf-8");
  } catch (error) {
    console.error(`error: cannot read ${args.input}: ${(error as Error).message}`);
    return 1;
  }
  try {
    const rows = parseSweepCsv(text);
    const { svg, warnings } = render(rows, { kind: args.kind, asymptote: args.asymptote });
    for (const warning of warnings) {
      console.error(`warning: ${warning}`);
    }
    writeAtomic(args.out, svg);
    return 0;
  } catch (error) {
    if (error instanceof SchemaError) {
      console.error(`error: ${error.message}`);
      return 2;
    }
    console.error(`error: ${(error as Error).message}`);
    return 1;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("render_figures")) {
  process.exit(run(process.argv.slice(2)));
}
