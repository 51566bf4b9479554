/** Shared flag handling for the figure scripts: --in, --out, --logx, --logy. */

import { writeFileSync } from "fs";
import { MissingColumnError } from "./csv.js";

export interface FigureArgs {
  input: string;
  output: string;
  logX: boolean;
  logY: boolean;
}

export function parseArgs(argv: string[]): FigureArgs {
  let input = "";
  let output = "";
  let logX = false;
  let logY = false;
  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    if (arg === "--in") {
      input = argv[++i] ?? "";
    } else if (arg === "--out") {
      output = argv[++i] ?? "";
    } else if (arg === "--logx") {
      logX = true;
    } else if (arg === "--logy") {
      logY = true;
    } else {
      throw new UsageError(`unknown flag: ${arg}`);
    }
  }
  if (!input || !output) {
    throw new UsageError("usage: --in INPUT.csv --out OUTPUT.svg [--logx] [--logy]");
  }
  return { input, output, logX, logY };
}

export class UsageError extends Error {}

/** Run a figure renderer as a process entry point with the documented
 * exit codes: 2 for flag problems, 1 for bad input (naming the missing
 * column when that is the cause). */
export function runFigure(argv: string[], render: (args: FigureArgs) => string): number {
  let args: FigureArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    return 2;
  }
  try {
    const svg = render(args);
    writeFileSync(args.output, svg);
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnError) {
      process.stderr.write(`${err.message}\n`);
    } else {
      process.stderr.write(`error: ${(err as Error).message}\n`);
    }
    return 1;
  }
}
