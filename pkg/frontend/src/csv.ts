/**
 * Strict reader for the simulator's CSV outputs: a header row followed by
 * '.'-decimal scientific-notation values. Column access is by name, and a
 * missing column fails loudly with its name so figure scripts can exit
 * non-zero pointing at the exact mismatch.
 */

import { readFileSync } from "fs";

export class MissingColumnError extends Error {
  readonly column: string;
  constructor(column: string) {
    super(`missing column: ${column}`);
    this.column = column;
  }
}

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV input");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`row ${i + 2} has ${cells.length} cells, expected ${header.length}`);
    }
    return cells;
  });
  return { header, rows };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf-8"));
}

/** Numeric column by name; throws MissingColumnError when absent. */
export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new MissingColumnError(name);
  }
  return table.rows.map((cells, i) => {
    const value = Number(cells[idx]);
    if (!Number.isFinite(value)) {
      throw new Error(`row ${i + 2}, column ${name}: not a finite number: ${cells[idx]}`);
    }
    return value;
  });
}

export function requireColumns(table: Table, names: string[]): void {
  for (const name of names) {
    if (!table.header.includes(name)) {
      throw new MissingColumnError(name);
    }
  }
}
