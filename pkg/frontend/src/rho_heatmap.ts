/**
 * Heatmap of |rho_t(x, x')| over the position lattice (one rho_tNNN.csv
 * from `gravidec evolve`). Cell shade is sqrt(abs2) normalized to the
 * frame maximum.
 */

import { column, readCsv, requireColumns } from "./csv.js";
import { runFigure, type FigureArgs } from "./cli.js";
import { HEIGHT, MARGIN, WIDTH, heatColor } from "./svg.js";

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderRhoHeatmap(args: FigureArgs): string {
  const table = readCsv(args.input);
  requireColumns(table, ["x", "x_prime", "abs2", "t"]);
  const xs = column(table, "x");
  const xps = column(table, "x_prime");
  const abs2 = column(table, "abs2");
  const t = column(table, "t")[0] ?? 0;

  const xAxis = uniqueSorted(xs);
  const yAxis = uniqueSorted(xps);
  const xIndex = new Map(xAxis.map((v, i) => [v, i]));
  const yIndex = new Map(yAxis.map((v, i) => [v, i]));
  const mags = abs2.map(Math.sqrt);
  const maxMag = Math.max(...mags) || 1;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const cellW = plotW / xAxis.length;
  const cellH = plotH / yAxis.length;

  const parts: string[] = [];
  for (let k = 0; k < mags.length; k += 1) {
    const i = xIndex.get(xs[k])!;
    const j = yIndex.get(xps[k])!;
    const px = MARGIN.left + i * cellW;
    const py = HEIGHT - MARGIN.bottom - (j + 1) * cellH;
    parts.push(
      `<rect x="${px.toFixed(2)}" y="${py.toFixed(2)}" width="${(cellW + 0.5).toFixed(2)}" ` +
        `height="${(cellH + 0.5).toFixed(2)}" fill="${heatColor(mags[k] / maxMag)}"/>`,
    );
  }
  const xlo = xAxis[0].toExponential(2);
  const xhi = xAxis[xAxis.length - 1].toExponential(2);
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`,
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">` +
      esc(`|rho_t(x, x')| at t = ${t.toExponential(3)} s`) +
      `</text>`,
    `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 18}" text-anchor="middle" font-size="14">x [m], ${xlo} .. ${xhi}</text>`,
    `<text x="20" y="${(MARGIN.top + HEIGHT - MARGIN.bottom) / 2}" text-anchor="middle" font-size="14" ` +
      `transform="rotate(-90 20 ${(MARGIN.top + HEIGHT - MARGIN.bottom) / 2})">x' [m]</text>`,
  );
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">\n<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
    parts.join("\n") +
    "\n</svg>\n"
  );
}

const invokedDirectly = process.argv[1]?.endsWith("rho_heatmap.js") ?? false;
if (invokedDirectly) {
  process.exit(runFigure(process.argv.slice(2), renderRhoHeatmap));
}
