/**
 * Oscillator purity over time (`gravidec evolve` purity.csv): the dip and
 * the exact revival at the full trap period.
 */

import { column, readCsv, requireColumns } from "./csv.js";
import { runFigure, type FigureArgs } from "./cli.js";
import { Chart } from "./svg.js";

export function renderPurityVsT(args: FigureArgs): string {
  const table = readCsv(args.input);
  requireColumns(table, ["t_s", "purity"]);
  const t = column(table, "t_s");
  const purity = column(table, "purity");

  const chart = new Chart(t, purity, {
    title: "purity revival over one trap period",
    xLabel: "t [s]",
    yLabel: "Tr[rho^2]",
    logX: args.logX,
    logY: args.logY,
  });
  chart.polyline(t, purity);
  chart.markers(t, purity);
  return chart.render();
}

const invokedDirectly = process.argv[1]?.endsWith("purity_vs_t.js") ?? false;
if (invokedDirectly) {
  process.exit(runFigure(process.argv.slice(2), renderPurityVsT));
}
