/**
 * Decoherence factor vs separation: |Gamma_t|^2 against delta_x at the
 * fixed time carried in the CSV (`gravidec gamma` output).
 */

import { column, readCsv, requireColumns } from "./csv.js";
import { runFigure, type FigureArgs } from "./cli.js";
import { Chart } from "./svg.js";

export function renderGammaVsDx(args: FigureArgs): string {
  const table = readCsv(args.input);
  requireColumns(table, ["delta_x_m", "t_s", "gamma_abs2"]);
  const dx = column(table, "delta_x_m");
  const gamma = column(table, "gamma_abs2");
  const t = column(table, "t_s")[0] ?? 0;

  const chart = new Chart(dx, gamma, {
    title: `decoherence factor at t = ${t.toExponential(3)} s`,
    xLabel: "separation delta_x [m]",
    yLabel: "|Gamma|^2",
    logX: args.logX,
    logY: args.logY,
  });
  chart.polyline(dx, gamma);
  chart.markers(dx, gamma);
  return chart.render();
}

const invokedDirectly = process.argv[1]?.endsWith("gamma_vs_dx.js") ?? false;
if (invokedDirectly) {
  process.exit(runFigure(process.argv.slice(2), renderGammaVsDx));
}
