/**
 * Coherence length vs swept temperature on log-log axes (`gravidec sweep`
 * output with the lambda_coh_m column). The fitted log-log slope is
 * annotated on the figure; the closed form scales as 1/T, slope -1.
 */

import { column, readCsv, requireColumns } from "./csv.js";
import { runFigure, type FigureArgs } from "./cli.js";
import { logLogSlope } from "./fit.js";
import { Chart } from "./svg.js";

export function renderLcohVsT(args: FigureArgs): string {
  const table = readCsv(args.input);
  requireColumns(table, ["value", "lambda_coh_m"]);
  const values = column(table, "value");
  const lams = column(table, "lambda_coh_m");
  const slope = logLogSlope(values, lams);

  const chart = new Chart(values, lams, {
    title: "coherence length vs temperature",
    xLabel: "temperature [K]",
    yLabel: "lambda_coh [m]",
    logX: true,
    logY: true,
  });
  chart.polyline(values, lams);
  chart.markers(values, lams);
  chart.annotation(`log-log slope ${slope.toFixed(6)}`);
  return chart.render();
}

const invokedDirectly = process.argv[1]?.endsWith("lcoh_vs_t.js") ?? false;
if (invokedDirectly) {
  process.exit(runFigure(process.argv.slice(2), renderLcohVsT));
}
