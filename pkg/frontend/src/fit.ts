/** Least-squares straight line y = a + b x. */
export function linearFit(xs: number[], ys: number[]): { intercept: number; slope: number } {
  const n = xs.length;
  if (n < 2) {
    throw new Error("need at least two points to fit a line");
  }
  let sx = 0;
  let sy = 0;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i += 1) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const denom = n * sxx - sx * sx;
  if (denom === 0) {
    throw new Error("degenerate abscissae: slope undefined");
  }
  const slope = (n * sxy - sx * sy) / denom;
  const intercept = (sy - slope * sx) / n;
  return { intercept, slope };
}

/** Slope of y vs x on log-log axes, e.g. -1 for y ~ 1/x scaling. */
export function logLogSlope(xs: number[], ys: number[]): number {
  const lx = xs.map((v) => {
    if (!(v > 0)) throw new Error(`log-log fit needs positive x, got ${v}`);
    return Math.log10(v);
  });
  const ly = ys.map((v) => {
    if (!(v > 0)) throw new Error(`log-log fit needs positive y, got ${v}`);
    return Math.log10(v);
  });
  return linearFit(lx, ly).slope;
}
