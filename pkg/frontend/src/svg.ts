/**
 * Deterministic SVG chart primitives: fixed canvas, explicit tick layout,
 * no timestamps, no randomness. Repeated renders of the same data are
 * byte-identical.
 */

export const WIDTH = 720;
export const HEIGHT = 520;
export const MARGIN = { left: 84, right: 24, top: 40, bottom: 64 };

export interface AxisOptions {
  xLabel: string;
  yLabel: string;
  title: string;
  logX?: boolean;
  logY?: boolean;
}

export interface Scale {
  toPx(value: number): number;
}

function linScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  const span = hi - lo || 1;
  return { toPx: (v) => pxLo + ((v - lo) / span) * (pxHi - pxLo) };
}

function logScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  return { toPx: (v) => pxLo + ((Math.log10(v) - llo) / span) * (pxHi - pxLo) };
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo < hi)) {
    hi = lo + 1;
  }
  return [lo, hi];
}

function fmt(value: number): string {
  if (value === 0) return "0";
  const mag = Math.abs(value);
  if (mag >= 1e-3 && mag < 1e4) {
    return Number(value.toPrecision(4)).toString();
  }
  return value.toExponential(2);
}

function ticks(lo: number, hi: number, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    const first = Math.ceil(Math.log10(lo) - 1e-9);
    const last = Math.floor(Math.log10(hi) + 1e-9);
    for (let e = first; e <= last; e += 1) out.push(Math.pow(10, e));
    if (out.length >= 2) return out;
  }
  const n = 5;
  const out: number[] = [];
  for (let i = 0; i <= n; i += 1) out.push(lo + ((hi - lo) * i) / n);
  return out;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export class Chart {
  private readonly parts: string[] = [];
  readonly xScale: Scale;
  readonly yScale: Scale;

  constructor(xs: number[], ys: number[], private readonly options: AxisOptions) {
    const [xLo, xHi] = extent(xs);
    const [yLoRaw, yHiRaw] = extent(ys);
    const pad = options.logY ? 1 : 0.05 * (yHiRaw - yLoRaw || 1);
    const yLo = options.logY ? yLoRaw : yLoRaw - pad;
    const yHi = options.logY ? yHiRaw : yHiRaw + pad;
    const mkX = options.logX ? logScale : linScale;
    const mkY = options.logY ? logScale : linScale;
    this.xScale = mkX(xLo, xHi, MARGIN.left, WIDTH - MARGIN.right);
    this.yScale = mkY(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top);
    this.frame(xLo, xHi, yLo, yHi);
  }

  private frame(xLo: number, xHi: number, yLo: number, yHi: number): void {
    const { xLabel, yLabel, title, logX, logY } = this.options;
    this.parts.push(
      `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${WIDTH - MARGIN.left - MARGIN.right}" ` +
        `height="${HEIGHT - MARGIN.top - MARGIN.bottom}" fill="none" stroke="#333" stroke-width="1"/>`,
    );
    for (const t of ticks(xLo, xHi, Boolean(logX))) {
      const px = this.xScale.toPx(t).toFixed(2);
      this.parts.push(
        `<line x1="${px}" y1="${HEIGHT - MARGIN.bottom}" x2="${px}" y2="${HEIGHT - MARGIN.bottom + 6}" stroke="#333"/>`,
        `<text x="${px}" y="${HEIGHT - MARGIN.bottom + 22}" text-anchor="middle" font-size="12">${fmt(t)}</text>`,
      );
    }
    for (const t of ticks(yLo, yHi, Boolean(logY))) {
      const py = this.yScale.toPx(t).toFixed(2);
      this.parts.push(
        `<line x1="${MARGIN.left - 6}" y1="${py}" x2="${MARGIN.left}" y2="${py}" stroke="#333"/>`,
        `<text x="${MARGIN.left - 10}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="12">${fmt(t)}</text>`,
      );
    }
    this.parts.push(
      `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 18}" text-anchor="middle" font-size="14">${esc(xLabel)}</text>`,
      `<text x="20" y="${(MARGIN.top + HEIGHT - MARGIN.bottom) / 2}" text-anchor="middle" font-size="14" ` +
        `transform="rotate(-90 20 ${(MARGIN.top + HEIGHT - MARGIN.bottom) / 2})">${esc(yLabel)}</text>`,
      `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${esc(title)}</text>`,
    );
  }

  polyline(xs: number[], ys: number[], color = "#1f6fb2"): void {
    const pts = xs
      .map((x, i) => `${this.xScale.toPx(x).toFixed(2)},${this.yScale.toPx(ys[i]).toFixed(2)}`)
      .join(" ");
    this.parts.push(`<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="2"/>`);
  }

  markers(xs: number[], ys: number[], color = "#1f6fb2"): void {
    for (let i = 0; i < xs.length; i += 1) {
      this.parts.push(
        `<circle cx="${this.xScale.toPx(xs[i]).toFixed(2)}" cy="${this.yScale.toPx(ys[i]).toFixed(2)}" r="3.5" fill="${color}"/>`,
      );
    }
  }

  annotation(text: string): void {
    this.parts.push(
      `<text x="${WIDTH - MARGIN.right - 8}" y="${MARGIN.top + 20}" text-anchor="end" font-size="13" fill="#555">${esc(text)}</text>`,
    );
  }

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">\n<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

/** Piecewise-linear blue-to-yellow colormap for heatmap cells. */
export function heatColor(value01: number): string {
  const stops: Array<[number, [number, number, number]]> = [
    [0.0, [13, 8, 135]],
    [0.33, [126, 3, 168]],
    [0.66, [225, 100, 98]],
    [1.0, [240, 249, 33]],
  ];
  const v = Math.min(1, Math.max(0, value01));
  for (let i = 1; i < stops.length; i += 1) {
    const [t1, c1] = stops[i - 1];
    const [t2, c2] = stops[i];
    if (v <= t2) {
      const f = (v - t1) / (t2 - t1);
      const rgb = c1.map((a, k) => Math.round(a + f * (c2[k] - a)));
      return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
    }
  }
  return "rgb(240,249,33)";
}
