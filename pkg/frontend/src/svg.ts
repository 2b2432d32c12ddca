/**
 * Standalone SVG rendering: curve charts with error bars for the outage
 * sweeps, grouped bars for the detection rates. No DOM, no canvas; the
 * output is a self-contained SVG string.
 *
 * Parseability contract used by the tests: every curve is one
 * `<polyline class="curve" data-series="...">`, every data point one
 * `<circle class="pt">`, every visible confidence interval one
 * `<line class="errbar">`, every detection bar one `<rect class="bar">`.
 */

import { BarFigure, CurveFigure, Figure } from "./model.js";

export type YScale = "log" | "linear";

export interface RenderOptions {
  yScale?: YScale;
  width?: number;
  height?: number;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const MARGIN = { top: 28, right: 24, bottom: 64, left: 72 };

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(value: number): string {
  if (value !== 0 && (Math.abs(value) < 1e-3 || Math.abs(value) >= 1e4)) {
    return value.toExponential(0);
  }
  return Number(value.toPrecision(4)).toString();
}

interface Scale {
  toPixel(v: number): number;
  ticks: number[];
  clamp(v: number): number;
}

function linearScale(lo: number, hi: number, p0: number, p1: number): Scale {
  if (hi === lo) {
    hi = lo + 1;
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
  const mult = span / step > 20 ? 5 : span / step > 8 ? 2 : 1;
  const ticks: number[] = [];
  for (
    let t = Math.ceil(lo / (step * mult)) * step * mult;
    t <= hi + 1e-12;
    t += step * mult
  ) {
    ticks.push(t);
  }
  return {
    toPixel: (v) => p0 + ((v - lo) / span) * (p1 - p0),
    ticks,
    clamp: (v) => v,
  };
}

function logScale(lo: number, hi: number, p0: number, p1: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi <= lo ? lo * 10 : hi);
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi) + 1e-9; e += 1) {
    ticks.push(Math.pow(10, e));
  }
  return {
    toPixel: (v) =>
      p0 + ((Math.log10(v) - llo) / (lhi - llo)) * (p1 - p0),
    ticks,
    clamp: (v) => Math.max(v, lo),
  };
}

function axes(
  width: number,
  height: number,
  xLabel: string,
  yLabel: string,
  caption: string,
  yScale: Scale
): string[] {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`
  );
  for (const tick of yScale.ticks) {
    const py = yScale.toPixel(tick);
    parts.push(
      `<line x1="${x0 - 4}" y1="${py.toFixed(1)}" x2="${x0}" ` +
        `y2="${py.toFixed(1)}" stroke="black"/>`,
      `<line x1="${x0}" y1="${py.toFixed(1)}" x2="${x1}" ` +
        `y2="${py.toFixed(1)}" stroke="#dddddd"/>`,
      `<text x="${x0 - 8}" y="${(py + 4).toFixed(1)}" text-anchor="end" ` +
        `font-size="11">${fmt(tick)}</text>`
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${height - 26}" text-anchor="middle" ` +
      `font-size="13">${esc(xLabel)}</text>`,
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 16 ${(y0 + y1) / 2})">${esc(yLabel)}</text>`,
    `<text x="${(x0 + x1) / 2}" y="${height - 8}" text-anchor="middle" ` +
      `font-size="11" fill="#555555" class="caption">${esc(caption)}</text>`
  );
  return parts;
}

function renderCurves(fig: CurveFigure, opts: Required<RenderOptions>): string {
  const { width, height } = opts;
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;

  const xs = fig.series.flatMap((s) => s.x);
  const xlo = Math.min(...xs);
  const xhi = Math.max(...xs);
  const xscale = linearScale(xlo, xhi, x0 + 12, x1 - 12);

  const tops = fig.series.flatMap((s) => s.y.map((v, i) => v + s.ci[i]));
  const positives = fig.series
    .flatMap((s) => s.y)
    .filter((v) => v > 0);
  let yscale: Scale;
  if (opts.yScale === "log") {
    const floor =
      positives.length > 0 ? Math.min(...positives) / 10 : 1e-6;
    const top = Math.max(...tops, floor * 10);
    yscale = logScale(floor, top, y0, y1);
  } else {
    yscale = linearScale(0, Math.max(...tops, 1e-12), y0, y1);
  }

  const parts = axes(width, height, fig.xLabel, fig.yLabel, fig.caption,
                     yscale);
  for (const x of fig.series[0].x) {
    const px = xscale.toPixel(x);
    parts.push(
      `<line x1="${px.toFixed(1)}" y1="${y0}" x2="${px.toFixed(1)}" ` +
        `y2="${y0 + 4}" stroke="black"/>`,
      `<text x="${px.toFixed(1)}" y="${y0 + 18}" text-anchor="middle" ` +
        `font-size="11">${fmt(x)}</text>`
    );
  }

  fig.series.forEach((series, si) => {
    const colour = PALETTE[si % PALETTE.length];
    const pts = series.x.map((x, i) => {
      const px = xscale.toPixel(x);
      const py = yscale.toPixel(yscale.clamp(series.y[i]));
      return [px, py] as const;
    });
    series.x.forEach((x, i) => {
      if (series.ci[i] <= 0) {
        return; // zero half-width: no visible bar
      }
      const px = xscale.toPixel(x);
      const hi = yscale.toPixel(yscale.clamp(series.y[i] + series.ci[i]));
      const lo = yscale.toPixel(yscale.clamp(series.y[i] - series.ci[i]));
      parts.push(
        `<line class="errbar" x1="${px.toFixed(1)}" y1="${lo.toFixed(1)}" ` +
          `x2="${px.toFixed(1)}" y2="${hi.toFixed(1)}" stroke="${colour}"/>`
      );
    });
    const coords = pts
      .map(([px, py]) => `${px.toFixed(1)},${py.toFixed(1)}`)
      .join(" ");
    parts.push(
      `<polyline class="curve" data-series="${esc(series.label)}" ` +
        `points="${coords}" fill="none" stroke="${colour}" stroke-width="1.8"/>`
    );
    for (const [px, py] of pts) {
      parts.push(
        `<circle class="pt" cx="${px.toFixed(1)}" cy="${py.toFixed(1)}" ` +
          `r="3" fill="${colour}"/>`
      );
    }
    parts.push(
      `<rect x="${x1 - 150}" y="${y1 + 18 * si}" width="12" height="3" ` +
        `fill="${colour}"/>`,
      `<text x="${x1 - 132}" y="${y1 + 18 * si + 5}" font-size="12" ` +
        `class="legend">${esc(series.label)}</text>`
    );
  });
  return parts.join("\n");
}

function renderBars(fig: BarFigure, opts: Required<RenderOptions>): string {
  const { width, height } = opts;
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;
  const yscale = linearScale(0, 1.0, y0, y1);
  const parts = axes(width, height, "", fig.yLabel, fig.caption, yscale);

  const groups = fig.groups.length;
  const slot = (x1 - x0) / groups;
  const barWidth = Math.min(18, (slot * 0.8) / fig.barLabels.length);
  fig.groups.forEach((group, gi) => {
    const centre = x0 + slot * (gi + 0.5);
    group.values.forEach((value, bi) => {
      const colour = PALETTE[bi % PALETTE.length];
      const px =
        centre + (bi - (group.values.length - 1) / 2) * (barWidth + 2) -
        barWidth / 2;
      const py = yscale.toPixel(value);
      parts.push(
        `<rect class="bar" data-bar="${esc(fig.barLabels[bi])}" ` +
          `x="${px.toFixed(1)}" y="${py.toFixed(1)}" ` +
          `width="${barWidth.toFixed(1)}" ` +
          `height="${(y0 - py).toFixed(1)}" fill="${colour}"/>`
      );
    });
    parts.push(
      `<text x="${centre.toFixed(1)}" y="${y0 + 18}" text-anchor="middle" ` +
        `font-size="10">${esc(group.label)}</text>`
    );
  });
  fig.barLabels.forEach((label, bi) => {
    parts.push(
      `<rect x="${x1 - 150}" y="${y1 + 16 * bi}" width="12" height="8" ` +
        `fill="${PALETTE[bi % PALETTE.length]}"/>`,
      `<text x="${x1 - 132}" y="${y1 + 16 * bi + 8}" font-size="11" ` +
        `class="legend">${esc(label)}</text>`
    );
  });
  return parts.join("\n");
}

export function renderSvg(fig: Figure, options: RenderOptions = {}): string {
  const opts: Required<RenderOptions> = {
    yScale: options.yScale ?? (fig.kind === "detect" ? "linear" : "log"),
    width: options.width ?? 640,
    height: options.height ?? 440,
  };
  const body =
    fig.kind === "detect"
      ? renderBars(fig, opts)
      : renderCurves(fig, opts);
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${opts.width}" ` +
      `height="${opts.height}" viewBox="0 0 ${opts.width} ${opts.height}" ` +
      `font-family="sans-serif">`,
    `<rect width="${opts.width}" height="${opts.height}" fill="white"/>`,
    body,
    `</svg>`,
  ].join("\n");
}
