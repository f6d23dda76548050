/** Deterministic SVG line charts with +-2 stderr error bars.
 *
 * Every marker carries data-series / data-x / data-y / data-se attributes at
 * full float precision, and the root element records both scale domains, so a
 * rendered chart can be parsed back to the exact numbers it was built from.
 */

export interface Point {
  x: number;
  y: number;
  se: number;
}

export interface Series {
  label: string;
  points: Point[];
}

export interface ChartOptions {
  xLabel: string;
  yLabel: string;
  xScale: "log" | "linear";
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 24, right: 24, bottom: 56, left: 76 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const BAR_FACTOR = 2; // error bars span +- 2 stderr

interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
  return Object.assign(f, { domain, range });
}

function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const l0 = Math.log(d0);
  const span = Math.log(d1) - l0 || 1;
  const f = (v: number) => r0 + ((Math.log(v) - l0) / span) * (r1 - r0);
  return Object.assign(f, { domain, range });
}

/** Round-number ticks (1-2-5 progression) covering [lo, hi]. */
export function ticks(lo: number, hi: number, want = 6): number[] {
  if (lo === hi) return [lo];
  const step = niceStep((hi - lo) / want);
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

function niceStep(rough: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const frac = rough / mag;
  if (frac <= 1) return mag;
  if (frac <= 2) return 2 * mag;
  if (frac <= 5) return 5 * mag;
  return 10 * mag;
}

/** Ticks at 1-2-5 times powers of ten inside [lo, hi]. */
export function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  let decade = Math.pow(10, Math.floor(Math.log10(lo)));
  while (decade <= hi) {
    for (const m of [1, 2, 5]) {
      const v = m * decade;
      if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push(v);
    }
    decade *= 10;
  }
  return out;
}

function tickText(v: number): string {
  // largest magnitudes first so 2000 prints as 2000, 0.25 as 0.25
  return Math.abs(v) >= 1e6 || (v !== 0 && Math.abs(v) < 1e-4)
    ? v.toExponential(1)
    : String(Number(v.toPrecision(10)));
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

/** Render the chart; the output string depends only on the arguments. */
export function buildChart(series: Series[], opts: ChartOptions): string {
  if (series.length === 0 || series.every((s) => s.points.length === 0)) {
    throw new Error("nothing to plot: no series with points");
  }
  const pts = series.flatMap((s) => s.points);
  let [x0, x1] = extent(pts.map((p) => p.x));
  let [y0, y1] = extent(pts.flatMap((p) => [p.y - BAR_FACTOR * p.se, p.y + BAR_FACTOR * p.se]));
  if (opts.xScale === "log") {
    x0 /= 1.1;
    x1 *= 1.1;
  } else {
    const pad = (x1 - x0 || Math.abs(x0) || 1) * 0.05;
    x0 -= pad;
    x1 += pad;
  }
  const ypad = (y1 - y0 || Math.abs(y0) || 1) * 0.05;
  y0 -= ypad;
  y1 += ypad;

  const plotL = MARGIN.left;
  const plotR = WIDTH - MARGIN.right;
  const plotT = MARGIN.top;
  const plotB = HEIGHT - MARGIN.bottom;
  const sx = (opts.xScale === "log" ? logScale : linearScale)([x0, x1], [plotL, plotR]);
  const sy = linearScale([y0, y1], [plotB, plotT]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12" ` +
      `data-x-scale="${opts.xScale}" data-x-domain="${x0},${x1}" data-y-domain="${y0},${y1}" ` +
      `data-x-range="${plotL},${plotR}" data-y-range="${plotB},${plotT}">`
  );
  parts.push(`<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  // grid and axes
  const xTicks = opts.xScale === "log" ? logTicks(x0, x1) : ticks(x0, x1);
  const yTicks = ticks(y0, y1);
  for (const t of xTicks) {
    const px = sx(t);
    parts.push(`<line x1="${px}" y1="${plotT}" x2="${px}" y2="${plotB}" stroke="#dddddd"/>`);
    parts.push(`<line x1="${px}" y1="${plotB}" x2="${px}" y2="${plotB + 5}" stroke="black"/>`);
    parts.push(`<text x="${px}" y="${plotB + 18}" text-anchor="middle">${tickText(t)}</text>`);
  }
  for (const t of yTicks) {
    const py = sy(t);
    parts.push(`<line x1="${plotL}" y1="${py}" x2="${plotR}" y2="${py}" stroke="#dddddd"/>`);
    parts.push(`<line x1="${plotL - 5}" y1="${py}" x2="${plotL}" y2="${py}" stroke="black"/>`);
    parts.push(`<text x="${plotL - 8}" y="${py + 4}" text-anchor="end">${tickText(t)}</text>`);
  }
  parts.push(`<line x1="${plotL}" y1="${plotB}" x2="${plotR}" y2="${plotB}" stroke="black"/>`);
  parts.push(`<line x1="${plotL}" y1="${plotT}" x2="${plotL}" y2="${plotB}" stroke="black"/>`);

  // axis labels
  parts.push(
    `<text class="x-label" x="${(plotL + plotR) / 2}" y="${HEIGHT - 12}" text-anchor="middle">${esc(opts.xLabel)}</text>`
  );
  parts.push(
    `<text class="y-label" x="18" y="${(plotT + plotB) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${(plotT + plotB) / 2})">${esc(opts.yLabel)}</text>`
  );

  // series
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const ordered = [...s.points].sort((a, b) => a.x - b.x);
    if (ordered.length > 1) {
      const path = ordered.map((p) => `${sx(p.x)},${sy(p.y)}`).join(" ");
      parts.push(`<polyline points="${path}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    }
    for (const p of ordered) {
      const px = sx(p.x);
      const lo = sy(p.y - BAR_FACTOR * p.se);
      const hi = sy(p.y + BAR_FACTOR * p.se);
      parts.push(`<line class="errorbar" x1="${px}" y1="${lo}" x2="${px}" y2="${hi}" stroke="${color}"/>`);
      parts.push(`<line x1="${px - 4}" y1="${lo}" x2="${px + 4}" y2="${lo}" stroke="${color}"/>`);
      parts.push(`<line x1="${px - 4}" y1="${hi}" x2="${px + 4}" y2="${hi}" stroke="${color}"/>`);
      parts.push(
        `<circle cx="${px}" cy="${sy(p.y)}" r="3.5" fill="${color}" ` +
          `data-series="${esc(s.label)}" data-x="${p.x}" data-y="${p.y}" data-se="${p.se}"/>`
      );
    }
  });

  // legend, top right inside the plot area
  const legendX = plotR - 200;
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const ly = plotT + 14 + 18 * i;
    parts.push(`<line class="legend" x1="${legendX}" y1="${ly}" x2="${legendX + 24}" y2="${ly}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text class="legend" x="${legendX + 30}" y="${ly + 4}">${esc(s.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n");
}

/** Read the plotted numbers back out of a buildChart SVG. */
export function extractSeries(svg: string): Series[] {
  const bySeries = new Map<string, Point[]>();
  const circle = /<circle[^>]*data-series="([^"]*)"[^>]*data-x="([^"]*)" data-y="([^"]*)" data-se="([^"]*)"/g;
  let m: RegExpExecArray | null;
  while ((m = circle.exec(svg)) !== null) {
    const label = m[1];
    if (!bySeries.has(label)) bySeries.set(label, []);
    bySeries.get(label)!.push({ x: Number(m[2]), y: Number(m[3]), se: Number(m[4]) });
  }
  return [...bySeries.entries()].map(([label, points]) => ({ label, points }));
}

/** Invert marker pixel coordinates through the domains recorded on the root
 * element; used to cross-check the scale math against the data attributes. */
export function invertCoordinates(svg: string): { x: number; y: number }[] {
  const root = svg.match(
    /data-x-scale="([^"]*)" data-x-domain="([^"]*)" data-y-domain="([^"]*)" data-x-range="([^"]*)" data-y-range="([^"]*)"/
  );
  if (!root) throw new Error("not a chart produced by buildChart");
  const [xKind, xd, yd, xr, yr] = root.slice(1);
  const [xd0, xd1] = xd.split(",").map(Number);
  const [yd0, yd1] = yd.split(",").map(Number);
  const [xr0, xr1] = xr.split(",").map(Number);
  const [yr0, yr1] = yr.split(",").map(Number);
  const out: { x: number; y: number }[] = [];
  const circle = /<circle cx="([^"]*)" cy="([^"]*)"/g;
  let m: RegExpExecArray | null;
  while ((m = circle.exec(svg)) !== null) {
    const fx = (Number(m[1]) - xr0) / (xr1 - xr0);
    const fy = (Number(m[2]) - yr0) / (yr1 - yr0);
    const x =
      xKind === "log"
        ? Math.exp(Math.log(xd0) + fx * (Math.log(xd1) - Math.log(xd0)))
        : xd0 + fx * (xd1 - xd0);
    out.push({ x, y: yd0 + fy * (yd1 - yd0) });
  }
  return out;
}
