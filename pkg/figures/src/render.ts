/** Figure assembly from sweep rows. The renderer only displays CSV columns;
 * it never recomputes statistics. */

import { SweepRow } from "./csv.js";
import { HEIGHT, MARGIN, PALETTE, WIDTH, document, el, fmt, frame } from "./svg.js";

export type FigureKind = "fig1" | "fig2";

export interface RenderOptions {
  kind: FigureKind;
  asymptote?: number;
}

export interface RenderResult {
  svg: string;
  warnings: string[];
}

function extent(values: number[], pad = 0.06): [number, number] {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || Math.abs(hi) || 1;
  return [lo - pad * span, hi + pad * span];
}

function polyline(points: [number, number][], color: string, dashed = false): string {
  const attrs: Record<string, string | number> = {
    points: points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" "),
    fill: "none",
    stroke: color,
    "stroke-width": 1.5,
  };
  if (dashed) {
    attrs["stroke-dasharray"] = "6,4";
  }
  return el("polyline", attrs);
}

function legend(entries: [string, string][], extra: string[] = []): string[] {
  const parts: string[] = [];
  let y = MARGIN.top + 10;
  for (const [label, color] of entries) {
    parts.push(
      el("line", {
        x1: WIDTH - MARGIN.right + 12,
        y1: y,
        x2: WIDTH - MARGIN.right + 34,
        y2: y,
        stroke: color,
        "stroke-width": 2,
      }),
    );
    parts.push(
      el(
        "text",
        {
          x: WIDTH - MARGIN.right + 40,
          y: y + 4,
          "font-size": 12,
          "font-family": "sans-serif",
        },
        [],
        label,
      ),
    );
    y += 20;
  }
  return parts.concat(extra);
}

function emptyFigure(kind: FigureKind, warnings: string[]): RenderResult {
  const { parts } = frame([0, 1], [0, 1], "M", "eta", titleOf(kind));
  warnings.push("no rows to plot; rendering axes only");
  return { svg: document(parts), warnings };
}

function titleOf(kind: FigureKind): string {
  return kind === "fig1"
    ? "Efficiency of k-gram and randomly generated complete codes"
    : "Run-length code efficiency by source length";
}

/** Efficiency against code size: k-gram curves and random-code scatter, one
 * visual group per (p, q) pair. */
export function renderFig1(rows: SweepRow[]): RenderResult {
  const warnings: string[] = [];
  const usable = rows.filter((r) => r.code_type === "kgram" || r.code_type === "random");
  if (usable.length === 0) {
    return emptyFigure("fig1", warnings);
  }
  const groups = [...new Set(usable.map((r) => `${r.p},${r.q}`))].sort();
  const xDomain = extent(usable.map((r) => r.M));
  const yDomain = extent(usable.map((r) => r.eta_mean));
  const { x, y, parts } = frame(xDomain, yDomain, "M", "eta", titleOf("fig1"));
  const entries: [string, string][] = [];
  groups.forEach((group, gi) => {
    const [p, q] = group.split(",");
    const colorLine = PALETTE[(2 * gi) % PALETTE.length];
    const colorDots = PALETTE[(2 * gi + 1) % PALETTE.length];
    const kgrams = usable
      .filter((r) => r.code_type === "kgram" && `${r.p},${r.q}` === group)
      .sort((a, b) => a.M - b.M);
    if (kgrams.length > 0) {
      parts.push(polyline(kgrams.map((r) => [x(r.M), y(r.eta_mean)]), colorLine));
      for (const row of kgrams) {
        parts.push(
          el("circle", { cx: x(row.M), cy: y(row.eta_mean), r: 3, fill: colorLine }),
        );
      }
      entries.push([`kgram p=${p},q=${q}`, colorLine]);
    }
    const randoms = usable
      .filter((r) => r.code_type === "random" && `${r.p},${r.q}` === group)
      .sort((a, b) => a.M - b.M);
    if (randoms.length > 0) {
      for (const row of randoms) {
        const cx = x(row.M);
        const cy = y(row.eta_mean);
        parts.push(
          el("path", {
            d: `M ${fmt(cx - 4)} ${fmt(cy)} L ${fmt(cx + 4)} ${fmt(cy)} M ${fmt(cx)} ${fmt(
              cy - 4,
            )} L ${fmt(cx)} ${fmt(cy + 4)}`,
            stroke: colorDots,
            "stroke-width": 1.5,
            fill: "none",
          }),
        );
      }
      entries.push([`random p=${p},q=${q}`, colorDots]);
    }
  });
  parts.push(...legend(entries));
  return { svg: document(parts), warnings };
}

/** Efficiency against code size for run-length codes, one curve per source
 * length, with an optional horizontal asymptote reference line. */
export function renderFig2(rows: SweepRow[], asymptote?: number): RenderResult {
  const warnings: string[] = [];
  const usable = rows.filter((r) => r.code_type === "rle");
  if (usable.length === 0) {
    return emptyFigure("fig2", warnings);
  }
  const lengths = [...new Set(usable.map((r) => r.N))].sort((a, b) => a - b);
  const xDomain = extent(usable.map((r) => r.M));
  const yValues = usable.map((r) => r.eta_mean);
  if (asymptote !== undefined) {
    yValues.push(asymptote);
  }
  const yDomain = extent(yValues);
  const { x, y, parts } = frame(xDomain, yDomain, "M", "eta", titleOf("fig2"));
  const entries: [string, string][] = [];
  lengths.forEach((n, i) => {
    const color = PALETTE[i % PALETTE.length];
    const series = usable.filter((r) => r.N === n).sort((a, b) => a.M - b.M);
    parts.push(polyline(series.map((r) => [x(r.M), y(r.eta_mean)]), color));
    for (const row of series) {
      parts.push(el("circle", { cx: x(row.M), cy: y(row.eta_mean), r: 3, fill: color }));
    }
    entries.push([`N=${formatLength(n)}`, color]);
  });
  const extra: string[] = [];
  if (asymptote !== undefined) {
    const py = y(asymptote);
    extra.push(
      el("line", {
        class: "asymptote",
        x1: MARGIN.left,
        y1: py,
        x2: WIDTH - MARGIN.right,
        y2: py,
        stroke: "#000000",
        "stroke-width": 1.5,
        "stroke-dasharray": "8,5",
      }),
    );
    extra.push(
      el(
        "text",
        {
          x: WIDTH - MARGIN.right - 6,
          y: py - 6,
          "text-anchor": "end",
          "font-size": 12,
          "font-family": "sans-serif",
        },
        [],
        `mean runs = ${fmt(asymptote)}`,
      ),
    );
  }
  parts.push(...legend(entries, extra));
  return { svg: document(parts), warnings };
}

function formatLength(n: number): string {
  const exponent = Math.log10(n);
  return Number.isInteger(exponent) ? `1e${exponent}` : String(n);
}

export function render(rows: SweepRow[], options: RenderOptions): RenderResult {
  return options.kind === "fig1" ? renderFig1(rows) : renderFig2(rows, options.asymptote);
}
