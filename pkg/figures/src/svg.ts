/** Deterministic SVG building blocks: fixed styles, fixed number formatting,
 * no timestamps or randomness, so re-rendering a CSV is byte-identical. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  return scale;
}

/** Round tick positions covering [min, max] with about `count` steps. */
export function niceTicks(min: number, max: number, count = 5): number[] {
  if (!(max > min)) {
    return [min];
  }
  const rawStep = (max - min) / count;
  const power = Math.floor(Math.log10(rawStep));
  const base = 10 ** power;
  let step = base;
  for (const mult of [1, 2, 5, 10]) {
    step = mult * base;
    if (step >= rawStep) break;
  }
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 1e-9; v += step) {
    ticks.push(v);
  }
  return ticks;
}

/** Fixed-precision numeric attribute formatting. */
export function fmt(value: number): string {
  const rounded = Math.round(value * 10000) / 10000;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

/** Tick label formatting; powers of ten render as 1e<k>. */
export function fmtTick(value: number): string {
  if (value !== 0 && Math.abs(value) >= 100) {
    const exponent = Math.log10(Math.abs(value));
    if (Number.isInteger(exponent)) {
      return `${value < 0 ? "-" : ""}1e${exponent}`;
    }
  }
  return fmt(value);
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  children: string[] = [],
  text?: string,
): string {
  const parts = Object.entries(attrs)
    .map(([key, value]) => `${key}="${typeof value === "number" ? fmt(value) : value}"`)
    .join(" ");
  const open = parts ? `<${tag} ${parts}>` : `<${tag}>`;
  if (children.length === 0 && text === undefined) {
    return parts ? `<${tag} ${parts}/>` : `<${tag}/>`;
  }
  return `${open}${text ?? ""}${children.join("")}</${tag}>`;
}

export const WIDTH = 800;
export const HEIGHT = 520;
export const MARGIN = { top: 40, right: 160, bottom: 56, left: 72 };

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export interface Frame {
  x: Scale;
  y: Scale;
  parts: string[];
}

/** Axes, ticks, labels, and the plotting frame. */
export function frame(
  xDomain: [number, number],
  yDomain: [number, number],
  xLabel: string,
  yLabel: string,
  title: string,
): Frame {
  const x = linearScale(xDomain, [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale(yDomain, [HEIGHT - MARGIN.bottom, MARGIN.top]);
  const parts: string[] = [];
  parts.push(
    el("rect", {
      x: MARGIN.left,
      y: MARGIN.top,
      width: WIDTH - MARGIN.left - MARGIN.right,
      height: HEIGHT - MARGIN.top - MARGIN.bottom,
      fill: "none",
      stroke: "#333333",
      "stroke-width": 1,
    }),
  );
  for (const tick of niceTicks(xDomain[0], xDomain[1], 6)) {
    const px = x(tick);
    parts.push(
      el("line", {
        x1: px,
        y1: HEIGHT - MARGIN.bottom,
        x2: px,
        y2: HEIGHT - MARGIN.bottom + 6,
        stroke: "#333333",
      }),
    );
    parts.push(
      el(
        "text",
        {
          x: px,
          y: HEIGHT - MARGIN.bottom + 22,
          "text-anchor": "middle",
          "font-size": 12,
          "font-family": "sans-serif",
        },
        [],
        fmtTick(tick),
      ),
    );
  }
  for (const tick of niceTicks(yDomain[0], yDomain[1], 6)) {
    const py = y(tick);
    parts.push(
      el("line", {
        x1: MARGIN.left - 6,
        y1: py,
        x2: MARGIN.left,
        y2: py,
        stroke: "#333333",
      }),
    );
    parts.push(
      el(
        "text",
        {
          x: MARGIN.left - 10,
          y: py + 4,
          "text-anchor": "end",
          "font-size": 12,
          "font-family": "sans-serif",
        },
        [],
        fmtTick(tick),
      ),
    );
  }
  parts.push(
    el(
      "text",
      {
        x: (MARGIN.left + WIDTH - MARGIN.right) / 2,
        y: HEIGHT - 14,
        "text-anchor": "middle",
        "font-size": 14,
        "font-family": "sans-serif",
      },
      [],
      xLabel,
    ),
  );
  parts.push(
    el(
      "text",
      {
        x: 20,
        y: (MARGIN.top + HEIGHT - MARGIN.bottom) / 2,
        "text-anchor": "middle",
        "font-size": 14,
        "font-family": "sans-serif",
        transform: `rotate(-90 20 ${fmt((MARGIN.top + HEIGHT - MARGIN.bottom) / 2)})`,
      },
      [],
      yLabel,
    ),
  );
  parts.push(
    el(
      "text",
      {
        x: (MARGIN.left + WIDTH - MARGIN.right) / 2,
        y: 24,
        "text-anchor": "middle",
        "font-size": 16,
        "font-family": "sans-serif",
      },
      [],
      title,
    ),
  );
  return { x, y, parts };
}

export function document(parts: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}">` +
    el("rect", { x: 0, y: 0, width: WIDTH, height: HEIGHT, fill: "#ffffff" }) +
    parts.join("") +
    "</svg>\n"
  );
}
