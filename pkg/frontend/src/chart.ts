/**
 * Spectrogram view: ncr and 5-year-median deviation as two lines over the
 * reference publication years, detected peaks marked, optional overlay of a
 * second session's spectrum for visual comparison. Pure SVG, no dependencies;
 * every plotted number comes from the service.
 */

import type { SpectrumPoint } from "./api.js";

export interface OverlaySpectrum {
  name: string;
  points: SpectrumPoint[];
}

export interface ChartOptions {
  width?: number;
  height?: number;
  peaks?: number[];
  overlay?: OverlaySpectrum | null;
  onYearClick?: (rpy: number) => void;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function el(name: string, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

function polyline(
  xs: number[],
  ys: number[],
  className: string,
  stroke: string,
  dashed = false,
): SVGElement {
  const pts = xs.map((x, i) => `${x.toFixed(1)},${ys[i].toFixed(1)}`).join(" ");
  const line = el("polyline", { points: pts, class: className, fill: "none", stroke, "stroke-width": 1.5 });
  if (dashed) line.setAttribute("stroke-dasharray", "5,3");
  return line;
}

/** Per-year difference between two fetched spectra (overlay minus base). */
export function overlayDeltas(
  base: SpectrumPoint[],
  overlay: SpectrumPoint[],
): { rpy: number; delta: number }[] {
  const byYear = new Map(overlay.map((p) => [p.rpy, p.ncr]));
  return base
    .filter((p) => byYear.has(p.rpy))
    .map((p) => ({ rpy: p.rpy, delta: (byYear.get(p.rpy) as number) - p.ncr }));
}

export function renderSpectrogram(
  container: HTMLElement,
  points: SpectrumPoint[],
  options: ChartOptions = {},
): SVGSVGElement {
  const width = options.width ?? 900;
  const height = options.height ?? 300;
  const margin = { top: 12, right: 16, bottom: 28, left: 44 };
  const innerW = width - margin.left - margin.right;
  const innerH = height - margin.top - margin.bottom;

  container.textContent = "";
  const svg = el("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width,
    height,
    class: "spectrogram",
    role: "img",
  }) as SVGSVGElement;

  if (points.length === 0) {
    container.appendChild(svg);
    return svg;
  }

  const years = points.map((p) => p.rpy);
  const loYear = years[0];
  const hiYear = years[years.length - 1];
  const allValues = points
    .flatMap((p) => [p.ncr, p.median_dev])
    .concat(options.overlay ? options.overlay.points.map((p) => p.ncr) : []);
  const vMax = Math.max(1, ...allValues);
  const vMin = Math.min(0, ...allValues);

  const x = (rpy: number) =>
    margin.left + (hiYear === loYear ? innerW / 2 : ((rpy - loYear) / (hiYear - loYear)) * innerW);
  const y = (value: number) => margin.top + innerH - ((value - vMin) / (vMax - vMin)) * innerH;

  // axes: baseline at zero plus sparse year ticks
  svg.appendChild(el("line", {
    x1: margin.left, y1: y(0), x2: margin.left + innerW, y2: y(0),
    stroke: "#999", class: "axis-zero",
  }));
  const tickStep = Math.max(1, Math.round((hiYear - loYear) / 10 / 5) * 5);
  for (let year = Math.ceil(loYear / tickStep) * tickStep; year <= hiYear; year += tickStep) {
    const label = el("text", {
      x: x(year), y: height - 8, "text-anchor": "middle", class: "tick", "font-size": 10,
    });
    label.textContent = String(year);
    svg.appendChild(label);
  }

  const xs = points.map((p) => x(p.rpy));
  svg.appendChild(polyline(xs, points.map((p) => y(p.ncr)), "ncr-line", "#c0392b"));
  svg.appendChild(polyline(xs, points.map((p) => y(p.median_dev)), "dev-line", "#2c5aa0"));

  if (options.overlay && options.overlay.points.length) {
    const overlayPts = options.overlay.points.filter((p) => p.rpy >= loYear && p.rpy <= hiYear);
    svg.appendChild(
      polyline(
        overlayPts.map((p) => x(p.rpy)),
        overlayPts.map((p) => y(p.ncr)),
        "overlay-line",
        "#c0392b",
        true,
      ),
    );
  }

  for (const year of options.peaks ?? []) {
    const point = points.find((p) => p.rpy === year);
    if (!point) continue;
    svg.appendChild(el("circle", {
      cx: x(year), cy: y(point.ncr), r: 3.5, class: "peak-marker",
      fill: "#000", "data-rpy": year,
    }));
  }

  // invisible per-year hit areas for the drill-down
  const step = points.length > 1 ? xs[1] - xs[0] : innerW;
  points.forEach((p, i) => {
    const hit = el("rect", {
      x: xs[i] - step / 2, y: margin.top, width: step, height: innerH,
      fill: "transparent", class: "year-hit", "data-rpy": p.rpy,
    });
    hit.addEventListener("click", () => options.onYearClick?.(p.rpy));
    svg.appendChild(hit);
  });

  container.appendChild(svg);
  return svg;
}
