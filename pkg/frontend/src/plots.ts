/** SVG builders for the diagnostic panels.
 *
 * These are pure string builders: payload numbers are never recomputed or
 * rounded before display — tooltips and data attributes carry the exact
 * values (String(x)), only pixel coordinates are scaled for drawing.
 */

import type { SummaryPayload, WcorPayload } from "./types.js";

const W = 360;
const H = 180;
const PAD = 28;

export const SCREE_BAR_LIMIT = 20;

function svgOpen(width = W, height = H, cls = ""): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="plot ${cls}">`;
}

function scaler(lo: number, hi: number, outLo: number, outHi: number) {
  const span = hi - lo || 1;
  return (x: number) => outLo + ((x - lo) / span) * (outHi - outLo);
}

function polyline(xs: number[], ys: number[], stroke: string, opacity = 1): string {
  const pts = xs.map((x, i) => `${x.toFixed(2)},${ys[i].toFixed(2)}`).join(" ");
  return `<polyline fill="none" stroke="${stroke}" stroke-opacity="${opacity}" points="${pts}"/>`;
}

const PALETTE = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed", "#0891b2", "#be185d"];

export function seriesColor(i: number): string {
  return PALETTE[i % PALETTE.length];
}

/** Scree plot: singular-value bars with percentage tooltips; the tail past
 * `limit` components is collapsed into a single annotated bar. */
export function screePlot(summary: SummaryPayload, limit = SCREE_BAR_LIMIT): string {
  const values = summary.singular_values;
  const shown = values.slice(0, limit);
  const tail = values.length - shown.length;
  const barW = (W - 2 * PAD) / (shown.length + (tail > 0 ? 1 : 0));
  const y = scaler(0, Math.max(...shown), H - PAD, PAD);
  const parts: string[] = [svgOpen(W, H, "scree")];
  shown.forEach((sv, i) => {
    const top = y(sv);
    parts.push(
      `<rect class="scree-bar" data-component="${i + 1}" data-value="${String(sv)}" ` +
        `x="${(PAD + i * barW + 1).toFixed(2)}" y="${top.toFixed(2)}" ` +
        `width="${(barW - 2).toFixed(2)}" height="${(H - PAD - top).toFixed(2)}" ` +
        `fill="#2563eb"><title>component ${i + 1}: sigma=${String(sv)} ` +
        `(${String(summary.percentages[i])}%)</title></rect>`,
    );
  });
  if (tail > 0) {
    parts.push(
      `<rect class="scree-tail" x="${(PAD + shown.length * barW + 1).toFixed(2)}" ` +
        `y="${(H - PAD - 6).toFixed(2)}" width="${(barW - 2).toFixed(2)}" height="6" ` +
        `fill="#9ca3af"><title>${tail} more components collapsed</title></rect>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

/** Heatmap of |w-correlation| values; each cell carries the exact value. */
export function wcorHeatmap(payload: WcorPayload): string {
  const m = payload.values.length;
  const side = Math.min((W - 2 * PAD) / m, (H - 2 * PAD) / m);
  const parts: string[] = [svgOpen(W, H, "wcor")];
  for (let i = 0; i < m; i += 1) {
    for (let j = 0; j < m; j += 1) {
      const value = payload.values[i][j];
      const shade = Math.round(255 * (1 - Math.min(Math.abs(value), 1)));
      parts.push(
        `<rect class="wcor-cell" data-row="${payload.labels[i]}" ` +
          `data-col="${payload.labels[j]}" data-value="${String(value)}" ` +
          `x="${(PAD + j * side).toFixed(2)}" y="${(PAD + i * side).toFixed(2)}" ` +
          `width="${side.toFixed(2)}" height="${side.toFixed(2)}" ` +
          `fill="rgb(${shade},${shade},255)">` +
          `<title>rho(${payload.labels[i]},${payload.labels[j]}) = ${String(value)}</title></rect>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("");
}

/** Scatter of consecutive right singular vectors (paired plot). */
export function pairedPlot(summary: SummaryPayload, i: number, j: number): string {
  const vi = summary.v[i];
  const vj = summary.v[j];
  const x = scaler(Math.min(...vi), Math.max(...vi), PAD, W - PAD);
  const y = scaler(Math.min(...vj), Math.max(...vj), H - PAD, PAD);
  const parts: string[] = [svgOpen(W, H, "paired")];
  parts.push(polyline(vi.map(x), vj.map(y), "#9ca3af", 0.8));
  vi.forEach((value, k) => {
    parts.push(
      `<circle r="2" cx="${x(value).toFixed(2)}" cy="${y(vj[k]).toFixed(2)}" fill="#2563eb">` +
        `<title>t=${k + 1}: (${String(value)}, ${String(vj[k])})</title></circle>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}

/** Within-window view: the L component curves of one left singular function. */
export function psiCurvePanel(summary: SummaryPayload, component: number): string {
  const curves = summary.psi_curves[component];
  const grid = summary.render_grid;
  const flat = curves.flat();
  const x = scaler(grid[0], grid[grid.length - 1], PAD, W - PAD);
  const y = scaler(Math.min(...flat), Math.max(...flat), H - PAD, PAD);
  const parts: string[] = [svgOpen(W, H, "psi")];
  curves.forEach((curve, lag) => {
    parts.push(polyline(grid.map(x), curve.map(y), seriesColor(lag), 0.75));
  });
  parts.push("</svg>");
  return parts.join("");
}

/** Across-window view: function norm of each lag slot of one component. */
export function lagNormPanel(summary: SummaryPayload, component: number): string {
  const norms = summary.lag_norms[component];
  const x = scaler(0, norms.length - 1, PAD, W - PAD);
  const y = scaler(0, Math.max(...norms), H - PAD, PAD);
  const parts: string[] = [svgOpen(W, H, "lagnorm")];
  parts.push(polyline(norms.map((_, l) => x(l)), norms.map(y), "#2563eb"));
  norms.forEach((value, l) => {
    parts.push(
      `<circle r="2.5" cx="${x(l).toFixed(2)}" cy="${y(value).toFixed(2)}" fill="#dc2626">` +
        `<title>lag ${l + 1}: ${String(value)}</title></circle>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}

/** Overlay of all curves of one reconstructed component over the grid. */
export function componentOverlay(s: number[], curves: number[][], color: string): string {
  const flat = curves.flat();
  const x = scaler(s[0], s[s.length - 1], PAD, W - PAD);
  const y = scaler(Math.min(...flat), Math.max(...flat), H - PAD, PAD);
  const N = curves[0].length;
  const parts: string[] = [svgOpen(W, H, "component")];
  for (let t = 0; t < N; t += 1) {
    parts.push(
      polyline(s.map(x), curves.map((row) => y(row[t])), color, 0.35),
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
