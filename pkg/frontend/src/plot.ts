/** Canvas plot of the signature curve: raw samples as markers, the
 * polynomial fit as a continuous line, day-number axis from the store
 * epoch. */

import type { CurveView } from "./viewmodel.js";

const MARGIN = { left: 44, right: 12, top: 12, bottom: 28 };

export function drawCurve(canvas: HTMLCanvasElement, curve: CurveView): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);

  const all = curve.raw.concat(curve.fit ?? []);
  if (all.length === 0) {
    ctx.fillStyle = "#667";
    ctx.font = "13px sans-serif";
    ctx.fillText("no curve data", width / 2 - 40, height / 2);
    return;
  }

  const xs = all.map((p) => p[0]);
  const ys = all.map((p) => p[1]);
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const y0 = Math.min(0, Math.min(...ys));
  const y1 = Math.max(...ys) * 1.05 || 1;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const px = (x: number) => MARGIN.left + ((x - x0) / Math.max(1, x1 - x0)) * plotW;
  const py = (y: number) => MARGIN.top + (1 - (y - y0) / (y1 - y0)) * plotH;

  ctx.strokeStyle = "#ccd";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(MARGIN.left, MARGIN.top);
  ctx.lineTo(MARGIN.left, height - MARGIN.bottom);
  ctx.lineTo(width - MARGIN.right, height - MARGIN.bottom);
  ctx.stroke();

  ctx.fillStyle = "#667";
  ctx.font = "11px sans-serif";
  for (const frac of [0, 0.5, 1]) {
    const y = y0 + frac * (y1 - y0);
    ctx.fillText(y.toFixed(2), 6, py(y) + 4);
    const x = x0 + frac * (x1 - x0);
    ctx.fillText(`day ${Math.round(x)}`, px(x) - 18, height - 8);
  }

  if (curve.fit && curve.fit.length > 1) {
    ctx.strokeStyle = "#2563eb";
    ctx.lineWidth = 2;
    ctx.beginPath();
    curve.fit.forEach(([x, y], i) => {
      if (i === 0) ctx.moveTo(px(x), py(y));
      else ctx.lineTo(px(x), py(y));
    });
    ctx.stroke();
  }

  ctx.fillStyle = "#16a34a";
  for (const [x, y] of curve.raw) {
    ctx.beginPath();
    ctx.arc(px(x), py(y), 3, 0, 2 * Math.PI);
    ctx.fill();
  }

  ctx.fillStyle = "#445";
  ctx.font = "11px sans-serif";
  const legend = curve.fitDegree !== null
    ? `markers: raw mean NDVI · line: degree-${curve.fitDegree} fit · ${curve.contributingCells} cells`
    : `markers: raw mean NDVI · ${curve.contributingCells} cells`;
  ctx.fillText(legend, MARGIN.left, 10);
}
