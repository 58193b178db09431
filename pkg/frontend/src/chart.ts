/** Canvas renderer for the live fit view. Thin: all math sits in fitView. */

import type { FitViewModel } from "./fitView.js";

const MARGIN = { left: 48, right: 16, top: 16, bottom: 36 };

export function drawFitView(canvas: HTMLCanvasElement, model: FitViewModel): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.font = "12px system-ui, sans-serif";

  if (model.state === "empty") {
    ctx.fillStyle = "#667";
    ctx.fillText("No responses yet.", MARGIN.left, height / 2);
    return;
  }

  const xs = model.points.map((p) => p.x);
  let xMin = Math.min(...xs);
  let xMax = Math.max(...xs);
  if (model.state === "full") {
    xMin = Math.min(xMin, model.curve[0].x);
    xMax = Math.max(xMax, model.curve[model.curve.length - 1].x);
  }
  const pad = Math.max(xMax - xMin, 1) * 0.05;
  xMin -= pad;
  xMax += pad;

  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const px = (x: number) => MARGIN.left + ((x - xMin) / (xMax - xMin)) * plotW;
  const py = (p: number) => MARGIN.top + (1 - p) * plotH;

  // frame + gridlines at 0, 0.5, 1
  ctx.strokeStyle = "#ccd";
  ctx.fillStyle = "#667";
  for (const p of [0, 0.5, 1]) {
    ctx.beginPath();
    ctx.moveTo(MARGIN.left, py(p));
    ctx.lineTo(width - MARGIN.right, py(p));
    ctx.stroke();
    ctx.fillText(p.toFixed(1), 8, py(p) + 4);
  }
  ctx.fillText("comparison size (um)", MARGIN.left + plotW / 2 - 60, height - 8);

  if (model.state === "full") {
    // threshold markers first so data draws on top
    ctx.strokeStyle = "#9b6";
    ctx.setLineDash([5, 4]);
    ctx.beginPath();
    ctx.moveTo(px(model.pseUm), py(0));
    ctx.lineTo(px(model.pseUm), py(1));
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = "#583";
    ctx.fillText(`50% point ${model.pseUm.toFixed(1)}`, px(model.pseUm) + 4, py(1) + 12);

    ctx.strokeStyle = "#36c";
    ctx.lineWidth = 2;
    ctx.beginPath();
    model.curve.forEach((point, i) => {
      if (i === 0) ctx.moveTo(px(point.x), py(point.p));
      else ctx.lineTo(px(point.x), py(point.p));
    });
    ctx.stroke();
    ctx.lineWidth = 1;
  }

  ctx.fillStyle = "#d33";
  for (const point of model.points) {
    ctx.beginPath();
    ctx.arc(px(point.x), py(point.proportion), 4, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillText(String(point.n), px(point.x) + 6, py(point.proportion) - 6);
  }

  if (model.state === "points-only") {
    ctx.fillStyle = "#a60";
    ctx.fillText(model.notice, MARGIN.left, MARGIN.top + 12);
  }

  // x tick labels at the data levels
  ctx.fillStyle = "#667";
  for (const point of model.points) {
    ctx.fillText(String(point.x), px(point.x) - 10, height - MARGIN.bottom + 16);
  }
}
