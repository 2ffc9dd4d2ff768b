// Canvas painting of a SceneLayout. Geometry lives in layout.ts; this
// file only walks the model, so everything interesting stays testable
// without a DOM.

import { CELL_PX, MARGIN_PX, SceneLayout } from "./layout.js";

export function drawScene(canvas: HTMLCanvasElement, layout: SceneLayout): void {
  canvas.width = layout.widthPx;
  canvas.height = layout.heightPx;
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  ctx.fillStyle = "#fbf9f4";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  // grid
  ctx.strokeStyle = "#d8d3c8";
  ctx.lineWidth = 1;
  for (let col = 0; col <= layout.cols; col++) {
    const x = MARGIN_PX + col * CELL_PX;
    ctx.beginPath();
    ctx.moveTo(x, MARGIN_PX);
    ctx.lineTo(x, MARGIN_PX + layout.rows * CELL_PX);
    ctx.stroke();
  }
  for (let row = 0; row <= layout.rows; row++) {
    const y = MARGIN_PX + row * CELL_PX;
    ctx.beginPath();
    ctx.moveTo(MARGIN_PX, y);
    ctx.lineTo(MARGIN_PX + layout.cols * CELL_PX, y);
    ctx.stroke();
  }

  // zones
  for (const zone of layout.zones) {
    ctx.strokeStyle = "#8a7f5c";
    ctx.setLineDash([5, 3]);
    ctx.strokeRect(zone.x + 1, zone.y + 1, zone.width - 2, zone.height - 2);
    ctx.setLineDash([]);
    ctx.fillStyle = "#8a7f5c";
    ctx.font = "10px sans-serif";
    ctx.fillText(zone.name, zone.x + 4, zone.y + 12);
  }

  // objects
  for (const glyph of layout.glyphs) {
    paintGlyph(ctx, glyph.x, glyph.y, glyph.size, glyph);
  }

  // gripper slot
  ctx.strokeStyle = "#555";
  ctx.strokeRect(layout.gripper.x, layout.gripper.y, layout.gripper.size, layout.gripper.size);
  ctx.fillStyle = "#555";
  ctx.font = "10px sans-serif";
  ctx.fillText("gripper", layout.gripper.x, layout.gripper.y - 4);
  if (layout.gripper.glyph) {
    const g = layout.gripper.glyph;
    paintGlyph(ctx, g.x, g.y, g.size, g);
  }
}

type Glyph = SceneLayout["glyphs"][number];

function paintGlyph(ctx: CanvasRenderingContext2D, x: number, y: number, size: number, glyph: Glyph): void {
  ctx.fillStyle = glyph.fill;
  ctx.strokeStyle = "#333";
  ctx.lineWidth = 1.5;
  if (glyph.shape === "circle") {
    ctx.beginPath();
    ctx.arc(x + size / 2, y + size / 2, size / 2, 0, Math.PI * 2);
    ctx.fill();
    ctx.stroke();
  } else if (glyph.shape === "dish") {
    ctx.beginPath();
    ctx.roundRect(x, y + size * 0.25, size, size * 0.75, 6);
    ctx.fill();
    ctx.stroke();
  } else {
    ctx.fillRect(x, y, size, size);
    ctx.strokeRect(x, y, size, size);
    if (glyph.shape === "tile") {
      ctx.strokeRect(x + 2, y + 2, size - 4, size - 4);
    }
  }
  if (glyph.label) {
    ctx.fillStyle = "#111";
    ctx.font = `bold ${Math.max(11, size / 2)}px sans-serif`;
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(glyph.label, x + size / 2, y + size / 2 + (glyph.shape === "dish" ? size * 0.12 : 0));
    ctx.textAlign = "start";
    ctx.textBaseline = "alphabetic";
  }
  if (glyph.textureMark) {
    ctx.fillStyle = "#111";
    ctx.font = "9px sans-serif";
    ctx.fillText(glyph.textureMark, x + 2, y + 9);
  }
  if (glyph.stackBadge) {
    ctx.fillStyle = "#222";
    ctx.beginPath();
    ctx.arc(x + size - 5, y + 5, 7, 0, Math.PI * 2);
    ctx.fill();
    ctx.fillStyle = "#fff";
    ctx.font = "8px sans-serif";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(glyph.stackBadge, x + size - 5, y + 5);
    ctx.textAlign = "start";
    ctx.textBaseline = "alphabetic";
  }
}
