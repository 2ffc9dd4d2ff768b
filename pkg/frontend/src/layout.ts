// Scene snapshot -> drawable layout model.
//
// All geometry and glyph decisions happen here, pure and testable; the
// canvas renderer just walks the model. The layout tests snapshot this
// model instead of pixels.

import type { SceneSnapshot } from "./types.js";

export const CELL_PX = 48;
export const MARGIN_PX = 24;

export interface GlyphBox {
  objectId: number;
  col: number;
  row: number;
  x: number; // pixels, top-left of the glyph box
  y: number;
  size: number;
  fill: string;
  shape: "square" | "circle" | "tile" | "dish";
  label: string;
  stackBadge: string | null; // "z2" style badge for stacked objects
  textureMark: string | null;
}

export interface ZoneOutline {
  name: string;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface GripperSlot {
  x: number;
  y: number;
  size: number;
  glyph: GlyphBox | null;
}

export interface SceneLayout {
  widthPx: number;
  heightPx: number;
  cols: number;
  rows: number;
  zones: ZoneOutline[];
  glyphs: GlyphBox[];
  gripper: GripperSlot;
}

const FILLS: Record<string, string> = {
  red: "#d64545",
  green: "#3f9e52",
  blue: "#3e6fd8",
  yellow: "#d8b23e",
  none: "#9a9a9a",
};

const SHAPES: Record<string, GlyphBox["shape"]> = {
  cube: "square",
  toy: "circle",
  box: "dish",
  bowl: "dish",
  letter_tile: "tile",
  digit_tile: "tile",
  symbol_tile: "tile",
  food: "circle",
};

const TEXTURE_MARKS: Record<string, string | null> = {
  plain: null,
  striped: "≡",
  dotted: "⋯",
  wooden: "⌗",
};

export class SnapshotError extends Error {}

function checkSnapshot(scene: SceneSnapshot): void {
  if (
    !Number.isInteger(scene.width) ||
    !Number.isInteger(scene.height) ||
    scene.width <= 0 ||
    scene.height <= 0 ||
    !Array.isArray(scene.objects)
  ) {
    throw new SnapshotError("snapshot missing grid dimensions or objects");
  }
  for (const obj of scene.objects) {
    if (!Number.isInteger(obj.x) || !Number.isInteger(obj.y) || !Number.isInteger(obj.z)) {
      throw new SnapshotError(`object ${obj.id} has a malformed placement`);
    }
    if (obj.id !== scene.held && (obj.x < 0 || obj.x >= scene.width || obj.y < 0 || obj.y >= scene.height)) {
      throw new SnapshotError(`object ${obj.id} lies outside the grid`);
    }
  }
}

function glyphFor(obj: SceneSnapshot["objects"][number], topZ: number): GlyphBox {
  const inset = 6 + Math.min(obj.z, 3) * 2; // higher stack levels draw smaller
  return {
    objectId: obj.id,
    col: obj.x,
    row: obj.y,
    x: MARGIN_PX + obj.x * CELL_PX + inset,
    y: MARGIN_PX + obj.y * CELL_PX + inset,
    size: CELL_PX - 2 * inset,
    fill: FILLS[obj.color] ?? FILLS.none,
    shape: SHAPES[obj.kind] ?? "square",
    label: obj.label,
    stackBadge: topZ > 0 ? `z${obj.z}` : null,
    textureMark: TEXTURE_MARKS[obj.texture] ?? null,
  };
}

/** Build the drawable model: zones outlined, objects as colored glyphs
 * (top of each stack drawn, with a stack badge), held object in the
 * gripper slot. Throws SnapshotError on malformed snapshots. */
export function layoutScene(scene: SceneSnapshot): SceneLayout {
  checkSnapshot(scene);
  const zones: ZoneOutline[] = Object.entries(scene.zones ?? {})
    .sort(([a], [b]) => (a < b ? -1 : 1))
    .map(([name, [x0, y0, x1, y1]]) => ({
      name,
      x: MARGIN_PX + x0 * CELL_PX,
      y: MARGIN_PX + y0 * CELL_PX,
      width: (x1 - x0) * CELL_PX,
      height: (y1 - y0) * CELL_PX,
    }));

  const byCell = new Map<string, typeof scene.objects>();
  let heldGlyph: GlyphBox | null = null;
  for (const obj of scene.objects) {
    if (obj.id === scene.held) {
      heldGlyph = { ...glyphFor(obj, 0), x: 0, y: 0 };
      continue;
    }
    const key = `${obj.x},${obj.y}`;
    const cell = byCell.get(key) ?? [];
    cell.push(obj);
    byCell.set(key, cell);
  }

  const glyphs: GlyphBox[] = [];
  for (const cell of byCell.values()) {
    cell.sort((a, b) => a.z - b.z);
    const top = cell[cell.length - 1];
    glyphs.push(glyphFor(top, top.z));
  }
  glyphs.sort((a, b) => a.objectId - b.objectId);

  const widthPx = 2 * MARGIN_PX + scene.width * CELL_PX;
  const gripperSize = CELL_PX - 12;
  const gripper: GripperSlot = {
    x: widthPx + 12,
    y: MARGIN_PX,
    size: gripperSize,
    glyph: heldGlyph
      ? { ...heldGlyph, x: widthPx + 18, y: MARGIN_PX + 6, size: gripperSize - 12 }
      : null,
  };

  return {
    widthPx: widthPx + CELL_PX + 24, // room for the gripper column
    heightPx: 2 * MARGIN_PX + scene.height * CELL_PX,
    cols: scene.width,
    rows: scene.height,
    zones,
    glyphs,
    gripper,
  };
}
