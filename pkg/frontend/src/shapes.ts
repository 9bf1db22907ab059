/** SVG outlines per element kind, mirroring the service's fixed mapping:
 * strategy → rounded rectangle, mechanism → diamond, barrier → octagon,
 * moderator → rectangle, precondition → isosceles trapezoid, and all three
 * outcome kinds → circle (rendered as an ellipse over the element box).
 */

import type { ElementKind } from "./types.js";

export const ELEMENT_W = 160;
export const ELEMENT_H = 80;

export type ShapeName =
  | "rounded_rectangle"
  | "diamond"
  | "octagon"
  | "rectangle"
  | "isosceles_trapezoid"
  | "circle";

const SHAPE_OF: Record<ElementKind, ShapeName> = {
  strategy: "rounded_rectangle",
  mechanism: "diamond",
  barrier: "octagon",
  moderator: "rectangle",
  precondition: "isosceles_trapezoid",
  proximal_outcome: "circle",
  intermediate_outcome: "circle",
  distal_outcome: "circle",
};

export function shapeFor(kind: ElementKind): ShapeName {
  return SHAPE_OF[kind];
}

function polygon(points: [number, number][]): string {
  const rendered = points.map(([x, y]) => `${x},${y}`).join(" ");
  return `<polygon points="${rendered}"/>`;
}

/** Outline markup for an element of `kind` centred on (cx, cy). */
export function shapeMarkup(kind: ElementKind, cx: number, cy: number): string {
  const hw = ELEMENT_W / 2;
  const hh = ELEMENT_H / 2;
  switch (shapeFor(kind)) {
    case "rounded_rectangle":
      return `<rect x="${cx - hw}" y="${cy - hh}" width="${ELEMENT_W}" height="${ELEMENT_H}" rx="14"/>`;
    case "rectangle":
      return `<rect x="${cx - hw}" y="${cy - hh}" width="${ELEMENT_W}" height="${ELEMENT_H}" rx="0"/>`;
    case "circle":
      return `<ellipse cx="${cx}" cy="${cy}" rx="${hw}" ry="${hh}"/>`;
    case "diamond":
      return polygon([
        [cx, cy - hh],
        [cx + hw, cy],
        [cx, cy + hh],
        [cx - hw, cy],
      ]);
    case "octagon": {
      const cut = 24;
      return polygon([
        [cx - hw + cut, cy - hh],
        [cx + hw - cut, cy - hh],
        [cx + hw, cy - hh + cut / 2],
        [cx + hw, cy + hh - cut / 2],
        [cx + hw - cut, cy + hh],
        [cx - hw + cut, cy + hh],
        [cx - hw, cy + hh - cut / 2],
        [cx - hw, cy - hh + cut / 2],
      ]);
    }
    case "isosceles_trapezoid":
      return polygon([
        [cx - hw + 30, cy - hh],
        [cx + hw - 30, cy - hh],
        [cx + hw, cy + hh],
        [cx - hw, cy + hh],
      ]);
  }
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function wrapLabel(label: string, width = 22, maxLines = 3): string[] {
  const words = label.split(/\s+/).filter(Boolean);
  const lines: string[] = [];
  let current = "";
  for (const word of words) {
    const candidate = current ? `${current} ${word}` : word;
    if (candidate.length <= width || !current) {
      current = candidate;
    } else {
      lines.push(current);
      current = word;
    }
  }
  if (current) lines.push(current);
  if (lines.length === 0) lines.push("");
  if (lines.length > maxLines) {
    const kept = lines.slice(0, maxLines);
    kept[maxLines - 1] = kept[maxLines - 1].slice(0, width - 1) + "…";
    return kept;
  }
  return lines;
}

export function labelMarkup(label: string, cx: number, cy: number): string {
  const lines = wrapLabel(label);
  const lineHeight = 16;
  const startY = cy - (lineHeight * (lines.length - 1)) / 2 + 4;
  const spans = lines
    .map(
      (line, index) =>
        `<tspan x="${cx}" y="${startY + index * lineHeight}">${escapeXml(line)}</tspan>`,
    )
    .join("");
  return `<text text-anchor="middle" font-size="12">${spans}</text>`;
}

/** Full board markup for one element (shape + wrapped label). */
export function elementMarkup(
  kind: ElementKind,
  label: string,
  cx: number,
  cy: number,
): string {
  return shapeMarkup(kind, cx, cy) + labelMarkup(label, cx, cy);
}
