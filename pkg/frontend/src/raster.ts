/** RGBA pixel canvas with lines, bars, and stroke-font text. */

import { GLYPH_ADVANCE, GLYPH_HEIGHT, glyphStrokes } from "./font.js";

export type Color = [number, number, number];

export const BLACK: Color = [20, 20, 25];
export const GREY: Color = [150, 150, 155];
export const LIGHT_GREY: Color = [220, 220, 224];
export const ACCENTS: Color[] = [
  [31, 119, 180],
  [214, 39, 40],
  [44, 160, 44],
  [255, 127, 14],
  [148, 103, 189],
];

export class Raster {
  readonly data: Uint8Array;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8Array(width * height * 4);
    this.fill([255, 255, 255]);
  }

  fill(color: Color): void {
    for (let i = 0; i < this.width * this.height; i++) {
      this.data[i * 4] = color[0];
      this.data[i * 4 + 1] = color[1];
      this.data[i * 4 + 2] = color[2];
      this.data[i * 4 + 3] = 255;
    }
  }

  set(x: number, y: number, color: Color): void {
    x = Math.round(x);
    y = Math.round(y);
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const base = (y * this.width + x) * 4;
    this.data[base] = color[0];
    this.data[base + 1] = color[1];
    this.data[base + 2] = color[2];
    this.data[base + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Color): void {
    // Bresenham on rounded endpoints.
    let ax = Math.round(x0);
    let ay = Math.round(y0);
    const bx = Math.round(x1);
    const by = Math.round(y1);
    const dx = Math.abs(bx - ax);
    const dy = -Math.abs(by - ay);
    const sx = ax < bx ? 1 : -1;
    const sy = ay < by ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(ax, ay, color);
      if (ax === bx && ay === by) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ax += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ay += sy;
      }
    }
  }

  rect(x0: number, y0: number, x1: number, y1: number, color: Color, filled = false): void {
    if (filled) {
      for (let y = Math.min(y0, y1); y <= Math.max(y0, y1); y++) {
        this.line(x0, y, x1, y, color);
      }
    } else {
      this.line(x0, y0, x1, y0, color);
      this.line(x1, y0, x1, y1, color);
      this.line(x1, y1, x0, y1, color);
      this.line(x0, y1, x0, y0, color);
    }
  }

  text(x: number, y: number, message: string, color: Color, size = 1): void {
    let cx = x;
    for (const ch of message) {
      for (const stroke of glyphStrokes(ch)) {
        for (let i = 0; i + 1 < stroke.length || (stroke.length === 1 && i === 0); i++) {
          const [sx, sy] = stroke[i];
          const [ex, ey] = stroke[Math.min(i + 1, stroke.length - 1)];
          this.line(cx + sx * size, y + sy * size, cx + ex * size, y + ey * size, color);
          if (stroke.length === 1) break;
        }
      }
      cx += GLYPH_ADVANCE * size;
    }
  }

  textWidth(message: string, size = 1): number {
    return message.length * GLYPH_ADVANCE * size;
  }

  textHeight(size = 1): number {
    return GLYPH_HEIGHT * size;
  }
}

/** Viridis-like colormap over t in [0, 1]. */
const VIRIDIS: Array<[number, Color]> = [
  [0.0, [68, 1, 84]],
  [0.13, [71, 44, 122]],
  [0.25, [59, 81, 139]],
  [0.38, [44, 113, 142]],
  [0.5, [33, 144, 141]],
  [0.63, [39, 173, 129]],
  [0.75, [92, 200, 99]],
  [0.88, [170, 220, 50]],
  [1.0, [253, 231, 37]],
];

export function viridis(t: number): Color {
  if (!Number.isFinite(t)) t = 0;
  t = Math.min(1, Math.max(0, t));
  for (let i = 1; i < VIRIDIS.length; i++) {
    const [t1, c1] = VIRIDIS[i];
    if (t <= t1) {
      const [t0, c0] = VIRIDIS[i - 1];
      const f = t1 === t0 ? 0 : (t - t0) / (t1 - t0);
      return [
        Math.round(c0[0] + f * (c1[0] - c0[0])),
        Math.round(c0[1] + f * (c1[1] - c0[1])),
        Math.round(c0[2] + f * (c1[2] - c0[2])),
      ];
    }
  }
  return VIRIDIS[VIRIDIS.length - 1][1];
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 0.01 && magnitude < 10000) {
    return String(Number(value.toPrecision(4)));
  }
  return value.toExponential(2).replace("e", "E");
}
