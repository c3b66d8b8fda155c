/** Stroke font on a 5x7 cell: each glyph is a list of polylines.
 * Lowercase input is rendered with the uppercase shapes.
 */

export type Stroke = Array<[number, number]>;

export const GLYPH_WIDTH = 5;
export const GLYPH_HEIGHT = 7;
export const GLYPH_ADVANCE = 6;

const G: Record<string, Stroke[]> = {
  " ": [],
  "0": [[[0, 0], [4, 0], [4, 6], [0, 6], [0, 0]], [[0, 6], [4, 0]]],
  "1": [[[1, 1], [2, 0], [2, 6]], [[1, 6], [3, 6]]],
  "2": [[[0, 1], [1, 0], [3, 0], [4, 1], [4, 2], [0, 6], [4, 6]]],
  "3": [[[0, 0], [4, 0], [2, 2], [4, 4], [4, 5], [3, 6], [1, 6], [0, 5]]],
  "4": [[[3, 6], [3, 0], [0, 4], [4, 4]]],
  "5": [[[4, 0], [0, 0], [0, 3], [3, 3], [4, 4], [4, 5], [3, 6], [0, 6]]],
  "6": [[[3, 0], [1, 0], [0, 2], [0, 5], [1, 6], [3, 6], [4, 5], [4, 4], [3, 3], [0, 3]]],
  "7": [[[0, 0], [4, 0], [1, 6]]],
  "8": [[[1, 0], [3, 0], [4, 1], [4, 5], [3, 6], [1, 6], [0, 5], [0, 1], [1, 0]], [[0, 3], [4, 3]]],
  "9": [[[4, 3], [1, 3], [0, 2], [0, 1], [1, 0], [3, 0], [4, 1], [4, 5], [3, 6], [1, 6]]],
  A: [[[0, 6], [2, 0], [4, 6]], [[1, 4], [3, 4]]],
  B: [[[0, 0], [0, 6], [3, 6], [4, 5], [4, 4], [3, 3], [0, 3]], [[0, 0], [3, 0], [4, 1], [4, 2], [3, 3]]],
  C: [[[4, 1], [3, 0], [1, 0], [0, 1], [0, 5], [1, 6], [3, 6], [4, 5]]],
  D: [[[0, 0], [0, 6], [2, 6], [4, 4], [4, 2], [2, 0], [0, 0]]],
  E: [[[4, 0], [0, 0], [0, 6], [4, 6]], [[0, 3], [3, 3]]],
  F: [[[4, 0], [0, 0], [0, 6]], [[0, 3], [3, 3]]],
  G: [[[4, 1], [3, 0], [1, 0], [0, 1], [0, 5], [1, 6], [3, 6], [4, 5], [4, 3], [2, 3]]],
  H: [[[0, 0], [0, 6]], [[4, 0], [4, 6]], [[0, 3], [4, 3]]],
  I: [[[1, 0], [3, 0]], [[2, 0], [2, 6]], [[1, 6], [3, 6]]],
  J: [[[3, 0], [3, 5], [2, 6], [1, 6], [0, 5]]],
  K: [[[0, 0], [0, 6]], [[4, 0], [0, 3], [4, 6]]],
  L: [[[0, 0], [0, 6], [4, 6]]],
  M: [[[0, 6], [0, 0], [2, 3], [4, 0], [4, 6]]],
  N: [[[0, 6], [0, 0], [4, 6], [4, 0]]],
  O: [[[1, 0], [3, 0], [4, 1], [4, 5], [3, 6], [1, 6], [0, 5], [0, 1], [1, 0]]],
  P: [[[0, 6], [0, 0], [3, 0], [4, 1], [4, 2], [3, 3], [0, 3]]],
  Q: [[[1, 0], [3, 0], [4, 1], [4, 5], [3, 6], [1, 6], [0, 5], [0, 1], [1, 0]], [[2, 4], [4, 6]]],
  R: [[[0, 6], [0, 0], [3, 0], [4, 1], [4, 2], [3, 3], [0, 3]], [[2, 3], [4, 6]]],
  S: [[[4, 1], [3, 0], [1, 0], [0, 1], [0, 2], [4, 4], [4, 5], [3, 6], [1, 6], [0, 5]]],
  T: [[[0, 0], [4, 0]], [[2, 0], [2, 6]]],
  U: [[[0, 0], [0, 5], [1, 6], [3, 6], [4, 5], [4, 0]]],
  V: [[[0, 0], [2, 6], [4, 0]]],
  W: [[[0, 0], [1, 6], [2, 3], [3, 6], [4, 0]]],
  X: [[[0, 0], [4, 6]], [[4, 0], [0, 6]]],
  Y: [[[0, 0], [2, 3], [4, 0]], [[2, 3], [2, 6]]],
  Z: [[[0, 0], [4, 0], [0, 6], [4, 6]]],
  ".": [[[2, 6], [2, 6]]],
  ",": [[[2, 5], [1, 6]]],
  "-": [[[1, 3], [3, 3]]],
  "+": [[[2, 1], [2, 5]], [[0, 3], [4, 3]]],
  _: [[[0, 6], [4, 6]]],
  "[": [[[3, 0], [1, 0], [1, 6], [3, 6]]],
  "]": [[[1, 0], [3, 0], [3, 6], [1, 6]]],
  "(": [[[3, 0], [2, 1], [2, 5], [3, 6]]],
  ")": [[[1, 0], [2, 1], [2, 5], [1, 6]]],
  "^": [[[1, 1], [2, 0], [3, 1]]],
  "/": [[[0, 6], [4, 0]]],
  ":": [[[2, 1], [2, 1]], [[2, 5], [2, 5]]],
  "=": [[[0, 2], [4, 2]], [[0, 4], [4, 4]]],
  "<": [[[3, 1], [1, 3], [3, 5]]],
  ">": [[[1, 1], [3, 3], [1, 5]]],
  "*": [[[2, 1], [2, 5]], [[0, 2], [4, 4]], [[4, 2], [0, 4]]],
  "%": [[[0, 6], [4, 0]], [[0, 0], [1, 0]], [[3, 6], [4, 6]]],
  "|": [[[2, 0], [2, 6]]],
};

export function glyphStrokes(ch: string): Stroke[] {
  const key = ch.length === 1 ? ch.toUpperCase() : ch;
  return G[key] ?? G["*"];
}
