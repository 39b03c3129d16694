/**
 * The seven pieces as float vertex rings in canonical pose.
 *
 * Rings are counterclockwise with the right-angle (or first) corner at
 * the origin, matching the service's /pieces inventory.  The studio
 * ships its own copy so the board renders before, and without, a live
 * service; the service still owns exact truth.
 */

export type PieceKind =
  | "large_triangle_1"
  | "large_triangle_2"
  | "medium_triangle"
  | "small_triangle_1"
  | "small_triangle_2"
  | "square"
  | "parallelogram";

export const KIND_ORDER: readonly PieceKind[] = [
  "large_triangle_1",
  "large_triangle_2",
  "medium_triangle",
  "small_triangle_1",
  "small_triangle_2",
  "square",
  "parallelogram",
];

/** Short display labels; these match the verifier's piece labels. */
export const LABELS: Readonly<Record<PieceKind, string>> = {
  large_triangle_1: "LT1",
  large_triangle_2: "LT2",
  medium_triangle: "MT",
  small_triangle_1: "ST1",
  small_triangle_2: "ST2",
  square: "SQ",
  parallelogram: "PG",
};

/** Rank of a piece label for deterministic tie-breaking (lower wins). */
export function labelRank(kind: PieceKind): number {
  return KIND_ORDER.indexOf(kind);
}

const RT2 = Math.SQRT2;

export const CANONICAL: Readonly<Record<PieceKind, ReadonlyArray<readonly [number, number]>>> = {
  large_triangle_1: [[0, 0], [2, 0], [0, 2]],
  large_triangle_2: [[0, 0], [2, 0], [0, 2]],
  medium_triangle: [[0, 0], [RT2, 0], [0, RT2]],
  small_triangle_1: [[0, 0], [1, 0], [0, 1]],
  small_triangle_2: [[0, 0], [1, 0], [0, 1]],
  square: [[0, 0], [1, 0], [1, 1], [0, 1]],
  parallelogram: [[0, 0], [RT2, 0], [(3 * RT2) / 2, RT2 / 2], [RT2 / 2, RT2 / 2]],
};

export const FILL_COLORS: Readonly<Record<PieceKind, string>> = {
  large_triangle_1: "#d9777b",
  large_triangle_2: "#e0a458",
  medium_triangle: "#7fb069",
  small_triangle_1: "#6aa5c8",
  small_triangle_2: "#9d8ec7",
  square: "#c98bb9",
  parallelogram: "#8fbcbb",
};
