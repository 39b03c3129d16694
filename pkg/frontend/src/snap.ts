/**
 * Magnetic snapping: vertex-to-vertex, vertex-to-grid, and edge-to-edge.
 *
 * Point snaps are considered first.  The best vertex pairing wins over
 * the best grid pairing unless the grid point is strictly nearer;
 * vertices take priority at equal distance.  Edge alignment only
 * engages when no point snap is in range, and only for edges parallel
 * within 2°.  Everything returns a rigid translation delta, so applying
 * a hint never rotates the piece.
 */

import { labelRank, LABELS, type PieceKind } from "./pieces.js";
import { dot, cross, dist, norm, sub, type Vec2 } from "./geometry.js";
import { worldVertices, type Sprite } from "./board.js";

export const GRID_PITCH = 0.5;
export const EDGE_PARALLEL_DEG = 2.0;

export type SnapPairing =
  | { readonly mode: "vertex"; readonly movingVertex: number; readonly otherKind: PieceKind; readonly otherVertex: number }
  | { readonly mode: "grid"; readonly movingVertex: number; readonly point: Vec2 }
  | { readonly mode: "edge"; readonly movingEdge: number; readonly otherKind: PieceKind; readonly otherEdge: number };

export interface SnapHint {
  readonly pairing: SnapPairing;
  /** Distance the snap closes; always ≤ the search radius. */
  readonly residual: number;
  /** Translation that lands the moving piece. */
  readonly delta: Vec2;
}

export function describePairing(p: SnapPairing): string {
  if (p.mode === "vertex") return `v${p.movingVertex} -> ${LABELS[p.otherKind]} v${p.otherVertex}`;
  if (p.mode === "grid") return `v${p.movingVertex} -> grid (${p.point[0]}, ${p.point[1]})`;
  return `e${p.movingEdge} -> ${LABELS[p.otherKind]} e${p.otherEdge}`;
}

interface Candidate {
  hint: SnapHint;
  rank: number; // tie-break: labelRank of the partner, -1 for grid
  index: number; // tie-break: partner vertex/edge index
}

function better(a: Candidate, b: Candidate | null): boolean {
  if (b === null) return true;
  if (a.hint.residual !== b.hint.residual) return a.hint.residual < b.hint.residual;
  if (a.rank !== b.rank) return a.rank < b.rank;
  return a.index < b.index;
}

function nearestGridPoint(p: Vec2, pitch: number): Vec2 {
  return [Math.round(p[0] / pitch) * pitch, Math.round(p[1] / pitch) * pitch];
}

/**
 * Best snap for `moving` against `others` and the coordinate grid, or
 * null when nothing lies within `radius`.
 */
export function magneticSnap(
  moving: Sprite,
  others: ReadonlyArray<Sprite>,
  radius: number,
  gridPitch: number = GRID_PITCH,
): SnapHint | null {
  if (!(radius > 0)) throw new Error("snap radius must be positive");
  const ring = worldVertices(moving);

  let bestVertex: Candidate | null = null;
  for (const other of others) {
    if (other.kind === moving.kind) continue;
    const target = worldVertices(other);
    for (let i = 0; i < ring.length; i++) {
      for (let j = 0; j < target.length; j++) {
        const residual = dist(ring[i]!, target[j]!);
        if (residual > radius) continue;
        const cand: Candidate = {
          hint: {
            pairing: { mode: "vertex", movingVertex: i, otherKind: other.kind, otherVertex: j },
            residual,
            delta: sub(target[j]!, ring[i]!),
          },
          rank: labelRank(other.kind),
          index: j,
        };
        if (better(cand, bestVertex)) bestVertex = cand;
      }
    }
  }

  let bestGrid: Candidate | null = null;
  for (let i = 0; i < ring.length; i++) {
    const point = nearestGridPoint(ring[i]!, gridPitch);
    const residual = dist(ring[i]!, point);
    if (residual > radius) continue;
    const cand: Candidate = {
      hint: {
        pairing: { mode: "grid", movingVertex: i, point },
        residual,
        delta: sub(point, ring[i]!),
      },
      rank: -1,
      index: i,
    };
    if (better(cand, bestGrid)) bestGrid = cand;
  }

  if (bestVertex !== null || bestGrid !== null) {
    if (bestVertex === null) return bestGrid!.hint;
    if (bestGrid === null) return bestVertex.hint;
    // Vertex keeps priority on exact ties; grid must be strictly nearer.
    return bestGrid.hint.residual < bestVertex.hint.residual ? bestGrid.hint : bestVertex.hint;
  }

  return edgeSnap(moving, ring, others, radius);
}

const SIN_PARALLEL = Math.sin((EDGE_PARALLEL_DEG * Math.PI) / 180);

function edgeSnap(
  moving: Sprite,
  ring: ReadonlyArray<Vec2>,
  others: ReadonlyArray<Sprite>,
  radius: number,
): SnapHint | null {
  let best: Candidate | null = null;
  for (const other of others) {
    if (other.kind === moving.kind) continue;
    const target = worldVertices(other);
    for (let i = 0; i < ring.length; i++) {
      const a = ring[i]!;
      const b = ring[(i + 1) % ring.length]!;
      const d1 = sub(b, a);
      const l1 = norm(d1);
      for (let j = 0; j < target.length; j++) {
        const c = target[j]!;
        const e = target[(j + 1) % target.length]!;
        const d2 = sub(e, c);
        const l2 = norm(d2);
        // Parallel within tolerance, in either direction.
        if (Math.abs(cross(d1, d2)) > SIN_PARALLEL * l1 * l2) continue;
        const n: Vec2 = [-d2[1] / l2, d2[0] / l2];
        const mid: Vec2 = [(a[0] + b[0]) / 2, (a[1] + b[1]) / 2];
        const offset = dot(sub(mid, c), n);
        if (Math.abs(offset) > radius) continue;
        // The segments must actually face each other along the line.
        const axis: Vec2 = [d2[0] / l2, d2[1] / l2];
        const s1 = dot(sub(a, c), axis);
        const s2 = dot(sub(b, c), axis);
        const lo = Math.min(s1, s2);
        const hi = Math.max(s1, s2);
        if (Math.min(hi, l2) - Math.max(lo, 0) <= 1e-9) continue;
        const cand: Candidate = {
          hint: {
            pairing: { mode: "edge", movingEdge: i, otherKind: other.kind, otherEdge: j },
            residual: Math.abs(offset),
            delta: [-offset * n[0], -offset * n[1]],
          },
          rank: labelRank(other.kind),
          index: j,
        };
        if (better(cand, best)) best = cand;
      }
    }
  }
  return best === null ? null : best.hint;
}
