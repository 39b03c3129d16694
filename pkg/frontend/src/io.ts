/**
 * Import and export between the board and the two wire formats.
 *
 * Export writes the raw-assembly jsonl the pipeline ingests: one JSON
 * object per line with a `pieces` list of {type, vertices} float rings
 * and an optional `instance_id`.  Import accepts either such a raw
 * object or a full instance document (whose `final_state` carries
 * LaTeX-encoded exact coordinates) and reconstructs sprite poses by
 * matching each ring against the sixteen rigid placements of its
 * canonical piece.
 */

import { CANONICAL, KIND_ORDER, type PieceKind } from "./pieces.js";
import { dist, signedArea2, transformRing, type Vec2 } from "./geometry.js";
import { parseScalar } from "./latex.js";
import { makeBoard, worldVertices, type BoardState, type Sprite } from "./board.js";

/** Raised for any unusable import; the caller leaves the board alone. */
export class ImportError extends Error {}

const POSE_TOL = 1e-9;

export interface Pose {
  readonly rotation: number;
  readonly flipped: boolean;
  readonly position: Vec2;
}

/**
 * Recover (rotation, flipped, position) placing the canonical piece on
 * `ring`, trying all 8 rotations × 2 reflections × cyclic starts.  For
 * symmetric pieces the first matching variant wins, which is harmless:
 * any match reproduces the same world geometry.
 */
export function poseFromRing(kind: PieceKind, ringIn: ReadonlyArray<Vec2>): Pose {
  let ring = ringIn;
  if (signedArea2(ring) < 0) ring = [...ring].reverse();
  const n = ring.length;
  for (const flipped of [false, true]) {
    for (let rotation = 0; rotation < 8; rotation++) {
      const variant = transformRing(CANONICAL[kind], rotation, flipped, [0, 0]);
      if (variant.length !== n) continue;
      for (let shift = 0; shift < n; shift++) {
        const base = variant[shift]!;
        const t: Vec2 = [ring[0]![0] - base[0], ring[0]![1] - base[1]];
        let ok = true;
        for (let i = 0; i < n && ok; i++) {
          const v = variant[(shift + i) % n]!;
          ok = dist(ring[i]!, [v[0] + t[0], v[1] + t[1]]) <= POSE_TOL;
        }
        if (ok) return { rotation, flipped, position: t };
      }
    }
  }
  throw new ImportError(`ring for ${kind} does not match any rigid placement of the piece`);
}

export function exportRawLine(state: BoardState, instanceId?: string): string {
  const doc: { pieces: { type: PieceKind; vertices: number[][] }[]; instance_id?: string } = {
    pieces: state.sprites.map((s) => ({
      type: s.kind,
      vertices: worldVertices(s).map((v) => [v[0], v[1]]),
    })),
  };
  if (instanceId !== undefined) doc.instance_id = instanceId;
  return JSON.stringify(doc);
}

function ringFromJson(raw: unknown, label: string, scalars: (v: unknown) => number): Vec2[] {
  if (!Array.isArray(raw) || raw.length < 3) {
    throw new ImportError(`${label}: vertices must be a list of at least 3 points`);
  }
  return raw.map((pair, i) => {
    if (!Array.isArray(pair) || pair.length !== 2) {
      throw new ImportError(`${label}: vertex ${i} is not a pair`);
    }
    let x: number;
    let y: number;
    try {
      x = scalars(pair[0]);
      y = scalars(pair[1]);
    } catch (err) {
      throw new ImportError(`${label}: vertex ${i}: ${(err as Error).message}`);
    }
    if (!Number.isFinite(x) || !Number.isFinite(y)) {
      throw new ImportError(`${label}: vertex ${i} is not finite`);
    }
    return [x, y];
  });
}

function floatScalar(v: unknown): number {
  if (typeof v !== "number" || !Number.isFinite(v)) throw new Error("expected a finite number");
  return v;
}

function spritesFromPieces(
  pieces: unknown,
  scalars: (v: unknown) => number,
): Sprite[] {
  if (!Array.isArray(pieces)) throw new ImportError("pieces must be a list");
  const byKind = new Map<PieceKind, Sprite>();
  for (const entry of pieces) {
    if (typeof entry !== "object" || entry === null) throw new ImportError("piece entry is not an object");
    const rec = entry as Record<string, unknown>;
    const kind = rec.type as PieceKind;
    if (!KIND_ORDER.includes(kind)) throw new ImportError(`unknown piece type: ${String(rec.type)}`);
    if (byKind.has(kind)) throw new ImportError(`duplicate piece: ${kind}`);
    const ring = ringFromJson(rec.vertices, kind, scalars);
    const pose = poseFromRing(kind, ring);
    byKind.set(kind, { kind, position: pose.position, rotation: pose.rotation, flipped: pose.flipped });
  }
  if (byKind.size !== 7) throw new ImportError(`expected 7 pieces, got ${byKind.size}`);
  return KIND_ORDER.map((k) => byKind.get(k)!);
}

/** Import a raw-assembly line.  Keeps the current underlay and radius. */
export function importRaw(text: string, current: BoardState): BoardState {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new ImportError(`not valid JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null) throw new ImportError("raw assembly must be a JSON object");
  const sprites = spritesFromPieces((doc as Record<string, unknown>).pieces, floatScalar);
  return makeBoard(sprites, current.underlay, current.snapRadius);
}

/** Import an instance document: final state as sprites, outline as underlay. */
export function importTce(text: string, current: BoardState): BoardState {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new ImportError(`not valid JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null) throw new ImportError("document must be a JSON object");
  const rec = doc as Record<string, unknown>;
  const final = rec.final_state;
  if (!Array.isArray(final)) throw new ImportError("document has no final_state");
  const sprites = spritesFromPieces(final, parseScalar);
  let underlay: Vec2[] | null = null;
  const outline = rec.target_outline;
  if (typeof outline === "object" && outline !== null) {
    const overts = (outline as Record<string, unknown>).vertices;
    if (overts !== undefined) underlay = ringFromJson(overts, "target_outline", parseScalar);
  }
  return makeBoard(sprites, underlay, current.snapRadius);
}

/** Sniff the format and import; raw lines and instance documents both work. */
export function importText(text: string, current: BoardState): BoardState {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new ImportError(`not valid JSON: ${(err as Error).message}`);
  }
  if (typeof doc === "object" && doc !== null && "final_state" in doc) {
    return importTce(text, current);
  }
  return importRaw(text, current);
}
