/**
 * Board model: seven piece sprites plus selection, underlay, and
 * snapshot-based undo/redo.
 *
 * State objects are immutable; every edit builds a fresh BoardState.
 * The store keeps whole-state snapshots, which makes undo/redo exact
 * inverses by construction.
 */

import { CANONICAL, KIND_ORDER, LABELS, type PieceKind } from "./pieces.js";
import { transformRing, type Vec2 } from "./geometry.js";

export interface Sprite {
  readonly kind: PieceKind;
  readonly position: Vec2;
  /** Rotation in 45° steps, always an integer in 0..7. */
  readonly rotation: number;
  readonly flipped: boolean;
}

export interface BoardState {
  /** Exactly seven sprites, one per kind, in KIND_ORDER. */
  readonly sprites: ReadonlyArray<Sprite>;
  readonly selection: PieceKind | null;
  /** Optional target silhouette drawn beneath the pieces. */
  readonly underlay: ReadonlyArray<Vec2> | null;
  readonly snapRadius: number;
}

export const DEFAULT_SNAP_RADIUS = 0.15;
export const NUDGE_STEP = 0.05;

export function spriteLabel(s: Sprite): string {
  return LABELS[s.kind];
}

export function worldVertices(s: Sprite): Vec2[] {
  return transformRing(CANONICAL[s.kind], s.rotation, s.flipped, s.position);
}

function checkState(state: BoardState): BoardState {
  const kinds = state.sprites.map((s) => s.kind);
  if (kinds.length !== 7 || new Set(kinds).size !== 7) {
    throw new Error("board must hold exactly seven sprites, one per kind");
  }
  for (const s of state.sprites) {
    if (!Number.isInteger(s.rotation) || s.rotation < 0 || s.rotation > 7) {
      throw new Error(`rotation of ${spriteLabel(s)} must be a 45° step in 0..7`);
    }
    if (!Number.isFinite(s.position[0]) || !Number.isFinite(s.position[1])) {
      throw new Error(`position of ${spriteLabel(s)} must be finite`);
    }
  }
  return state;
}

/** Fresh board with the pieces parked in a staging row below the origin. */
export function createBoard(): BoardState {
  const sprites = KIND_ORDER.map<Sprite>((kind, i) => ({
    kind,
    position: [i * 3.0, -4.0],
    rotation: 0,
    flipped: false,
  }));
  return checkState({ sprites, selection: null, underlay: null, snapRadius: DEFAULT_SNAP_RADIUS });
}

export function makeBoard(
  sprites: ReadonlyArray<Sprite>,
  underlay: ReadonlyArray<Vec2> | null = null,
  snapRadius: number = DEFAULT_SNAP_RADIUS,
): BoardState {
  const ordered = [...sprites].sort((a, b) => KIND_ORDER.indexOf(a.kind) - KIND_ORDER.indexOf(b.kind));
  return checkState({ sprites: ordered, selection: null, underlay, snapRadius });
}

export function getSprite(state: BoardState, kind: PieceKind): Sprite {
  const s = state.sprites.find((x) => x.kind === kind);
  if (!s) throw new Error(`no sprite ${kind}`);
  return s;
}

function withSprite(state: BoardState, kind: PieceKind, patch: Partial<Sprite>): BoardState {
  const sprites = state.sprites.map((s) => (s.kind === kind ? { ...s, ...patch } : s));
  return checkState({ ...state, sprites });
}

/**
 * Undo/redo store over immutable board snapshots.
 *
 * Edits record the prior state on the undo stack and clear the redo
 * stack.  A drag gesture records once at `beginGesture`; the mousemove
 * stream then updates the present state without recording, so one
 * ctrl-Z undoes the whole drag.
 */
export class BoardStore {
  private undoStack: BoardState[] = [];
  private redoStack: BoardState[] = [];
  state: BoardState;

  constructor(initial: BoardState = createBoard()) {
    this.state = checkState(initial);
  }

  private commit(next: BoardState, record: boolean): void {
    if (record) {
      this.undoStack.push(this.state);
      this.redoStack.length = 0;
    }
    this.state = next;
  }

  /** Selection is a view concern and never participates in history. */
  select(kind: PieceKind | null): void {
    this.state = { ...this.state, selection: kind };
  }

  setSnapRadius(radius: number): void {
    if (!(radius > 0)) throw new Error("snap radius must be positive");
    this.state = { ...this.state, snapRadius: radius };
  }

  setUnderlay(ring: ReadonlyArray<Vec2> | null): void {
    this.commit({ ...this.state, underlay: ring }, true);
  }

  /** Record one undo entry for the drag gesture that follows. */
  beginGesture(): void {
    this.undoStack.push(this.state);
    this.redoStack.length = 0;
  }

  dragTo(kind: PieceKind, position: Vec2, record = true): void {
    this.commit(withSprite(this.state, kind, { position }), record);
  }

  dragBy(kind: PieceKind, delta: Vec2, record = true): void {
    const s = getSprite(this.state, kind);
    this.dragTo(kind, [s.position[0] + delta[0], s.position[1] + delta[1]], record);
  }

  rotate(kind: PieceKind, steps = 1): void {
    const s = getSprite(this.state, kind);
    const rotation = (((s.rotation + steps) % 8) + 8) % 8;
    this.commit(withSprite(this.state, kind, { rotation }), true);
  }

  flip(kind: PieceKind): void {
    const s = getSprite(this.state, kind);
    this.commit(withSprite(this.state, kind, { flipped: !s.flipped }), true);
  }

  nudge(kind: PieceKind, dx: number, dy: number): void {
    this.dragBy(kind, [dx * NUDGE_STEP, dy * NUDGE_STEP], true);
  }

  /** Replace the whole board, e.g. after an import.  Undoable. */
  replace(next: BoardState): void {
    this.commit(checkState(next), true);
  }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (prev === undefined) return false;
    this.redoStack.push(this.state);
    this.state = prev;
    return true;
  }

  redo(): boolean {
    const next = this.redoStack.pop();
    if (next === undefined) return false;
    this.undoStack.push(this.state);
    this.state = next;
    return true;
  }

  get undoDepth(): number {
    return this.undoStack.length;
  }

  get redoDepth(): number {
    return this.redoStack.length;
  }
}
