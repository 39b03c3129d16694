/**
 * Live validation against the geometry service.
 *
 * Each pass exports the board as a raw assembly, asks /snap about every
 * vertex, then /normalize + /validate for the verifier's verdict.  The
 * service owns exact truth; the studio only repeats the cheap float
 * overlap check locally so overlapping pairs still light up while the
 * service is unreachable (the degraded banner) or rejecting.
 *
 * Calls are asynchronous with stale-response discarding: a pass whose
 * ticket is no longer the latest resolves to null and must not render.
 */

import { LABELS } from "./pieces.js";
import { convexOverlapArea, type Vec2 } from "./geometry.js";
import { worldVertices, type BoardState } from "./board.js";
import { exportRawLine } from "./io.js";

/** Mirrors the verifier's overlap tolerance (area units). */
export const OVERLAP_AREA_TOL = 1e-6;

export interface FlaggedVertex {
  readonly label: string;
  readonly vertex: number;
  readonly reason: "unsnappable" | "residual";
}

export interface ValidationView {
  readonly status: "pass" | "fail" | "degraded";
  readonly message: string;
  /** Piece label pairs the overlap highlight paints red. */
  readonly overlapPairs: ReadonlyArray<readonly [string, string]>;
  readonly flaggedVertices: ReadonlyArray<FlaggedVertex>;
  /** Verifier record when /validate answered, else null. */
  readonly record: Record<string, unknown> | null;
}

/** Float-only overlap scan; pairs with intersection area above tol. */
export function localOverlapPairs(state: BoardState): Array<readonly [string, string]> {
  const rings = state.sprites.map((s) => worldVertices(s));
  const pairs: Array<readonly [string, string]> = [];
  for (let i = 0; i < rings.length; i++) {
    for (let j = i + 1; j < rings.length; j++) {
      if (convexOverlapArea(rings[i]!, rings[j]!) > OVERLAP_AREA_TOL) {
        pairs.push([LABELS[state.sprites[i]!.kind], LABELS[state.sprites[j]!.kind]]);
      }
    }
  }
  return pairs;
}

interface Envelope {
  ok: boolean;
  data?: unknown;
  error?: { code?: string; message?: string; detail?: unknown };
}

/** Vertex residuals worth flagging in the UI (way below snap tol). */
const RESIDUAL_FLAG = 1e-9;

export class LiveValidator {
  private seq = 0;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async post(path: string, body: unknown): Promise<Envelope> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await res.json()) as Envelope;
  }

  /**
   * Run one validation pass.  Resolves to null when a newer pass was
   * started meanwhile; only non-null results may render.
   */
  async validate(state: BoardState): Promise<ValidationView | null> {
    const ticket = ++this.seq;
    const overlapPairs = localOverlapPairs(state);
    let view: ValidationView;
    try {
      view = await this.remotePass(state, overlapPairs);
    } catch {
      view = {
        status: "degraded",
        message: "service unreachable; editing continues, validation is paused",
        overlapPairs,
        flaggedVertices: [],
        record: null,
      };
    }
    return ticket === this.seq ? view : null;
  }

  private async remotePass(
    state: BoardState,
    overlapPairs: ReadonlyArray<readonly [string, string]>,
  ): Promise<ValidationView> {
    const flat: Vec2[] = [];
    const owner: Array<{ label: string; vertex: number }> = [];
    for (const s of state.sprites) {
      const ring = worldVertices(s);
      ring.forEach((v, i) => {
        flat.push(v);
        owner.push({ label: LABELS[s.kind], vertex: i });
      });
    }

    const flagged: FlaggedVertex[] = [];
    const snapped = await this.post("/snap", { vertices: flat.map((v) => [v[0], v[1]]) });
    if (snapped.ok && typeof snapped.data === "object" && snapped.data !== null) {
      const entries = (snapped.data as { vertices?: unknown }).vertices;
      if (Array.isArray(entries)) {
        entries.forEach((entry, i) => {
          const at = owner[i];
          if (at === undefined || typeof entry !== "object" || entry === null) return;
          const e = entry as { ok?: boolean; residual?: [number, number] };
          if (e.ok === false) {
            flagged.push({ ...at, reason: "unsnappable" });
          } else if (e.residual && e.residual[0] + e.residual[1] > RESIDUAL_FLAG) {
            flagged.push({ ...at, reason: "residual" });
          }
        });
      }
    }

    const normalized = await this.post("/normalize", JSON.parse(exportRawLine(state)));
    if (!normalized.ok) {
      return {
        status: "fail",
        message: normalized.error?.message ?? "assembly rejected",
        overlapPairs,
        flaggedVertices: flagged,
        record: null,
      };
    }

    const verdict = await this.post("/validate", normalized.data);
    if (!verdict.ok) {
      return {
        status: "fail",
        message: verdict.error?.message ?? "verification failed",
        overlapPairs,
        flaggedVertices: flagged,
        record: null,
      };
    }
    const record = verdict.data as Record<string, unknown>;
    const success = record.success === true;
    // Prefer the verifier's overlap report once it has one.
    const issue = record.pe_issue as { overlap_pairs?: [string, string][] } | null | undefined;
    const pairs = issue?.overlap_pairs?.length ? issue.overlap_pairs : overlapPairs;
    return {
      status: success ? "pass" : "fail",
      message: success ? "assembly verified" : "verifier reports violations",
      overlapPairs: pairs,
      flaggedVertices: flagged,
      record,
    };
  }
}
