import { describe, expect, it } from "vitest";
import { createBoard, makeBoard, type BoardState } from "../src/board.js";
import { KIND_ORDER } from "../src/pieces.js";
import { LiveValidator, localOverlapPairs, OVERLAP_AREA_TOL } from "../src/validate.js";

/** Board with the two small triangles stacked, everything else apart. */
function overlappedBoard(): BoardState {
  const sprites = createBoard().sprites.map((s) =>
    s.kind === "small_triangle_2"
      ? { ...s, position: createBoard().sprites.find((x) => x.kind === "small_triangle_1")!.position }
      : s,
  );
  return makeBoard(sprites);
}

type Responder = (path: string, body: unknown) => Promise<unknown>;

function fakeFetch(respond: Responder): typeof fetch {
  return (async (url: RequestInfo | URL, init?: RequestInit) => {
    const path = String(url).replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    const payload = await respond(path, body);
    return { json: async () => payload } as Response;
  }) as typeof fetch;
}

function okSnap(body: unknown): unknown {
  const count = (body as { vertices: unknown[] }).vertices.length;
  return {
    ok: true,
    data: {
      vertices: Array.from({ length: count }, () => ({ ok: true, exact: ["0", "0"], residual: [0, 0] })),
    },
  };
}

describe("local overlap scan", () => {
  it("finds nothing on the staging layout", () => {
    expect(localOverlapPairs(createBoard())).toEqual([]);
  });

  it("reports the stacked pair by label", () => {
    expect(localOverlapPairs(overlappedBoard())).toEqual([["ST1", "ST2"]]);
  });

  it("ignores mere edge contact", () => {
    const board = createBoard();
    const st1 = board.sprites.find((s) => s.kind === "small_triangle_1")!;
    const sprites = board.sprites.map((s) =>
      s.kind === "small_triangle_2"
        ? { ...s, rotation: 4, position: [st1.position[0] + 1, st1.position[1] + 1] as const }
        : s,
    );
    // Hypotenuse-to-hypotenuse contact: shared boundary, zero area.
    const touching = makeBoard(sprites);
    expect(localOverlapPairs(touching)).toEqual([]);
    expect(OVERLAP_AREA_TOL).toBeGreaterThan(0);
  });
});

describe("live validation", () => {
  it("reports pass when the verifier accepts", async () => {
    const v = new LiveValidator(
      "http://service",
      fakeFetch(async (path, body) => {
        if (path === "/snap") return okSnap(body);
        if (path === "/normalize") return { ok: true, data: { instance_id: "tce-x", final_state: [] } };
        if (path === "/validate") return { ok: true, data: { success: true, vpr_pass: true, pe_issue: null } };
        throw new Error(`unexpected ${path}`);
      }),
    );
    const view = await v.validate(createBoard());
    expect(view).not.toBeNull();
    expect(view!.status).toBe("pass");
    expect(view!.record).not.toBeNull();
    expect(view!.overlapPairs).toEqual([]);
  });

  it("reports fail with the service message when normalize rejects", async () => {
    const v = new LiveValidator(
      "http://service",
      fakeFetch(async (path, body) => {
        if (path === "/snap") return okSnap(body);
        if (path === "/normalize")
          return { ok: false, error: { code: "verify-failed", message: "assembly rejected (overlapping)" } };
        throw new Error(`unexpected ${path}`);
      }),
    );
    const view = await v.validate(overlappedBoard());
    expect(view!.status).toBe("fail");
    expect(view!.message).toContain("overlapping");
    // The client-side scan still paints the pair red.
    expect(view!.overlapPairs).toEqual([["ST1", "ST2"]]);
  });

  it("prefers the verifier's overlap pairs once it reports them", async () => {
    const v = new LiveValidator(
      "http://service",
      fakeFetch(async (path, body) => {
        if (path === "/snap") return okSnap(body);
        if (path === "/normalize") return { ok: true, data: {} };
        if (path === "/validate")
          return {
            ok: true,
            data: { success: false, pe_issue: { overlap_pairs: [["LT1", "SQ"]], component_count: 1 } },
          };
        throw new Error(`unexpected ${path}`);
      }),
    );
    const view = await v.validate(createBoard());
    expect(view!.status).toBe("fail");
    expect(view!.overlapPairs).toEqual([["LT1", "SQ"]]);
  });

  it("flags unsnappable and residual-bearing vertices", async () => {
    const v = new LiveValidator(
      "http://service",
      fakeFetch(async (path, body) => {
        if (path === "/snap") {
          const base = okSnap(body) as { data: { vertices: unknown[] } };
          base.data.vertices[0] = { ok: false, index: 0, message: "no lattice value within tolerance" };
          base.data.vertices[1] = { ok: true, exact: ["0", "0"], residual: [0.002, 0] };
          return base;
        }
        if (path === "/normalize") return { ok: false, error: { code: "snap-failed", message: "unsnappable" } };
        throw new Error(`unexpected ${path}`);
      }),
    );
    const view = await v.validate(createBoard());
    expect(view!.status).toBe("fail");
    expect(view!.flaggedVertices[0]).toEqual({ label: "LT1", vertex: 0, reason: "unsnappable" });
    expect(view!.flaggedVertices[1]).toEqual({ label: "LT1", vertex: 1, reason: "residual" });
  });

  it("degrades when the service is unreachable and keeps local overlaps", async () => {
    const v = new LiveValidator(
      "http://service",
      fakeFetch(async () => {
        throw new TypeError("fetch failed");
      }),
    );
    const view = await v.validate(overlappedBoard());
    expect(view!.status).toBe("degraded");
    expect(view!.message).toMatch(/editing continues/);
    expect(view!.overlapPairs).toEqual([["ST1", "ST2"]]);
    expect(view!.record).toBeNull();
  });

  it("discards stale responses: only the latest pass renders", async () => {
    const gates: Array<() => void> = [];
    const v = new LiveValidator(
      "http://service",
      fakeFetch(async (path, body) => {
        if (path === "/snap") {
          // Hold each pass at its first service call until released.
          await new Promise<void>((resolve) => gates.push(resolve));
          return okSnap(body);
        }
        if (path === "/normalize") return { ok: true, data: {} };
        if (path === "/validate") return { ok: true, data: { success: true, pe_issue: null } };
        throw new Error(`unexpected ${path}`);
      }),
    );
    const first = v.validate(createBoard());
    const second = v.validate(createBoard());
    // Wait for both passes to reach their gates, then let the newer
    // one finish first and release the stale one afterwards.
    while (gates.length < 2) await new Promise((r) => setTimeout(r, 1));
    gates[1]!();
    const secondView = await second;
    gates[0]!();
    const firstView = await first;
    expect(secondView).not.toBeNull();
    expect(secondView!.status).toBe("pass");
    expect(firstView).toBeNull();
  });

  it("covers every piece label in the flat vertex map", async () => {
    let seen = 0;
    const v = new LiveValidator(
      "http://service",
      fakeFetch(async (path, body) => {
        if (path === "/snap") {
          seen = (body as { vertices: unknown[] }).vertices.length;
          return okSnap(body);
        }
        if (path === "/normalize") return { ok: true, data: {} };
        if (path === "/validate") return { ok: true, data: { success: true, pe_issue: null } };
        throw new Error(`unexpected ${path}`);
      }),
    );
    await v.validate(createBoard());
    // 5 triangles x 3 + square x 4 + parallelogram x 4 vertices.
    expect(seen).toBe(23);
    expect(KIND_ORDER.length).toBe(7);
  });
});
