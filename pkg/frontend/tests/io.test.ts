import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { KIND_ORDER, type PieceKind } from "../src/pieces.js";
import { dist, type Vec2 } from "../src/geometry.js";
import { BoardStore, createBoard, makeBoard, worldVertices, type Sprite } from "../src/board.js";
import { exportRawLine, importRaw, importTce, importText, poseFromRing, ImportError } from "../src/io.js";

const FIXTURES = fileURLToPath(new URL("./fixtures/", import.meta.url));

/** The 4x2 rectangle assembly on integer coordinates. */
const RECT_RINGS: Record<PieceKind, Vec2[]> = {
  large_triangle_1: [[2, 0], [4, 0], [4, 2]],
  large_triangle_2: [[2, 0], [4, 2], [2, 2]],
  medium_triangle: [[0, 0], [2, 0], [1, 1]],
  small_triangle_1: [[0, 0], [1, 1], [0, 1]],
  small_triangle_2: [[2, 1], [2, 2], [1, 2]],
  square: [[0, 1], [1, 1], [1, 2], [0, 2]],
  parallelogram: [[1, 1], [2, 0], [2, 1], [1, 2]],
};

function boardFromRings(rings: Record<PieceKind, Vec2[]>) {
  const sprites = KIND_ORDER.map<Sprite>((kind) => {
    const pose = poseFromRing(kind, rings[kind]);
    return { kind, position: pose.position, rotation: pose.rotation, flipped: pose.flipped };
  });
  return makeBoard(sprites);
}

function ringsMatch(a: ReadonlyArray<Vec2>, b: ReadonlyArray<Vec2>, tol = 1e-9): boolean {
  if (a.length !== b.length) return false;
  for (let shift = 0; shift < a.length; shift++) {
    let ok = true;
    for (let i = 0; i < a.length && ok; i++) {
      ok = dist(a[i]!, b[(i + shift) % b.length]!) <= tol;
    }
    if (ok) return true;
  }
  return false;
}

describe("pose recovery", () => {
  it("reconstructs every ring of the rectangle assembly", () => {
    const board = boardFromRings(RECT_RINGS);
    for (const s of board.sprites) {
      expect(ringsMatch(worldVertices(s), RECT_RINGS[s.kind])).toBe(true);
    }
  });

  it("accepts a clockwise copy of a valid ring", () => {
    const cw = [...RECT_RINGS.square].reverse();
    const pose = poseFromRing("square", cw);
    const sprite: Sprite = { kind: "square", ...pose };
    expect(ringsMatch(worldVertices(sprite), RECT_RINGS.square)).toBe(true);
  });

  it("rejects a scaled ring", () => {
    const scaled = RECT_RINGS.square.map(([x, y]): Vec2 => [x * 1.1, y * 1.1]);
    expect(() => poseFromRing("square", scaled)).toThrow(ImportError);
  });
});

describe("export", () => {
  it("matches the shared raw-assembly fixture byte for byte", () => {
    const want = readFileSync(`${FIXTURES}raw_export.jsonl`, "utf8");
    const line = exportRawLine(boardFromRings(RECT_RINGS));
    expect(line + "\n").toBe(want);
  });

  it("includes the instance id only when given", () => {
    const board = boardFromRings(RECT_RINGS);
    expect(exportRawLine(board)).not.toContain("instance_id");
    const tagged = JSON.parse(exportRawLine(board, "tce-0000000000"));
    expect(tagged.instance_id).toBe("tce-0000000000");
  });
});

describe("round trip", () => {
  it("export then import preserves the board within float tolerance", () => {
    const sprites = KIND_ORDER.map<Sprite>((kind, i) => ({
      kind,
      position: [i * 2.7 - 4, (i % 3) * 1.9 - 1],
      rotation: (i * 3) % 8,
      flipped: kind === "parallelogram" || kind === "small_triangle_2",
    }));
    const board = makeBoard(sprites);
    const back = importRaw(exportRawLine(board), createBoard());
    for (const kind of KIND_ORDER) {
      const a = worldVertices(board.sprites.find((s) => s.kind === kind)!);
      const b = worldVertices(back.sprites.find((s) => s.kind === kind)!);
      expect(ringsMatch(a, b)).toBe(true);
    }
  });

  it("keeps the current underlay and snap radius on raw import", () => {
    const current = { ...createBoard(), underlay: [[0, 0], [1, 0], [0, 1]] as Vec2[], snapRadius: 0.25 };
    const back = importRaw(exportRawLine(boardFromRings(RECT_RINGS)), current);
    expect(back.underlay).toBe(current.underlay);
    expect(back.snapRadius).toBe(0.25);
  });
});

describe("instance document import", () => {
  const docText = readFileSync(`${FIXTURES}tce_rect.json`, "utf8");

  it("renders the final state and hangs the outline as underlay", () => {
    const board = importTce(docText, createBoard());
    for (const s of board.sprites) {
      expect(ringsMatch(worldVertices(s), RECT_RINGS[s.kind])).toBe(true);
    }
    expect(board.underlay).not.toBeNull();
    expect(board.underlay!.length).toBeGreaterThanOrEqual(4);
    for (const [x, y] of board.underlay!) {
      expect(Number.isFinite(x)).toBe(true);
      expect(Number.isFinite(y)).toBe(true);
    }
  });

  it("is picked up by the format sniffer", () => {
    const viaSniffer = importText(docText, createBoard());
    expect(viaSniffer.underlay).not.toBeNull();
    const viaRaw = importText(exportRawLine(boardFromRings(RECT_RINGS)), createBoard());
    expect(viaRaw.underlay).toBeNull();
  });
});

describe("malformed imports", () => {
  const cases: Array<[string, string]> = [
    ["not json", "{nope"],
    ["not an object", "[1, 2]"],
    ["missing pieces", "{}"],
    ["six pieces", JSON.stringify({ pieces: KIND_ORDER.slice(0, 6).map((k) => ({ type: k, vertices: RECT_RINGS[k] })) })],
    ["unknown kind", JSON.stringify({ pieces: [{ type: "octagon", vertices: [[0, 0], [1, 0], [0, 1]] }] })],
    [
      "duplicate kind",
      JSON.stringify({
        pieces: [...KIND_ORDER.slice(0, 6), "square"].map((k) => ({ type: k, vertices: RECT_RINGS[k as PieceKind] })),
      }),
    ],
    ["short ring", JSON.stringify({ pieces: [{ type: "square", vertices: [[0, 0], [1, 0]] }] })],
    ["string coordinate in raw", JSON.stringify({ pieces: [{ type: "square", vertices: [["0", 0], [1, 0], [0, 1], [1, 1]] }] })],
    [
      "ring off the rigid lattice",
      JSON.stringify({
        pieces: KIND_ORDER.map((k) => ({
          type: k,
          vertices: RECT_RINGS[k].map(([x, y]) => [x * 1.01, y]),
        })),
      }),
    ],
  ];

  it.each(cases)("raises a user-visible error for %s and leaves the board untouched", (_name, text) => {
    const store = new BoardStore(createBoard());
    const before = store.state;
    expect(() => store.replace(importText(text, store.state))).toThrow(ImportError);
    expect(store.state).toBe(before);
    expect(store.undoDepth).toBe(0);
  });

  it("rejects a document whose final_state is unusable", () => {
    expect(() => importTce(JSON.stringify({ final_state: "soon" }), createBoard())).toThrow(ImportError);
    expect(() =>
      importTce(JSON.stringify({ final_state: [{ type: "square", vertices: [["\\sqrt{3}", "0"], ["1", "0"], ["0", "1"]] }] }), createBoard()),
    ).toThrow(ImportError);
  });
});
