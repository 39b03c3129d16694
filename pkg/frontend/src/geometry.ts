/**
 * Float vector and polygon helpers for display and snapping.
 *
 * Everything here is plain IEEE double math.  Exact arithmetic lives on
 * the service side; the studio never reimplements it.
 */

export type Vec2 = readonly [number, number];

export function add(a: Vec2, b: Vec2): Vec2 {
  return [a[0] + b[0], a[1] + b[1]];
}

export function sub(a: Vec2, b: Vec2): Vec2 {
  return [a[0] - b[0], a[1] - b[1]];
}

export function scale(a: Vec2, k: number): Vec2 {
  return [a[0] * k, a[1] * k];
}

export function dot(a: Vec2, b: Vec2): number {
  return a[0] * b[0] + a[1] * b[1];
}

export function cross(a: Vec2, b: Vec2): number {
  return a[0] * b[1] - a[1] * b[0];
}

export function norm(a: Vec2): number {
  return Math.hypot(a[0], a[1]);
}

export function dist(a: Vec2, b: Vec2): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}

/**
 * Rotation table for the eight 45° steps.
 *
 * A table instead of cos/sin keeps the axis-aligned steps exactly 0/±1,
 * so snapped assemblies serialize with crisp coordinates.
 */
const R = Math.SQRT1_2;
const ROT: ReadonlyArray<readonly [number, number]> = [
  [1, 0],
  [R, R],
  [0, 1],
  [-R, R],
  [-1, 0],
  [-R, -R],
  [0, -1],
  [R, -R],
];

/**
 * Place a canonical ring: optional mirror across the y axis, rotate by
 * `rotation` 45° steps, then translate.  The mirrored ring is reversed
 * so output stays counterclockwise.
 */
export function transformRing(
  ring: ReadonlyArray<Vec2>,
  rotation: number,
  flipped: boolean,
  position: Vec2,
): Vec2[] {
  const step = ((rotation % 8) + 8) % 8;
  const rot = ROT[step];
  if (rot === undefined) throw new Error(`bad rotation step ${rotation}`);
  const [c, s] = rot;
  const out: Vec2[] = ring.map(([x0, y0]) => {
    const x = flipped ? -x0 : x0;
    return [c * x - s * y0 + position[0], s * x + c * y0 + position[1]];
  });
  if (flipped) out.reverse();
  return out;
}

/** Twice the signed area; positive for counterclockwise rings. */
export function signedArea2(ring: ReadonlyArray<Vec2>): number {
  let acc = 0;
  for (let i = 0; i < ring.length; i++) {
    const a = ring[i]!;
    const b = ring[(i + 1) % ring.length]!;
    acc += cross(a, b);
  }
  return acc;
}

export function ringArea(ring: ReadonlyArray<Vec2>): number {
  return Math.abs(signedArea2(ring)) / 2;
}

export function centroid(ring: ReadonlyArray<Vec2>): Vec2 {
  let x = 0;
  let y = 0;
  for (const [px, py] of ring) {
    x += px;
    y += py;
  }
  return [x / ring.length, y / ring.length];
}

export function pointInRing(p: Vec2, ring: ReadonlyArray<Vec2>): boolean {
  let inside = false;
  for (let i = 0, j = ring.length - 1; i < ring.length; j = i++) {
    const [xi, yi] = ring[i]!;
    const [xj, yj] = ring[j]!;
    if (yi > p[1] !== yj > p[1] && p[0] < ((xj - xi) * (p[1] - yi)) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

/**
 * Area of intersection of two convex rings via Sutherland-Hodgman.
 *
 * All seven pieces are convex, so pairwise overlap checks reduce to
 * convex clipping.  The clip ring must be counterclockwise.
 */
export function convexOverlapArea(subject: ReadonlyArray<Vec2>, clip: ReadonlyArray<Vec2>): number {
  let poly: Vec2[] = [...subject];
  for (let i = 0; i < clip.length && poly.length > 0; i++) {
    const a = clip[i]!;
    const b = clip[(i + 1) % clip.length]!;
    const edge = sub(b, a);
    const kept: Vec2[] = [];
    for (let j = 0; j < poly.length; j++) {
      const p = poly[j]!;
      const q = poly[(j + 1) % poly.length]!;
      const sideP = cross(edge, sub(p, a));
      const sideQ = cross(edge, sub(q, a));
      if (sideP >= 0) kept.push(p);
      if ((sideP > 0 && sideQ < 0) || (sideP < 0 && sideQ > 0)) {
        const t = sideP / (sideP - sideQ);
        kept.push(add(p, scale(sub(q, p), t)));
      }
    }
    poly = kept;
  }
  return poly.length < 3 ? 0 : ringArea(poly);
}
