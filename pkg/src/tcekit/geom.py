"""2D primitives, rigid transforms, polygon predicates, and shape metrics.

Two numeric tracks run through this module.  When every coordinate in
play is exact (Q(√2) values or integers), predicates and constructions
are exact: signs come from rational case analysis and never from
rounded floats.  As soon as a float enters, the computation degrades to
binary64 with an absolute coincidence tolerance of 1e-9, which is far
below any geometric feature of the scenes handled here (spans stay
under ~16 units).

The union machinery mirrors that split.  Exact, vertex-snapped,
interior-disjoint assemblies go through an edge-cancellation sweep that
needs no tolerances at all; anything carrying floats is handed to a
snap-rounded boolean union (shapely/GEOS).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import shapely

from .exactnum import ExactValue, Scalar, exact_sqrt, is_exact

COINCIDENCE_TOL = 1e-9
DEFAULT_HAUSDORFF_RESOLUTION = 0.01


class Point(NamedTuple):
    x: Scalar
    y: Scalar

    def to_floats(self) -> tuple[float, float]:
        return (float(self.x), float(self.y))


SegmentSet = list[tuple[Point, Point]]


class PointLocation(Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


class NonCanonicalAngleError(ValueError):
    """Rigid rotation that is not a multiple of 45°."""


def _as_scalar(v: object) -> Scalar:
    if isinstance(v, ExactValue):
        return v
    if isinstance(v, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(v, (int, Fraction)):
        return ExactValue(v)
    if isinstance(v, float):
        return v
    raise TypeError(f"not a coordinate: {v!r}")


def _as_point(p: object) -> Point:
    x, y = p  # type: ignore[misc]
    return Point(_as_scalar(x), _as_scalar(y))


def _sgn(v: Scalar) -> int:
    """Sign of a scalar; exact values never round, floats use the tolerance."""
    if isinstance(v, ExactValue):
        return v.sign()
    if isinstance(v, (int, Fraction)):
        return (v > 0) - (v < 0)
    if abs(v) <= COINCIDENCE_TOL:
        return 0
    return 1 if v > 0 else -1


def _orient(a: Point, b: Point, c: Point) -> Scalar:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _dot(ax: Scalar, ay: Scalar, bx: Scalar, by: Scalar) -> Scalar:
    return ax * bx + ay * by


def _is_exact_point(p: Point) -> bool:
    return is_exact(p.x) and is_exact(p.y)


class Polygon:
    """Simple polygon stored as a counterclockwise ring.

    Construction drops repeated consecutive vertices, rejects rings with
    fewer than three distinct corners or zero area, and reverses
    clockwise input.  Simplicity itself is not checked here; operations
    that require it say so.
    """

    __slots__ = ("vertices",)

    vertices: tuple[Point, ...]

    def __init__(self, vertices: Iterable[object]):
        pts = [_as_point(p) for p in vertices]
        ring: list[Point] = []
        for p in pts:
            if not ring or p != ring[-1]:
                ring.append(p)
        while len(ring) > 1 and ring[0] == ring[-1]:
            ring.pop()
        if len(ring) < 3:
            raise ValueError("polygon needs at least 3 distinct vertices")
        s = _sgn(_signed_area2(ring))
        if s == 0:
            raise ValueError("degenerate polygon (zero area)")
        if s < 0:
            ring.reverse()
        object.__setattr__(self, "vertices", tuple(ring))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Polygon is immutable")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polygon):
            return NotImplemented
        return self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"Polygon({list(self.vertices)!r})"

    def __len__(self) -> int:
        return len(self.vertices)

    def is_exact(self) -> bool:
        return all(_is_exact_point(p) for p in self.vertices)

    def edges(self) -> list[tuple[Point, Point]]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def to_float_ring(self) -> list[tuple[float, float]]:
        return [p.to_floats() for p in self.vertices]

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [float(p.x) for p in self.vertices]
        ys = [float(p.y) for p in self.vertices]
        return (min(xs), min(ys), max(xs), max(ys))


def _signed_area2(ring: Sequence[Point]) -> Scalar:
    total: Scalar = ExactValue(0)
    n = len(ring)
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        total = total + (a.x * b.y - b.x * a.y)
    return total


def polygon_area(p: Polygon) -> Scalar:
    """Positive shoelace area; exact when every coordinate is exact."""
    a2 = _signed_area2(p.vertices)
    if isinstance(a2, ExactValue):
        if a2.sign() < 0:
            a2 = -a2
        return a2 * Fraction(1, 2)
    return abs(a2) / 2.0


def polygon_perimeter(p: Polygon) -> Scalar:
    """Edge-length sum; each edge uses an exact root when one exists."""
    total: Scalar = ExactValue(0)
    for a, b in p.edges():
        dx = b.x - a.x
        dy = b.y - a.y
        sq = dx * dx + dy * dy
        if isinstance(sq, ExactValue):
            root = exact_sqrt(sq)
            total = total + (root if root is not None else math.sqrt(sq.to_float()))
        else:
            total = total + math.sqrt(sq)
    return total


# ---------------------------------------------------------------------------
# rigid transforms


_EIGHT_ANGLES: tuple[tuple[int, ExactValue, ExactValue], ...] = tuple(
    (deg, c, s)
    for deg, c, s in [
        (0, ExactValue(1), ExactValue(0)),
        (45, ExactValue(0, Fraction(1, 2)), ExactValue(0, Fraction(1, 2))),
        (90, ExactValue(0), ExactValue(1)),
        (135, ExactValue(0, Fraction(-1, 2)), ExactValue(0, Fraction(1, 2))),
        (180, ExactValue(-1), ExactValue(0)),
        (225, ExactValue(0, Fraction(-1, 2)), ExactValue(0, Fraction(-1, 2))),
        (270, ExactValue(0), ExactValue(-1)),
        (315, ExactValue(0, Fraction(1, 2)), ExactValue(0, Fraction(-1, 2))),
    ]
)


class TransformParts(NamedTuple):
    angle_deg: int
    reflected: bool
    translation: Point


@dataclass(frozen=True)
class RigidTransform:
    """Row-major 3×3 homogeneous matrix.

    Construction checks only the shape; rigidity is a predicate because
    parsed documents may legitimately carry a broken matrix that the
    verifier must be able to hold and reject.
    """

    rows: tuple[tuple[Scalar, Scalar, Scalar], ...]

    def __init__(self, rows: Iterable[Iterable[object]]):
        mat = tuple(tuple(_as_scalar(v) for v in row) for row in rows)
        if len(mat) != 3 or any(len(r) != 3 for r in mat):
            raise ValueError("transform matrix must be 3x3")
        object.__setattr__(self, "rows", mat)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls.from_parts(0, False, Point(ExactValue(0), ExactValue(0)))

    @classmethod
    def from_parts(
        cls, angle_deg: int, reflected: bool, translation: object
    ) -> "RigidTransform":
        t = _as_point(translation)
        deg = angle_deg % 360
        for d, c, s in _EIGHT_ANGLES:
            if d == deg:
                break
        else:
            raise NonCanonicalAngleError(f"angle {angle_deg} is not a multiple of 45")
        # linear part L = R(angle) for plain, R(angle)·diag(-1, 1) reflected
        if reflected:
            m00, m01, m10, m11 = -c, -s, -s, c
        else:
            m00, m01, m10, m11 = c, -s, s, c
        zero = ExactValue(0)
        one = ExactValue(1)
        return cls(((m00, m01, t.x), (m10, m11, t.y), (zero, zero, one)))

    def is_exact(self) -> bool:
        return all(is_exact(v) for row in self.rows for v in row)

    def determinant2(self) -> Scalar:
        (a, b, _), (c, d, _), _ = self.rows
        return a * d - b * c

    def is_rigid(self) -> bool:
        (a, b, _), (c, d, _), last = self.rows
        l0, l1, l2 = last
        if _sgn(l0) != 0 or _sgn(l1) != 0 or _sgn(l2 - 1) != 0:
            return False
        # orthogonality: columns unit and perpendicular
        if _sgn(a * a + c * c - 1) != 0:
            return False
        if _sgn(b * b + d * d - 1) != 0:
            return False
        if _sgn(a * b + c * d) != 0:
            return False
        det = a * d - b * c
        return _sgn(det - 1) == 0 or _sgn(det + 1) == 0

    def translation(self) -> Point:
        return Point(self.rows[0][2], self.rows[1][2])


def apply(t: RigidTransform, target: "Polygon | Point"):
    """Image of a point or polygon under a rigid transform."""
    if not t.is_rigid():
        raise ValueError("transform is not rigid")
    (a, b, tx), (c, d, ty), _ = t.rows
    if isinstance(target, Point):
        return Point(a * target.x + b * target.y + tx, c * target.x + d * target.y + ty)
    pts = [
        Point(a * p.x + b * p.y + tx, c * p.x + d * p.y + ty)
        for p in target.vertices
    ]
    return Polygon(pts)  # ring renormalizes to CCW after a det -1 flip


def decompose(t: RigidTransform) -> TransformParts:
    """Split a rigid transform into a 45°-step angle, a flip, and a shift.

    The linear part factors as R(angle) when det = +1 and as
    R(angle)·diag(-1, 1) when det = -1, so diag(-1, 1) itself reads as
    angle 0 with a reflection.
    """
    if not t.is_rigid():
        raise ValueError("transform is not rigid")
    (a, b, _), (c, d, _), _ = t.rows
    reflected = _sgn(t.determinant2()) < 0
    if reflected:
        # undo the reflection on the right: R = L·diag(-1, 1)
        a, c = -a, -c
    for deg, cos_v, sin_v in _EIGHT_ANGLES:
        if (
            _sgn(a - cos_v) == 0
            and _sgn(c - sin_v) == 0
            and _sgn(b + sin_v) == 0
            and _sgn(d - cos_v) == 0
        ):
            return TransformParts(deg, reflected, t.translation())
    raise NonCanonicalAngleError("rigid transform with off-lattice angle")


# ---------------------------------------------------------------------------
# convexity, clipping, containment


def is_convex(p: Polygon) -> bool:
    vs = p.vertices
    n = len(vs)
    for i in range(n):
        if _sgn(_orient(vs[i], vs[(i + 1) % n], vs[(i + 2) % n])) < 0:
            return False
    return True


def convex_clip(a: Polygon, b: Polygon) -> "Polygon | None":
    """Intersection of two convex polygons, or None when interior-disjoint."""
    if not is_convex(a) or not is_convex(b):
        raise ValueError("convex_clip requires convex input")
    ring: list[Point] = list(a.vertices)
    for ea, eb in b.edges():
        if not ring:
            return None
        out: list[Point] = []
        sides = [_sgn(_orient(ea, eb, p)) for p in ring]
        n = len(ring)
        for i in range(n):
            p, q = ring[i], ring[(i + 1) % n]
            sp, sq = sides[i], sides[(i + 1) % n]
            if sp >= 0:
                out.append(p)
            if sp * sq < 0:
                out.append(_line_hit(ea, eb, p, q))
        ring = []
        for p in out:  # collapse duplicates introduced at touching corners
            if not ring or p != ring[-1]:
                ring.append(p)
        while len(ring) > 1 and ring[0] == ring[-1]:
            ring.pop()
    if len(ring) < 3:
        return None
    if _sgn(_signed_area2(ring)) == 0:
        return None
    return Polygon(ring)


def _line_hit(a: Point, b: Point, p: Point, q: Point) -> Point:
    # intersection of segment pq with the infinite line ab; caller
    # guarantees p and q straddle the line, so the denominator is nonzero
    op = _orient(a, b, p)
    oq = _orient(a, b, q)
    t = op / (op - oq)
    return Point(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))


def point_in_polygon(pt: object, p: Polygon) -> PointLocation:
    """Crossing-number classification with an explicit boundary check."""
    v = _as_point(pt)
    for a, b in p.edges():
        if _sgn(_orient(a, b, v)) == 0:
            lo = _dot(v.x - a.x, v.y - a.y, b.x - a.x, b.y - a.y)
            hi = _dot(v.x - b.x, v.y - b.y, a.x - b.x, a.y - b.y)
            if _sgn(lo) >= 0 and _sgn(hi) >= 0:
                return PointLocation.BOUNDARY
    inside = False
    for a, b in p.edges():
        above_a = _sgn(a.y - v.y) > 0
        above_b = _sgn(b.y - v.y) > 0
        if above_a == above_b:
            continue
        o = _sgn(_orient(a, b, v)) * _sgn(b.y - a.y)
        if o > 0:
            inside = not inside
    return PointLocation.INSIDE if inside else PointLocation.OUTSIDE


def triangulate(p: Polygon) -> list[Polygon]:
    """Ear-clipping fan of a simple polygon into triangles."""
    ring = list(p.vertices)
    tris: list[Polygon] = []
    guard = 0
    while len(ring) > 3:
        guard += 1
        if guard > 10_000:
            raise ValueError("triangulation failed to make progress")
        n = len(ring)
        clipped = False
        for i in range(n):
            a, b, c = ring[i - 1], ring[i], ring[(i + 1) % n]
            turn = _sgn(_orient(a, b, c))
            if turn == 0:
                # straight vertex contributes nothing
                del ring[i]
                clipped = True
                break
            if turn < 0:
                continue
            if any(
                _point_in_triangle(q, a, b, c)
                for j, q in enumerate(ring)
                if j not in (i - 1 if i else n - 1, i, (i + 1) % n)
            ):
                continue
            tris.append(Polygon((a, b, c)))
            del ring[i]
            clipped = True
            break
        if not clipped:
            raise ValueError("no ear found; polygon is not simple")
    tris.append(Polygon(ring))
    return tris


def _point_in_triangle(q: Point, a: Point, b: Point, c: Point) -> bool:
    # closed triangle; (a, b, c) is counterclockwise
    return (
        _sgn(_orient(a, b, q)) >= 0
        and _sgn(_orient(b, c, q)) >= 0
        and _sgn(_orient(c, a, q)) >= 0
    )


def intersection_area(a: Polygon, b: Polygon) -> Scalar:
    """μ(a ∩ b); exact for exact inputs, non-convex handled by triangulation."""
    ax0, ay0, ax1, ay1 = a.bounds()
    bx0, by0, bx1, by1 = b.bounds()
    # slack keeps the float prefilter conservative for exact inputs
    eps = COINCIDENCE_TOL
    if ax1 < bx0 - eps or bx1 < ax0 - eps or ay1 < by0 - eps or by1 < ay0 - eps:
        return ExactValue(0) if a.is_exact() and b.is_exact() else 0.0
    tris_a = [a] if is_convex(a) else triangulate(a)
    tris_b = [b] if is_convex(b) else triangulate(b)
    total: Scalar = ExactValue(0)
    for ta, tb in itertools.product(tris_a, tris_b):
        piece = convex_clip(ta, tb)
        if piece is not None:
            total = total + polygon_area(piece)
    return total


# ---------------------------------------------------------------------------
# union of assemblies


@dataclass(frozen=True)
class UnionInfo:
    area: Scalar
    components: int
    boundary: SegmentSet
    holes: int
    adjacency: frozenset[tuple[int, int]]
    loops: int


def union_info(pieces: Sequence[Polygon]) -> UnionInfo:
    """Area, connectivity, boundary, and hole count of a piece union.

    Exact inputs go through edge cancellation: every edge is split at
    every vertex incident to it, coinciding opposite fragments cancel
    (their owners become adjacent), and the surviving fragments are
    walked into boundary loops.  holes = loops - components, which is
    meaningful for interior-disjoint assemblies; overlapping input still
    returns (degraded) numbers rather than failing, since the verifier
    has to keep going on invalid assemblies.

    Touching at a single point does not make two pieces adjacent; only
    shared boundary of positive length (or positive overlap) does.
    """
    if not pieces:
        raise ValueError("union of no pieces")
    if all(p.is_exact() for p in pieces):
        return _union_exact(list(pieces))
    return _union_approx(list(pieces))


def _pairwise_overlaps(pieces: list[Polygon]) -> dict[tuple[int, int], Scalar]:
    out: dict[tuple[int, int], Scalar] = {}
    bounds = [p.bounds() for p in pieces]
    eps = COINCIDENCE_TOL
    for i, j in itertools.combinations(range(len(pieces)), 2):
        (ax0, ay0, ax1, ay1), (bx0, by0, bx1, by1) = bounds[i], bounds[j]
        if ax1 < bx0 - eps or bx1 < ax0 - eps or ay1 < by0 - eps or by1 < ay0 - eps:
            continue
        area = intersection_area(pieces[i], pieces[j])
        if _sgn(area) > 0:
            out[(i, j)] = area
    return out


def _components(n: int, edges: Iterable[tuple[int, int]]) -> int:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    return len({find(i) for i in range(n)})


def _union_exact(pieces: list[Polygon]) -> UnionInfo:
    # 1. collect directed edges and the global vertex set
    edges: list[tuple[int, Point, Point]] = []
    vertex_set: dict[Point, None] = {}
    for idx, poly in enumerate(pieces):
        for a, b in poly.edges():
            edges.append((idx, a, b))
            vertex_set[a] = None
    vertices = list(vertex_set)

    # 2. split every edge at every incident vertex
    fragments: list[tuple[int, Point, Point]] = []
    for idx, a, b in edges:
        dx = b.x - a.x
        dy = b.y - a.y
        span = dx * dx + dy * dy
        cuts: list[tuple[Scalar, Point]] = []
        for v in vertices:
            if v == a or v == b:
                continue
            if _sgn(_orient(a, b, v)) != 0:
                continue
            t = _dot(v.x - a.x, v.y - a.y, dx, dy)
            if _sgn(t) > 0 and _sgn(span - t) > 0:
                cuts.append((t, v))
        cuts.sort(key=lambda cv: cv[0])
        chain = [a] + [v for _, v in cuts] + [b]
        for u, w in zip(chain, chain[1:]):
            fragments.append((idx, u, w))

    # 3. cancel coincident opposite fragments
    by_pair: dict[tuple[Point, Point], list[tuple[int, bool]]] = {}
    frag_list: list[tuple[int, Point, Point]] = []
    for idx, u, w in fragments:
        key, forward = _undirected_key(u, w)
        by_pair.setdefault(key, []).append((len(frag_list), forward))
        frag_list.append((idx, u, w))
    cancelled = [False] * len(frag_list)
    adjacency: set[tuple[int, int]] = set()
    for key, members in by_pair.items():
        fwd = [m for m in members if m[1]]
        rev = [m for m in members if not m[1]]
        for (fi, _), (ri, _) in zip(fwd, rev):
            cancelled[fi] = cancelled[ri] = True
            pi, pj = frag_list[fi][0], frag_list[ri][0]
            if pi != pj:
                adjacency.add((min(pi, pj), max(pi, pj)))

    survivors = [
        (u, w) for flag, (_, u, w) in zip(cancelled, frag_list) if not flag
    ]

    # 4. walk surviving fragments into closed loops
    loops = _walk_loops(survivors)

    # 5. merge collinear runs per loop into the boundary segment set
    boundary: SegmentSet = []
    for loop in loops:
        boundary.extend(_merge_collinear(loop))

    overlaps = _pairwise_overlaps(pieces)
    for i, j in overlaps:
        adjacency.add((i, j))
    n_components = _components(len(pieces), adjacency)

    area: Scalar = ExactValue(0)
    for p in pieces:
        area = area + polygon_area(p)
    for v in overlaps.values():
        area = area - v

    holes = max(0, len(loops) - n_components)
    return UnionInfo(
        area=area,
        components=n_components,
        boundary=boundary,
        holes=holes,
        adjacency=frozenset(adjacency),
        loops=len(loops),
    )


def _undirected_key(u: Point, w: Point) -> tuple[tuple[Point, Point], bool]:
    sx = _sgn(u.x - w.x)
    if sx < 0 or (sx == 0 and _sgn(u.y - w.y) < 0):
        return (u, w), True
    return (w, u), False


def _walk_loops(survivors: list[tuple[Point, Point]]) -> list[list[tuple[Point, Point]]]:
    out_map: dict[Point, list[int]] = {}
    for fid, (u, _w) in enumerate(survivors):
        out_map.setdefault(u, []).append(fid)
    used = [False] * len(survivors)
    loops: list[list[tuple[Point, Point]]] = []
    for start in range(len(survivors)):
        if used[start]:
            continue
        loop: list[tuple[Point, Point]] = []
        fid = start
        while not used[fid]:
            used[fid] = True
            u, w = survivors[fid]
            loop.append((u, w))
            candidates = out_map.get(w, [])
            if not candidates:
                break  # inconsistent input ran dry
            base = (u.x - w.x, u.y - w.y)  # reversed incoming direction
            # first ray clockwise from the reversed incoming direction,
            # over ALL outgoing fragments: at a pinch vertex the correct
            # choice may be the already-used loop start, which closes us
            fid = min(
                candidates,
                key=cmp_to_key(
                    lambda g1, g2: _cw_compare(base, _frag_dir(survivors[g1]), _frag_dir(survivors[g2]))
                ),
            )
        loops.append(loop)
    return loops


def _frag_dir(frag: tuple[Point, Point]) -> tuple[Scalar, Scalar]:
    (u, w) = frag
    return (w.x - u.x, w.y - u.y)


def _cw_bucket(base: tuple[Scalar, Scalar], ray: tuple[Scalar, Scalar]) -> int:
    cross = base[0] * ray[1] - base[1] * ray[0]
    dot = base[0] * ray[0] + base[1] * ray[1]
    sc = _sgn(cross)
    if sc < 0:
        return 0  # strictly clockwise side, reached first
    if sc == 0:
        return 1 if _sgn(dot) < 0 else 3  # straight on, else full U-turn
    return 2  # counterclockwise side


def _cw_compare(
    base: tuple[Scalar, Scalar],
    r1: tuple[Scalar, Scalar],
    r2: tuple[Scalar, Scalar],
) -> int:
    """Order rays by clockwise angle from `base`; smaller angle first."""
    b1, b2 = _cw_bucket(base, r1), _cw_bucket(base, r2)
    if b1 != b2:
        return -1 if b1 < b2 else 1
    cross = _sgn(r1[0] * r2[1] - r1[1] * r2[0])
    if cross == 0:
        return 0
    return -1 if cross < 0 else 1


def _merge_collinear(loop: list[tuple[Point, Point]]) -> SegmentSet:
    if not loop:
        return []
    dirs = [(w.x - u.x, w.y - u.y) for u, w in loop]
    n = len(loop)

    def same_dir(i: int, j: int) -> bool:
        (ax, ay), (bx, by) = dirs[i], dirs[j]
        return _sgn(ax * by - ay * bx) == 0 and _sgn(ax * bx + ay * by) > 0

    # rotate so the loop does not start mid-run
    start = 0
    for i in range(n):
        if not same_dir((i - 1) % n, i):
            start = i
            break
    merged: SegmentSet = []
    run_start = loop[start][0]
    prev = start
    for k in range(1, n + 1):
        i = (start + k) % n
        if k == n or not same_dir(prev, i):
            merged.append((run_start, loop[prev][1]))
            if k < n:
                run_start = loop[i][0]
        prev = i
    return merged


def _union_approx(pieces: list[Polygon]) -> UnionInfo:
    geoms = [
        shapely.set_precision(shapely.Polygon(p.to_float_ring()), COINCIDENCE_TOL)
        for p in pieces
    ]
    merged = shapely.union_all(geoms)
    polys = _flatten_polygons(merged)

    adjacency: set[tuple[int, int]] = set()
    for i, j in itertools.combinations(range(len(geoms)), 2):
        inter = geoms[i].intersection(geoms[j])
        if inter.is_empty:
            continue
        if getattr(inter, "area", 0.0) > 1e-12 or getattr(inter, "length", 0.0) > 1e-6:
            adjacency.add((i, j))
    n_components = _components(len(pieces), adjacency)

    boundary: SegmentSet = []
    loops = 0
    holes = 0
    for poly in polys:
        rings = [poly.exterior, *poly.interiors]
        holes += len(poly.interiors)
        loops += len(rings)
        for ring in rings:
            coords = list(ring.coords)
            for (x0, y0), (x1, y1) in zip(coords, coords[1:]):
                if (x0, y0) != (x1, y1):
                    boundary.append((Point(x0, y0), Point(x1, y1)))
    return UnionInfo(
        area=float(merged.area),
        components=n_components,
        boundary=boundary,
        holes=holes,
        adjacency=frozenset(adjacency),
        loops=loops,
    )


def _flatten_polygons(geom) -> list:
    if geom.is_empty:
        return []
    if geom.geom_type == "Polygon":
        return [geom]
    if geom.geom_type in ("MultiPolygon", "GeometryCollection"):
        out = []
        for g in geom.geoms:
            out.extend(_flatten_polygons(g))
        return out
    return []


# ---------------------------------------------------------------------------
# Stage-2 metrics (always binary64)


def iou(u: Sequence[Polygon], t: Polygon) -> float:
    """Area IoU between a piece union and a target, in the float track."""
    if not u:
        raise ValueError("empty assembly")
    geoms = [
        shapely.set_precision(shapely.Polygon(p.to_float_ring()), COINCIDENCE_TOL)
        for p in u
    ]
    union_u = shapely.union_all(geoms)
    target = shapely.set_precision(shapely.Polygon(t.to_float_ring()), COINCIDENCE_TOL)
    denom = union_u.union(target).area
    if denom <= 0.0:
        return 0.0
    return union_u.intersection(target).area / denom


def _sample_segments(segs: SegmentSet, resolution: float) -> np.ndarray:
    pts: list[tuple[float, float]] = []
    for a, b in segs:
        ax, ay = a.to_floats()
        bx, by = b.to_floats()
        length = math.hypot(bx - ax, by - ay)
        n = max(1, math.ceil(length / resolution))
        for k in range(n + 1):
            t = k / n
            pts.append((ax + t * (bx - ax), ay + t * (by - ay)))
    return np.asarray(pts, dtype=np.float64)


def _segment_arrays(segs: SegmentSet) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray([s[0].to_floats() for s in segs], dtype=np.float64)
    b = np.asarray([s[1].to_floats() for s in segs], dtype=np.float64)
    return a, b


def _directed_hausdorff(samples: np.ndarray, segs: SegmentSet) -> float:
    a, b = _segment_arrays(segs)
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    dd = np.where(dd == 0.0, 1.0, dd)
    rel = samples[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("nmj,mj->nm", rel, d) / dd, 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * d[None, :, :]
    dist = np.linalg.norm(samples[:, None, :] - proj, axis=2)
    return float(dist.min(axis=1).max())


def hausdorff(
    a: SegmentSet, b: SegmentSet, resolution: float = DEFAULT_HAUSDORFF_RESOLUTION
) -> float:
    """Symmetric Hausdorff distance between two boundaries.

    Each segment is subdivided at the given resolution and every sample
    is measured against the other set's true segments, so the reported
    value carries additive error at most resolution/2.
    """
    if not a or not b:
        raise ValueError("empty segment set")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    ab = _directed_hausdorff(_sample_segments(a, resolution), b)
    ba = _directed_hausdorff(_sample_segments(b, resolution), a)
    return max(ab, ba)


def boundary_of(p: Polygon) -> SegmentSet:
    """Polygon edges as a segment set (drops nothing; rings are simple)."""
    return list(p.edges())
