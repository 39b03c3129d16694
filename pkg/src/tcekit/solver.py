"""Backtracking exact-cover solver and random instance generator.

The search space is the tangram half-integer lattice: rotations in 45
degree steps, translations on the half-integer grid, reflection only for
the parallelogram.  A target outline is mapped into an integer frame by
doubling coordinates, undoing a 45 degree twist first for targets whose
vertices live on the sqrt(2) grid.  In that frame every legal placement
decomposes exactly into quarter-square triangle atoms (128 for an area-8
target), so containment and overlap reduce to set algebra on bitmasks.

Silhouettes that mix the two grids, or leave them entirely, admit no
common triangle decomposition; they are out of scope here and reported
as unsolvable rather than searched approximately.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Iterable, Sequence

from .exactnum import ExactValue, is_exact
from .geom import Point, Polygon, RigidTransform, apply, polygon_area
from .pipeline import NormalizationError, RawAssembly, SnapError, filter_raw, normalize
from .tangram import (
    KIND_INFO,
    KIND_ORDER,
    Outline,
    PieceKind,
    PieceState,
    TceInstance,
    make_piece_state,
)

_ZERO = ExactValue(0)
_EIGHT = ExactValue(8)
_ROOT_HALF = ExactValue(0, Fraction(1, 2))
_BASE_CELL = Polygon([(0, 0), (1, 0), (0, 1)])
_KIND_POS = {kind: n for n, kind in enumerate(KIND_ORDER)}


class _Exhausted:
    """Sentinel distinguishing a spent budget from a proven dead end."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "EXHAUSTED"

    def __bool__(self) -> bool:
        return False


EXHAUSTED = _Exhausted()


@dataclass(frozen=True)
class TriCell:
    """Half-square triangle of the lattice decomposition.

    ``orientation`` counts 45 degree steps: even values have unit legs
    along the axes, odd values along the diagonals.
    """

    anchor: Point
    orientation: int

    def __post_init__(self) -> None:
        x, y = self.anchor  # also unpacks plain pairs
        from .geom import _as_point

        pt = _as_point((x, y))
        if not (is_exact(pt.x) and is_exact(pt.y)):
            raise TypeError("cell anchor must be exact")
        object.__setattr__(self, "anchor", pt)
        if not 0 <= self.orientation < 8:
            raise ValueError("orientation must be in range(8)")

    def polygon(self) -> Polygon:
        t = RigidTransform.from_parts(45 * self.orientation, False, self.anchor)
        return apply(t, _BASE_CELL)


@dataclass(frozen=True)
class Placement:
    """One way to put a piece down: rotation, optional flip, translation."""

    kind: PieceKind
    angle: int
    reflected: bool
    translation: Point
    cells: tuple[TriCell, ...]

    def transform(self) -> RigidTransform:
        return RigidTransform.from_parts(self.angle, self.reflected, self.translation)


@dataclass(frozen=True)
class SolverConfig:
    node_budget: int = 10_000_000
    time_budget: float = 60.0
    find_all: bool = False
    deterministic: bool = True

    def __post_init__(self) -> None:
        if self.node_budget <= 0:
            raise ValueError("node_budget must be positive")
        if self.time_budget <= 0:
            raise ValueError("time_budget must be positive")


# ---------------------------------------------------------------------------
# Integer frame: doubled coordinates, two 45 degree parities


def _as_int(v: ExactValue) -> "int | None":
    if v.q != 0 or v.p.denominator != 1:
        return None
    return int(v.p)


def _half_steps(v: ExactValue) -> "int | None":
    return _as_int(v + v)


def _rot_back(x: ExactValue, y: ExactValue) -> tuple[ExactValue, ExactValue]:
    return ((x + y) * _ROOT_HALF, (y - x) * _ROOT_HALF)


def _rot_fwd(x: ExactValue, y: ExactValue) -> tuple[ExactValue, ExactValue]:
    return ((x - y) * _ROOT_HALF, (x + y) * _ROOT_HALF)


def _frame_of(points: Sequence[Point]) -> "tuple[int, list[tuple[int, int]]] | None":
    for parity in (0, 1):
        ints = []
        for p in points:
            x, y = (p.x, p.y) if parity == 0 else _rot_back(p.x, p.y)
            ix, iy = _half_steps(x), _half_steps(y)
            if ix is None or iy is None:
                break
            ints.append((ix, iy))
        else:
            return parity, ints
    return None


def _frame_point(ix: int, iy: int, parity: int) -> Point:
    x = ExactValue(Fraction(ix, 2))
    y = ExactValue(Fraction(iy, 2))
    if parity:
        x, y = _rot_fwd(x, y)
    return Point(x, y)


def _world_cell(i: int, j: int, r: int, parity: int) -> TriCell:
    return TriCell(_frame_point(i, j, parity), 2 * r + parity)


# ---------------------------------------------------------------------------
# Quarter-square atoms

# centroid of atom k of the unit square, scaled by 6 to stay integral
_CENTROID6 = ((3, 1), (5, 3), (3, 5), (1, 3))

Atom = tuple[int, int, int]


def _inside6(px: int, py: int, ring6: Sequence[tuple[int, int]]) -> bool:
    # crossing number; atom centroids never land on lattice edges, so
    # no boundary tie-breaks are needed
    inside = False
    n = len(ring6)
    for idx in range(n):
        ax, ay = ring6[idx]
        bx, by = ring6[(idx + 1) % n]
        if (ay > py) != (by > py):
            lhs = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            if (lhs > 0) == (by > ay):
                inside = not inside
    return inside


def _ring_atoms(ring: Sequence[tuple[int, int]]) -> frozenset[Atom]:
    ring6 = [(6 * x, 6 * y) for x, y in ring]
    xs = [x for x, _ in ring]
    ys = [y for _, y in ring]
    out = set()
    for i in range(min(xs), max(xs)):
        for j in range(min(ys), max(ys)):
            for k, (cx, cy) in enumerate(_CENTROID6):
                if _inside6(6 * i + cx, 6 * j + cy, ring6):
                    out.add((i, j, k))
    return frozenset(out)


def _atom_neighbors(a: Atom) -> tuple[Atom, Atom, Atom]:
    i, j, k = a
    hyp = ((i, j - 1, 2), (i + 1, j, 3), (i, j + 1, 0), (i - 1, j, 1))[k]
    return ((i, j, (k + 1) % 4), (i, j, (k - 1) % 4), hyp)


def _cell_ring(i: int, j: int, r: int) -> tuple[tuple[int, int], ...]:
    legs = ((2, 0), (0, 2)), ((0, 2), (-2, 0)), ((-2, 0), (0, -2)), ((0, -2), (2, 0))
    (ax, ay), (bx, by) = legs[r]
    return ((i, j), (i + ax, j + ay), (i + bx, j + by))


def _cell_atoms(i: int, j: int, r: int) -> frozenset[Atom]:
    return _ring_atoms(_cell_ring(i, j, r))


def _cover_with_cells(atoms: frozenset[Atom]) -> "tuple[tuple[int, int, int], ...] | None":
    """Deterministic first partition of an atom set into half-square cells."""

    order = sorted(atoms)
    index = {a: n for n, a in enumerate(order)}
    candidates = []
    lo_i = min(a[0] for a in order) - 2
    hi_i = max(a[0] for a in order) + 3
    lo_j = min(a[1] for a in order) - 2
    hi_j = max(a[1] for a in order) + 3
    for i in range(lo_i, hi_i):
        for j in range(lo_j, hi_j):
            for r in range(4):
                cell = _cell_atoms(i, j, r)
                if cell <= atoms:
                    mask = 0
                    for a in cell:
                        mask |= 1 << index[a]
                    candidates.append((mask, (i, j, r)))
    by_atom: list[list[tuple[int, tuple[int, int, int]]]] = [[] for _ in order]
    for mask, meta in candidates:
        for n in range(len(order)):
            if mask >> n & 1:
                by_atom[n].append((mask, meta))
    full = (1 << len(order)) - 1

    def rec(covered: int, chosen: list) -> "list | None":
        if covered == full:
            return chosen
        n = next(b for b in range(len(order)) if not covered >> b & 1)
        for mask, meta in by_atom[n]:
            if mask & covered:
                continue
            got = rec(covered | mask, chosen + [meta])
            if got is not None:
                return got
        return None

    got = rec(0, [])
    return None if got is None else tuple(got)


# ---------------------------------------------------------------------------
# Piece variants in the frame


@dataclass(frozen=True)
class _Variant:
    angle: int
    reflected: bool
    ring: tuple[tuple[int, int], ...]
    atoms: frozenset[Atom]
    cells: tuple[tuple[int, int, int], ...]


_VARIANTS: dict[PieceKind, tuple[_Variant, ...]] = {}


def _variants(kind: PieceKind) -> tuple[_Variant, ...]:
    cached = _VARIANTS.get(kind)
    if cached is not None:
        return cached
    doubled = Polygon([(2 * v.x, 2 * v.y) for v in KIND_INFO[kind].polygon.vertices])
    reflections = (False, True) if KIND_INFO[kind].reflection_allowed else (False,)
    out = []
    for reflected in reflections:
        for angle in range(0, 360, 45):
            poly = apply(RigidTransform.from_parts(angle, reflected, (0, 0)), doubled)
            ring = []
            for v in poly.vertices:
                ix, iy = _as_int(v.x), _as_int(v.y)
                if ix is None or iy is None:
                    break
                ring.append((ix, iy))
            else:
                atoms = _ring_atoms(ring)
                cells = _cover_with_cells(atoms)
                assert cells is not None
                out.append(_Variant(angle, reflected, tuple(ring), atoms, cells))
    _VARIANTS[kind] = tuple(out)
    return _VARIANTS[kind]


# ---------------------------------------------------------------------------
# Target decomposition


def _target_frame(t: Outline) -> "tuple[int, list[tuple[int, int]]] | None":
    ring = t.vertices
    if not ring.is_exact():
        raise ValueError("approximate outline: solver needs exact coordinates")
    if polygon_area(ring) != _EIGHT:
        return None
    for a, b in ring.edges():
        dx = b.x - a.x
        dy = b.y - a.y
        if not (dx == _ZERO or dy == _ZERO or dx == dy or dx + dy == _ZERO):
            return None
    return _frame_of(ring.vertices)


def decompose_target(t: Outline) -> "frozenset[TriCell] | None":
    """Split an area-8 lattice silhouette into its 16 half-square cells.

    Returns None when the area is wrong, the outline leaves the lattice,
    or no cell partition exists.  The partition is the deterministic
    first one in anchor-lexicographic order.
    """

    frame = _target_frame(t)
    if frame is None:
        return None
    parity, ints = frame
    cover = _cover_with_cells(_ring_atoms(ints))
    if cover is None:
        return None
    return frozenset(_world_cell(i, j, r, parity) for i, j, r in cover)


# ---------------------------------------------------------------------------
# Placement enumeration


def _order_key(p: Placement):
    return (p.translation, p.angle, p.reflected)


def enumerate_placements(kind: PieceKind, cells: Iterable[TriCell]) -> list[Placement]:
    """All distinct ways the piece fits inside the cells' region.

    Placements covering the same region through different symmetries
    collapse to the representative with the smallest (anchor, rotation,
    reflection) key; the result is sorted by that key.
    """

    cell_list = list(cells)
    if not cell_list:
        return []
    parity = cell_list[0].orientation % 2
    region: set[Atom] = set()
    for c in cell_list:
        if c.orientation % 2 != parity:
            raise ValueError("cells mix the two 45 degree parities")
        x, y = c.anchor
        if parity:
            x, y = _rot_back(x, y)
        ix, iy = _half_steps(x), _half_steps(y)
        if ix is None or iy is None:
            raise ValueError("cell anchor is off the lattice")
        region |= _cell_atoms(ix, iy, c.orientation // 2)
    lo_i = min(a[0] for a in region)
    hi_i = max(a[0] for a in region)
    lo_j = min(a[1] for a in region)
    hi_j = max(a[1] for a in region)
    best: dict[frozenset[Atom], Placement] = {}
    for var in _variants(kind):
        vis = [a[0] for a in var.atoms]
        vjs = [a[1] for a in var.atoms]
        for ti in range(lo_i - min(vis), hi_i - max(vis) + 1):
            for tj in range(lo_j - min(vjs), hi_j - max(vjs) + 1):
                placed = frozenset((i + ti, j + tj, k) for i, j, k in var.atoms)
                if not placed <= region:
                    continue
                cand = Placement(
                    kind,
                    (var.angle + 45 * parity) % 360,
                    var.reflected,
                    _frame_point(ti, tj, parity),
                    tuple(
                        _world_cell(ci + ti, cj + tj, r, parity)
                        for ci, cj, r in var.cells
                    ),
                )
                prev = best.get(placed)
                if prev is None or _order_key(cand) < _order_key(prev):
                    best[placed] = cand
    return sorted(best.values(), key=_order_key)


# ---------------------------------------------------------------------------
# Exact-cover search

_SHAPES: tuple[tuple[PieceKind, int], ...] = (
    (PieceKind.LARGE_TRIANGLE_1, 2),
    (PieceKind.MEDIUM_TRIANGLE, 1),
    (PieceKind.SMALL_TRIANGLE_1, 2),
    (PieceKind.SQUARE, 1),
    (PieceKind.PARALLELOGRAM, 1),
)

_LABEL_POOLS: dict[PieceKind, tuple[PieceKind, ...]] = {
    PieceKind.LARGE_TRIANGLE_1: (
        PieceKind.LARGE_TRIANGLE_1,
        PieceKind.LARGE_TRIANGLE_2,
    ),
    PieceKind.MEDIUM_TRIANGLE: (PieceKind.MEDIUM_TRIANGLE,),
    PieceKind.SMALL_TRIANGLE_1: (
        PieceKind.SMALL_TRIANGLE_1,
        PieceKind.SMALL_TRIANGLE_2,
    ),
    PieceKind.SQUARE: (PieceKind.SQUARE,),
    PieceKind.PARALLELOGRAM: (PieceKind.PARALLELOGRAM,),
}


class _BudgetExceeded(Exception):
    pass


def solve(
    t: Outline, cfg: SolverConfig = SolverConfig()
) -> "tuple[PieceState, ...] | None | _Exhausted":
    """Fill the outline exactly with the seven pieces.

    Returns the assembly in canonical piece order, None when the search
    space is provably empty, or EXHAUSTED when a budget ran out first.
    """

    frame = _target_frame(t)
    if frame is None:
        return None
    parity, ints = frame
    atoms = sorted(_ring_atoms(ints))
    index = {a: n for n, a in enumerate(atoms)}
    full = (1 << len(atoms)) - 1

    shape_cands: list[list[tuple[int, _Variant, tuple[int, int]]]] = []
    for rep, _need in _SHAPES:
        cands = []
        lo_i = min(a[0] for a in atoms)
        hi_i = max(a[0] for a in atoms)
        lo_j = min(a[1] for a in atoms)
        hi_j = max(a[1] for a in atoms)
        for var in _variants(rep):
            vis = [a[0] for a in var.atoms]
            vjs = [a[1] for a in var.atoms]
            for ti in range(lo_i - min(vis), hi_i - max(vis) + 1):
                for tj in range(lo_j - min(vjs), hi_j - max(vjs) + 1):
                    mask = 0
                    for i, j, k in var.atoms:
                        bit = index.get((i + ti, j + tj, k))
                        if bit is None:
                            break
                        mask |= 1 << bit
                    else:
                        cands.append((mask, var, (ti, tj)))
        cands.sort(key=lambda c: (c[2], c[1].angle, c[1].reflected))
        shape_cands.append(cands)

    for sid, (rep, need) in enumerate(_SHAPES):
        if need > 0 and not shape_cands[sid]:
            return None

    by_atom: list[list[tuple[int, int]]] = [[] for _ in atoms]
    for sid, cands in enumerate(shape_cands):
        for cid, (mask, _var, _t) in enumerate(cands):
            for n in range(len(atoms)):
                if mask >> n & 1:
                    by_atom[n].append((sid, cid))

    remaining = [need for _rep, need in _SHAPES]
    chosen: list[tuple[int, int]] = []
    solutions: list[list[tuple[int, int]]] = []
    nodes = 0
    started = time.monotonic()

    def search(covered: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > cfg.node_budget:
            raise _BudgetExceeded
        if nodes % 256 == 0 and time.monotonic() - started > cfg.time_budget:
            raise _BudgetExceeded
        if covered == full:
            solutions.append(list(chosen))
            return not cfg.find_all
        best_list = None
        best_count = None
        for n in range(len(atoms)):
            if covered >> n & 1:
                continue
            count = 0
            cand_list = []
            for sid, cid in by_atom[n]:
                if remaining[sid] == 0:
                    continue
                if shape_cands[sid][cid][0] & covered:
                    continue
                count += 1
                cand_list.append((sid, cid))
                if best_count is not None and count >= best_count:
                    break
            if best_count is None or count < best_count:
                best_count = count
                best_list = cand_list
            if best_count == 0:
                return False
            if best_count == 1:
                break
        for sid, cid in best_list:
            chosen.append((sid, cid))
            remaining[sid] -= 1
            done = search(covered | shape_cands[sid][cid][0])
            remaining[sid] += 1
            chosen.pop()
            if done:
                return True
        return False

    try:
        search(0)
    except _BudgetExceeded:
        if not solutions:
            return EXHAUSTED
    if not solutions:
        return None
    pools = {rep: list(seq) for rep, seq in _LABEL_POOLS.items()}
    pieces = []
    for sid, cid in solutions[0]:
        rep = _SHAPES[sid][0]
        kind = pools[rep].pop(0)
        _mask, var, (ti, tj) = shape_cands[sid][cid]
        transform = RigidTransform.from_parts(
            (var.angle + 45 * parity) % 360,
            var.reflected,
            _frame_point(ti, tj, parity),
        )
        pieces.append(make_piece_state(kind, transform=transform))
    pieces.sort(key=lambda p: _KIND_POS[p.kind])
    return tuple(pieces)


# ---------------------------------------------------------------------------
# Random instance growth


def _grow_once(rng: Random) -> "list[tuple[PieceKind, tuple[tuple[int, int], ...]]] | None":
    kinds = rng.sample(list(KIND_ORDER), len(KIND_ORDER))
    first, rest = kinds[0], kinds[1:]
    var = rng.choice(_variants(first))
    occupied = set(var.atoms)
    placed = [(first, var.ring)]
    for kind in rest:
        frontier = sorted(
            {n for a in occupied for n in _atom_neighbors(a)} - occupied
        )
        rng.shuffle(frontier)
        pick = None
        for atom in frontier:
            cands: dict[frozenset[Atom], tuple] = {}
            for var2 in _variants(kind):
                for oi, oj, ok in sorted(var2.atoms):
                    if ok != atom[2]:
                        continue
                    ti, tj = atom[0] - oi, atom[1] - oj
                    moved = frozenset((i + ti, j + tj, k) for i, j, k in var2.atoms)
                    if moved in cands or not occupied.isdisjoint(moved):
                        continue
                    ring = tuple((x + ti, y + tj) for x, y in var2.ring)
                    cands[moved] = (ti, tj, var2.angle, var2.reflected, ring, moved)
            if cands:
                options = sorted(cands.values(), key=lambda c: c[:4])
                pick = rng.choice(options)
                break
        if pick is None:
            return None
        occupied |= pick[5]
        placed.append((kind, pick[4]))
    return placed


def generate_instances(
    count: int, seed: int, cfg: SolverConfig = SolverConfig()
) -> list[TceInstance]:
    """Grow, filter, and normalize random edge-connected assemblies.

    Deterministic for a fixed seed.  The node budget caps generation
    attempts, so a tight budget yields a partial corpus and a warning.
    """

    if count <= 0:
        raise ValueError("count must be positive")
    rng = Random(seed)
    attempts = min(cfg.node_budget, 64 * count)
    out: list[TceInstance] = []
    seen: set[str] = set()
    for _ in range(attempts):
        if len(out) >= count:
            break
        grown = _grow_once(rng)
        if grown is None:
            continue
        raw = RawAssembly(
            None,
            tuple(
                (kind, tuple((x / 2, y / 2) for x, y in ring))
                for kind, ring in grown
            ),
        )
        if not filter_raw(raw).accepted:
            continue
        try:
            inst = normalize(raw)
        except (SnapError, NormalizationError, ValueError):
            continue
        if inst.instance_id in seen:
            continue
        seen.add(inst.instance_id)
        out.append(inst)
    if len(out) < count:
        warnings.warn(
            f"generated only {len(out)} of {count} instances", RuntimeWarning
        )
    return out
