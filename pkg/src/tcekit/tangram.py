"""The seven-piece inventory, the TCE data model, and its JSON codec.

A TCE document is a single JSON object with keys exactly
{"instance_id", "target_outline", "initial_state", "final_state",
"adjacency_graph"}.  Every number travels as a string: either a LaTeX
expression from the exact grammar or a plain decimal literal.  Outline
edges serialize as [i, j] index pairs; piece edges carry the redundant
length as a third entry, [i, j, "length"], which the parser validates
against the vertices (exactly when both sides are exact, else within
1e-6).  The parser is total: nothing raises, every problem lands in a
TseReport, and an instance is still returned whenever the document is
recoverable enough to evaluate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .exactnum import (
    ExactValue,
    Scalar,
    exact_sqrt,
    format_scalar,
    is_exact,
    parse_scalar,
)
from .geom import Point, Polygon, RigidTransform, apply

LENGTH_TOL = 1e-6


class PieceKind(Enum):
    LARGE_TRIANGLE_1 = "large_triangle_1"
    LARGE_TRIANGLE_2 = "large_triangle_2"
    MEDIUM_TRIANGLE = "medium_triangle"
    SMALL_TRIANGLE_1 = "small_triangle_1"
    SMALL_TRIANGLE_2 = "small_triangle_2"
    SQUARE = "square"
    PARALLELOGRAM = "parallelogram"


_SQRT2 = ExactValue(0, 1)
_HALF_SQRT2 = ExactValue(0, Fraction(1, 2))


def _canon(coords: Sequence[tuple]) -> Polygon:
    return Polygon(coords)


_CANONICAL_RINGS: dict[PieceKind, Polygon] = {
    PieceKind.LARGE_TRIANGLE_1: _canon([(0, 0), (2, 0), (0, 2)]),
    PieceKind.LARGE_TRIANGLE_2: _canon([(0, 0), (2, 0), (0, 2)]),
    PieceKind.MEDIUM_TRIANGLE: _canon(
        [(ExactValue(0), ExactValue(0)), (_SQRT2, ExactValue(0)), (ExactValue(0), _SQRT2)]
    ),
    PieceKind.SMALL_TRIANGLE_1: _canon([(0, 0), (1, 0), (0, 1)]),
    PieceKind.SMALL_TRIANGLE_2: _canon([(0, 0), (1, 0), (0, 1)]),
    PieceKind.SQUARE: _canon([(0, 0), (1, 0), (1, 1), (0, 1)]),
    PieceKind.PARALLELOGRAM: _canon(
        [
            (ExactValue(0), ExactValue(0)),
            (_SQRT2, ExactValue(0)),
            (_SQRT2 * Fraction(3, 2), _HALF_SQRT2),
            (_HALF_SQRT2, _HALF_SQRT2),
        ]
    ),
}

LABELS: dict[PieceKind, str] = {
    PieceKind.LARGE_TRIANGLE_1: "LT1",
    PieceKind.LARGE_TRIANGLE_2: "LT2",
    PieceKind.MEDIUM_TRIANGLE: "MT",
    PieceKind.SMALL_TRIANGLE_1: "ST1",
    PieceKind.SMALL_TRIANGLE_2: "ST2",
    PieceKind.SQUARE: "SQ",
    PieceKind.PARALLELOGRAM: "PG",
}
KIND_BY_LABEL: dict[str, PieceKind] = {v: k for k, v in LABELS.items()}

KIND_ORDER: tuple[PieceKind, ...] = tuple(LABELS)


def edge_length(a: Point, b: Point) -> Scalar:
    dx = b.x - a.x
    dy = b.y - a.y
    sq = dx * dx + dy * dy
    if isinstance(sq, ExactValue):
        root = exact_sqrt(sq)
        if root is not None:
            return root
        return math.sqrt(sq.to_float())
    return math.sqrt(sq)


@dataclass(frozen=True)
class KindInfo:
    kind: PieceKind
    label: str
    polygon: Polygon
    area: ExactValue
    perimeter: ExactValue
    squared_edges: tuple[ExactValue, ...]
    reflection_allowed: bool


def _squared_edges(poly: Polygon) -> tuple[ExactValue, ...]:
    out = []
    for a, b in poly.edges():
        dx = b.x - a.x
        dy = b.y - a.y
        out.append(dx * dx + dy * dy)
    return tuple(sorted(out))


def _build_kind_info() -> dict[PieceKind, KindInfo]:
    from .geom import polygon_area, polygon_perimeter

    info = {}
    for kind in PieceKind:
        poly = _CANONICAL_RINGS[kind]
        info[kind] = KindInfo(
            kind=kind,
            label=LABELS[kind],
            polygon=poly,
            area=polygon_area(poly),
            perimeter=polygon_perimeter(poly),
            squared_edges=_squared_edges(poly),
            reflection_allowed=kind is PieceKind.PARALLELOGRAM,
        )
    return info


KIND_INFO: dict[PieceKind, KindInfo] = _build_kind_info()


@dataclass(frozen=True)
class PieceState:
    kind: PieceKind
    vertices: Polygon
    edges: tuple[tuple[int, int, Scalar], ...]
    center: Point
    transform: "RigidTransform | None" = None

    @property
    def label(self) -> str:
        return LABELS[self.kind]


@dataclass(frozen=True)
class Outline:
    vertices: Polygon
    edges: tuple[tuple[int, int, Scalar], ...]


@dataclass(frozen=True)
class TceInstance:
    instance_id: str
    target_outline: Outline
    initial_state: tuple[PieceState, ...]
    final_state: tuple[PieceState, ...]
    adjacency_graph: frozenset[tuple[str, str]]


def centroid(poly: Polygon) -> Point:
    n = len(poly.vertices)
    sx: Scalar = ExactValue(0)
    sy: Scalar = ExactValue(0)
    for p in poly.vertices:
        sx = sx + p.x
        sy = sy + p.y
    inv = Fraction(1, n)
    if isinstance(sx, ExactValue):
        sx = sx * inv
    else:
        sx = sx / n
    if isinstance(sy, ExactValue):
        sy = sy * inv
    else:
        sy = sy / n
    return Point(sx, sy)


def ring_edges(poly: Polygon) -> tuple[tuple[int, int, Scalar], ...]:
    n = len(poly.vertices)
    out = []
    for i in range(n):
        j = (i + 1) % n
        out.append((i, j, edge_length(poly.vertices[i], poly.vertices[j])))
    return tuple(out)


def make_outline(poly: Polygon) -> Outline:
    return Outline(vertices=poly, edges=ring_edges(poly))


def make_piece_state(
    kind: PieceKind,
    poly: "Polygon | None" = None,
    transform: "RigidTransform | None" = None,
) -> PieceState:
    if poly is None:
        poly = (
            KIND_INFO[kind].polygon
            if transform is None
            else apply(transform, KIND_INFO[kind].polygon)
        )
    return PieceState(
        kind=kind,
        vertices=poly,
        edges=ring_edges(poly),
        center=centroid(poly),
        transform=transform,
    )


def canonical_pieces() -> tuple[PieceState, ...]:
    """The fixed seven-piece inventory at its canonical poses."""
    return tuple(make_piece_state(kind) for kind in KIND_ORDER)


# ---------------------------------------------------------------------------
# TSE taxonomy and lenient parsing


class TseCode(str, Enum):
    UNPARSEABLE = "unparseable-document"
    MISSING_FIELD = "missing-field"
    BAD_PIECE_COUNT = "bad-piece-count"
    UNKNOWN_PIECE_TYPE = "unknown-piece-type"
    DUPLICATE_KIND = "duplicate-kind"
    BAD_COORDINATE = "bad-coordinate"
    BAD_EDGE_INDEX = "bad-edge-index"


@dataclass(frozen=True)
class TseViolation:
    code: TseCode
    detail: str


@dataclass
class TseReport:
    violations: list[TseViolation] = field(default_factory=list)

    def add(self, code: TseCode, detail: str) -> None:
        self.violations.append(TseViolation(code, detail))

    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[TseCode]:
        return {v.code for v in self.violations}


def _parse_value(raw: object, where: str, report: TseReport) -> "Scalar | None":
    if isinstance(raw, bool):
        report.add(TseCode.BAD_COORDINATE, f"{where}: boolean is not a number")
        return None
    if isinstance(raw, int):
        return ExactValue(raw)
    if isinstance(raw, float):
        return raw
    if isinstance(raw, str):
        try:
            return parse_scalar(raw)
        except ValueError as e:
            report.add(TseCode.BAD_COORDINATE, f"{where}: {e}")
            return None
    report.add(TseCode.BAD_COORDINATE, f"{where}: expected a value string")
    return None


def _parse_point(raw: object, where: str, report: TseReport) -> "Point | None":
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        report.add(TseCode.BAD_COORDINATE, f"{where}: expected an [x, y] pair")
        return None
    x = _parse_value(raw[0], f"{where}[0]", report)
    y = _parse_value(raw[1], f"{where}[1]", report)
    if x is None or y is None:
        return None
    return Point(x, y)


def _parse_ring(raw: object, where: str, report: TseReport) -> "Polygon | None":
    if not isinstance(raw, list):
        report.add(TseCode.BAD_COORDINATE, f"{where}: expected a vertex list")
        return None
    pts = []
    for k, entry in enumerate(raw):
        p = _parse_point(entry, f"{where}[{k}]", report)
        if p is None:
            return None
        pts.append(p)
    try:
        return Polygon(pts)
    except ValueError as e:
        report.add(TseCode.BAD_COORDINATE, f"{where}: {e}")
        return None


def _lengths_match(got: Scalar, want: Scalar) -> bool:
    if is_exact(got) and is_exact(want):
        return got == want
    return abs(float(got) - float(want)) <= LENGTH_TOL


def _parse_edges(
    raw: object, ring: "Polygon | None", where: str, report: TseReport
) -> tuple[tuple[int, int, Scalar], ...]:
    if not isinstance(raw, list):
        report.add(TseCode.BAD_EDGE_INDEX, f"{where}: expected an edge list")
        return ()
    n = len(ring.vertices) if ring is not None else 0
    out = []
    for k, entry in enumerate(raw):
        spot = f"{where}[{k}]"
        if not isinstance(entry, (list, tuple)) or len(entry) not in (2, 3):
            report.add(TseCode.BAD_EDGE_INDEX, f"{spot}: expected [i, j] or [i, j, length]")
            continue
        i, j = entry[0], entry[1]
        if not isinstance(i, int) or not isinstance(j, int) or isinstance(i, bool) or isinstance(j, bool):
            report.add(TseCode.BAD_EDGE_INDEX, f"{spot}: indices must be integers")
            continue
        if ring is None:
            continue
        if not (0 <= i < n and 0 <= j < n) or i == j:
            report.add(TseCode.BAD_EDGE_INDEX, f"{spot}: index out of range")
            continue
        want = edge_length(ring.vertices[i], ring.vertices[j])
        if len(entry) == 3:
            got = _parse_value(entry[2], f"{spot}[2]", report)
            if got is None:
                report.add(TseCode.BAD_EDGE_INDEX, f"{spot}: unreadable length")
                continue
            if not _lengths_match(got, want):
                report.add(TseCode.BAD_EDGE_INDEX, f"{spot}: stated length disagrees with vertices")
                continue
            out.append((i, j, got))
        else:
            out.append((i, j, want))
    return tuple(out)


def _parse_outline(raw: object, report: TseReport) -> "Outline | None":
    if not isinstance(raw, dict):
        report.add(TseCode.MISSING_FIELD, "target_outline: expected an object")
        return None
    if "vertices" not in raw:
        report.add(TseCode.MISSING_FIELD, "target_outline.vertices")
        return None
    ring = _parse_ring(raw["vertices"], "target_outline.vertices", report)
    if ring is None:
        return None
    if "edges" in raw:
        edges = _parse_edges(raw["edges"], ring, "target_outline.edges", report)
    else:
        report.add(TseCode.MISSING_FIELD, "target_outline.edges")
        edges = ring_edges(ring)
    if not edges:
        edges = ring_edges(ring)
    return Outline(vertices=ring, edges=edges)


def _parse_matrix(raw: object, where: str, report: TseReport) -> "RigidTransform | None":
    if (
        not isinstance(raw, list)
        or len(raw) != 3
        or any(not isinstance(r, (list, tuple)) or len(r) != 3 for r in raw)
    ):
        report.add(TseCode.BAD_COORDINATE, f"{where}: expected a 3x3 matrix")
        return None
    rows = []
    for ri, row in enumerate(raw):
        vals = []
        for ci, cell in enumerate(row):
            v = _parse_value(cell, f"{where}[{ri}][{ci}]", report)
            if v is None:
                return None
            vals.append(v)
        rows.append(vals)
    return RigidTransform(rows)


def _parse_piece(raw: object, where: str, report: TseReport) -> "PieceState | None":
    if not isinstance(raw, dict):
        report.add(TseCode.MISSING_FIELD, f"{where}: expected an object")
        return None
    kind_raw = raw.get("type")
    if kind_raw is None:
        report.add(TseCode.MISSING_FIELD, f"{where}.type")
        return None
    try:
        kind = PieceKind(kind_raw)
    except ValueError:
        report.add(TseCode.UNKNOWN_PIECE_TYPE, f"{where}.type: {kind_raw!r}")
        return None
    if "vertices" not in raw:
        report.add(TseCode.MISSING_FIELD, f"{where}.vertices")
        return None
    ring = _parse_ring(raw["vertices"], f"{where}.vertices", report)
    if ring is None:
        return None
    if "edges" in raw:
        edges = _parse_edges(raw["edges"], ring, f"{where}.edges", report)
        if not edges:
            edges = ring_edges(ring)
    else:
        report.add(TseCode.MISSING_FIELD, f"{where}.edges")
        edges = ring_edges(ring)
    if "center" in raw:
        center = _parse_point(raw["center"], f"{where}.center", report)
        if center is None:
            center = centroid(ring)
    else:
        report.add(TseCode.MISSING_FIELD, f"{where}.center")
        center = centroid(ring)
    transform = None
    if "transform_matrix" in raw:
        transform = _parse_matrix(raw["transform_matrix"], f"{where}.transform_matrix", report)
    return PieceState(kind=kind, vertices=ring, edges=edges, center=center, transform=transform)


def _parse_state(raw: object, where: str, report: TseReport) -> tuple[PieceState, ...]:
    if not isinstance(raw, list):
        report.add(TseCode.MISSING_FIELD, f"{where}: expected a piece list")
        return ()
    if len(raw) != 7:
        report.add(TseCode.BAD_PIECE_COUNT, f"{where}: {len(raw)} pieces")
    pieces = []
    seen: dict[PieceKind, int] = {}
    for k, entry in enumerate(raw):
        piece = _parse_piece(entry, f"{where}[{k}]", report)
        if piece is None:
            continue
        seen[piece.kind] = seen.get(piece.kind, 0) + 1
        if seen[piece.kind] == 2:
            report.add(TseCode.DUPLICATE_KIND, f"{where}: second {piece.kind.value}")
        pieces.append(piece)
    return tuple(pieces)


def _parse_adjacency(
    raw: object, report: TseReport
) -> frozenset[tuple[str, str]]:
    if not isinstance(raw, list):
        report.add(TseCode.MISSING_FIELD, "adjacency_graph: expected a list")
        return frozenset()
    pairs = set()
    for k, entry in enumerate(raw):
        spot = f"adjacency_graph[{k}]"
        if (
            not isinstance(entry, (list, tuple))
            or len(entry) != 2
            or not all(isinstance(x, str) for x in entry)
        ):
            report.add(TseCode.BAD_EDGE_INDEX, f"{spot}: expected a label pair")
            continue
        a, b = entry
        if a not in KIND_BY_LABEL or b not in KIND_BY_LABEL:
            report.add(TseCode.BAD_EDGE_INDEX, f"{spot}: unknown label")
            continue
        if a == b:
            report.add(TseCode.BAD_EDGE_INDEX, f"{spot}: self-adjacency")
            continue
        pairs.add((min(a, b), max(a, b)))
    return frozenset(pairs)


def parse_tce(doc: str) -> tuple["TceInstance | None", TseReport]:
    """Lenient TCE parse: best-effort instance plus every violation found.

    Returns (None, report) only when nothing evaluable can be
    recovered: unparseable JSON, a non-object document, or a missing or
    unusable target outline or final state.
    """
    report = TseReport()
    try:
        data = json.loads(doc)
    except (json.JSONDecodeError, RecursionError) as e:
        report.add(TseCode.UNPARSEABLE, str(e))
        return None, report
    if not isinstance(data, dict):
        report.add(TseCode.UNPARSEABLE, "document is not a JSON object")
        return None, report

    instance_id = data.get("instance_id")
    if not isinstance(instance_id, str):
        report.add(TseCode.MISSING_FIELD, "instance_id")
        instance_id = ""

    if "target_outline" not in data:
        report.add(TseCode.MISSING_FIELD, "target_outline")
        outline = None
    else:
        outline = _parse_outline(data["target_outline"], report)

    if "initial_state" not in data:
        report.add(TseCode.MISSING_FIELD, "initial_state")
        initial: tuple[PieceState, ...] = ()
    else:
        initial = _parse_state(data["initial_state"], "initial_state", report)

    if "final_state" not in data:
        report.add(TseCode.MISSING_FIELD, "final_state")
        final: tuple[PieceState, ...] = ()
    else:
        final = _parse_state(data["final_state"], "final_state", report)

    if "adjacency_graph" not in data:
        report.add(TseCode.MISSING_FIELD, "adjacency_graph")
        adjacency: frozenset[tuple[str, str]] = frozenset()
    else:
        adjacency = _parse_adjacency(data["adjacency_graph"], report)

    if outline is None or not final:
        return None, report
    return (
        TceInstance(
            instance_id=instance_id,
            target_outline=outline,
            initial_state=initial,
            final_state=final,
            adjacency_graph=adjacency,
        ),
        report,
    )


# ---------------------------------------------------------------------------
# serialization


def _ser_point(p: Point) -> list[str]:
    return [format_scalar(p.x), format_scalar(p.y)]


def _ser_piece(piece: PieceState) -> dict:
    out: dict = {
        "type": piece.kind.value,
        "vertices": [_ser_point(v) for v in piece.vertices.vertices],
        "edges": [[i, j, format_scalar(length)] for i, j, length in piece.edges],
        "center": _ser_point(piece.center),
    }
    if piece.transform is not None:
        out["transform_matrix"] = [
            [format_scalar(v) for v in row] for row in piece.transform.rows
        ]
    return out


def _render_json(obj: object, indent: int) -> str:
    # one line when short, otherwise break one level and recurse
    flat = json.dumps(obj, separators=(", ", ": "))
    if len(flat) <= 72:
        return flat
    pad = "  " * (indent + 1)
    close = "  " * indent
    if isinstance(obj, dict):
        body = ",\n".join(
            f"{pad}{json.dumps(k)}: {_render_json(v, indent + 1)}" for k, v in obj.items()
        )
        return "{\n" + body + "\n" + close + "}"
    if isinstance(obj, list):
        body = ",\n".join(f"{pad}{_render_json(v, indent + 1)}" for v in obj)
        return "[\n" + body + "\n" + close + "]"
    return flat


def serialize_tce(instance: TceInstance) -> str:
    """Canonical TCE text: fixed key order, value-string formatting."""
    doc = {
        "instance_id": instance.instance_id,
        "target_outline": {
            "vertices": [_ser_point(v) for v in instance.target_outline.vertices.vertices],
            "edges": [[i, j] for i, j, _ in instance.target_outline.edges],
        },
        "initial_state": [_ser_piece(p) for p in instance.initial_state],
        "final_state": [_ser_piece(p) for p in instance.final_state],
        "adjacency_graph": [list(pair) for pair in sorted(instance.adjacency_graph)],
    }
    return _render_json(doc, 0) + "\n"


# ---------------------------------------------------------------------------
# silhouette congruence


_ROTATIONS = tuple(
    RigidTransform.from_parts(deg, False, (0, 0)) for deg in range(0, 360, 45)
)
_REFLECTIONS = tuple(
    RigidTransform.from_parts(deg, True, (0, 0)) for deg in range(0, 360, 45)
)


def _canonical_ring_key(poly: Polygon) -> tuple:
    vs = poly.vertices
    min_x = min(v.x for v in vs)
    min_y = min(v.y for v in vs)
    shifted = [(v.x - min_x, v.y - min_y) for v in vs]
    start = min(range(len(shifted)), key=lambda i: (shifted[i][0], shifted[i][1]))
    ordered = shifted[start:] + shifted[:start]
    return tuple((x, y) for x, y in ordered)


def congruent_silhouettes(a: Outline, b: Outline) -> bool:
    """True iff some 45°-lattice symmetry plus translation maps a onto b."""
    if not a.vertices.is_exact() or not b.vertices.is_exact():
        raise ValueError("congruence requires exact outlines")
    if len(a.vertices) != len(b.vertices):
        return False
    target = _canonical_ring_key(b.vertices)
    for sym in _ROTATIONS + _REFLECTIONS:
        image = apply(sym, a.vertices)
        if _canonical_ring_key(image) == target:
            return True
    return False
