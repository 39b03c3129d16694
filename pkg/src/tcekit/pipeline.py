"""Corpus construction: snapping, normalization, task generation, rendering.

Raw assemblies arrive as line-delimited JSON of floating-point piece
rings exported by the annotation studio.  The pipeline filters them on
topology, snaps every coordinate onto the quarter-integer √2 lattice,
translates the scene onto the axes, rederives transforms, outline, and
adjacency, and emits verifier-valid instances.  On top of that it builds
the two task payloads: multiple-choice silhouette items and solution
prompts (full and visual-centric variants), plus deterministic SVG
renderings for both.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from string import Template
from typing import Iterable, Sequence

from .exactnum import ExactValue, format_scalar
from .geom import Polygon, RigidTransform, SegmentSet, apply, union_info
from .tangram import (
    KIND_INFO,
    KIND_ORDER,
    LABELS,
    Outline,
    PieceKind,
    PieceState,
    TceInstance,
    _render_json,
    _ser_piece,
    _ser_point,
    canonical_pieces,
    congruent_silhouettes,
    make_outline,
    make_piece_state,
    serialize_tce,
)
from .verify import EvalConfig, VerificationRecord, evaluate

DEFAULT_SNAP_TOL = 1e-3
SNAP_MAX_COEFF = 64
SNAP_DENOMS = (1, 2, 4)

_SQRT2 = math.sqrt(2.0)


class SnapError(ValueError):
    """A coordinate has no lattice value within tolerance."""


class NormalizationError(ValueError):
    """The snapped assembly failed verification."""

    def __init__(self, message: str, record: "VerificationRecord | None" = None):
        super().__init__(message)
        self.record = record


# ---------------------------------------------------------------------------
# snapping


def _spiral(limit: int) -> Iterable[int]:
    yield 0
    for k in range(1, limit + 1):
        yield k
        yield -k


def snap_scalar(x: float, tol: float = DEFAULT_SNAP_TOL) -> ExactValue:
    """Nearest lattice value (a + b√2)/d, |a|,|b| ≤ 64, d ∈ {1, 2, 4}.

    For each (d, b) only the optimal integer a is a candidate, so the
    search touches 3·129 points.  Selection runs in floats (distinct
    lattice values are ≥ 3e-3 apart, far above float noise), then the
    winner's residual is compared against the tolerance exactly.  Ties
    resolve toward smaller d, then smaller |b|.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if not math.isfinite(x):
        raise SnapError(f"non-finite coordinate {x!r}")
    best: "tuple[int, int, int] | None" = None
    best_err = math.inf
    for d in SNAP_DENOMS:
        for b in _spiral(SNAP_MAX_COEFF):
            a = round(x * d - b * _SQRT2)
            a = max(-SNAP_MAX_COEFF, min(SNAP_MAX_COEFF, a))
            err = abs(x - (a + b * _SQRT2) / d)
            if err < best_err:
                best, best_err = (a, b, d), err
    assert best is not None
    a, b, d = best
    value = ExactValue(Fraction(a, d), Fraction(b, d))
    residual = abs(ExactValue(Fraction(x)) - value)
    if residual > Fraction(tol):
        raise SnapError(f"{x!r} is {best_err:.3g} from the nearest lattice value")
    return value


def _snap_assembly(a: "RawAssembly", tol: float) -> dict[PieceKind, Polygon]:
    """Translate onto the axes in floats, then snap every coordinate.

    Translation comes first: the scene may carry a global drift that is
    itself no lattice value, and it must not defeat snapping.  The
    snapped minimum is re-pinned to exactly zero afterwards.
    """
    minx = min(x for _, ring in a.pieces for x, _ in ring)
    miny = min(y for _, ring in a.pieces for _, y in ring)
    out: dict[PieceKind, Polygon] = {}
    for kind, ring in a.pieces:
        if kind in out:
            raise ValueError(f"duplicate piece kind {kind.value}")
        out[kind] = Polygon(
            [(snap_scalar(x - minx, tol), snap_scalar(y - miny, tol)) for x, y in ring]
        )
    return out


# ---------------------------------------------------------------------------
# raw assemblies


@dataclass(frozen=True)
class RawAssembly:
    """One annotation-studio export line: seven float piece rings."""

    instance_id: "str | None"
    pieces: tuple[tuple[PieceKind, tuple[tuple[float, float], ...]], ...]


def parse_raw(line: str) -> RawAssembly:
    doc = json.loads(line)
    if not isinstance(doc, dict) or not isinstance(doc.get("pieces"), list):
        raise ValueError("raw assembly must be an object with a pieces list")
    pieces: list[tuple[PieceKind, tuple[tuple[float, float], ...]]] = []
    try:
        for entry in doc["pieces"]:
            kind = PieceKind(entry["type"])
            ring = tuple((float(p[0]), float(p[1])) for p in entry["vertices"])
            if len(ring) < 3:
                raise ValueError("piece ring needs at least 3 vertices")
            if not all(math.isfinite(x) and math.isfinite(y) for x, y in ring):
                raise ValueError("non-finite coordinate in piece ring")
            pieces.append((kind, ring))
    except (KeyError, IndexError, TypeError) as exc:
        raise ValueError(f"malformed piece record: {exc}") from None
    if len(pieces) != 7:
        raise ValueError(f"expected 7 pieces, got {len(pieces)}")
    ident = doc.get("instance_id")
    return RawAssembly(ident if isinstance(ident, str) else None, tuple(pieces))


@dataclass(frozen=True)
class FilterResult:
    accepted: bool
    reason: "str | None" = None


def filter_raw(a: RawAssembly, tol: float = DEFAULT_SNAP_TOL) -> FilterResult:
    """Mirror the upstream topology criteria on the snapped assembly.

    Overlap is deliberately not checked here; the verifier owns that.
    """
    if {kind for kind, _ in a.pieces} != set(PieceKind):
        return FilterResult(False, "incomplete")
    try:
        polys = list(_snap_assembly(a, tol).values())
    except ValueError:
        # SnapError or a ring collapsing to a degenerate polygon
        return FilterResult(False, "unsnappable")
    info = union_info(polys)
    if info.components != 1:
        return FilterResult(False, "disconnected")
    if info.holes > 0:
        return FilterResult(False, "holes")
    return FilterResult(True)


# ---------------------------------------------------------------------------
# normalization


_SIXTEEN = tuple(
    (angle, reflected) for reflected in (False, True) for angle in range(0, 360, 45)
)


def _derive_transform(kind: PieceKind, placed: Polygon) -> RigidTransform:
    canon = KIND_INFO[kind].polygon
    n = len(canon.vertices)
    if len(placed.vertices) != n:
        raise NormalizationError(f"{LABELS[kind]} has {len(placed.vertices)} vertices")
    for angle, reflected in _SIXTEEN:
        spun = apply(RigidTransform.from_parts(angle, reflected, (0, 0)), canon)
        for shift in range(n):
            tx = placed.vertices[shift].x - spun.vertices[0].x
            ty = placed.vertices[shift].y - spun.vertices[0].y
            if all(
                placed.vertices[(shift + k) % n].x == spun.vertices[k].x + tx
                and placed.vertices[(shift + k) % n].y == spun.vertices[k].y + ty
                for k in range(n)
            ):
                return RigidTransform.from_parts(angle, reflected, (tx, ty))
    raise NormalizationError(f"{LABELS[kind]} is not a lattice motion of its canon")


def _chain_ring(segs: SegmentSet) -> Polygon:
    nxt = {a: b for a, b in segs}
    if len(nxt) != len(segs):
        raise NormalizationError("outline is not a single simple loop")
    start = segs[0][0]
    ring = [start]
    cur = nxt[start]
    while cur != start:
        ring.append(cur)
        cur = nxt[cur]
    if len(ring) != len(segs):
        raise NormalizationError("outline is not a single simple loop")
    return Polygon(ring)


def _lex_rotated(poly: Polygon) -> Polygon:
    verts = poly.vertices
    k = min(range(len(verts)), key=lambda i: (verts[i].x, verts[i].y))
    return Polygon(verts[k:] + verts[:k])


def _content_id(pieces: Sequence[PieceState]) -> str:
    text = "\n".join(
        ";".join(f"{format_scalar(v.x)},{format_scalar(v.y)}" for v in p.vertices.vertices)
        for p in pieces
    )
    return "tce-" + hashlib.sha1(text.encode()).hexdigest()[:10]


def normalize(
    a: RawAssembly,
    tol: float = DEFAULT_SNAP_TOL,
    cfg: EvalConfig = EvalConfig(),
) -> TceInstance:
    """Snap, translate onto the axes, rederive structure, and verify.

    Idempotent: feeding a normalized instance's float rings back in
    reproduces the instance, since snapping inverts to_float on the
    lattice and the placement is already canonical.
    """
    by_kind = _snap_assembly(a, tol)
    if set(by_kind) != set(PieceKind):
        raise NormalizationError("assembly does not contain all 7 kinds")

    # the float pre-translation leaves the snapped minimum at a lattice
    # value near zero; pin it to exactly zero
    minx = min(v.x for p in by_kind.values() for v in p.vertices)
    miny = min(v.y for p in by_kind.values() for v in p.vertices)
    moved = {
        kind: Polygon([(v.x - minx, v.y - miny) for v in p.vertices])
        for kind, p in by_kind.items()
    }

    final: list[PieceState] = []
    for kind in KIND_ORDER:
        transform = _derive_transform(kind, moved[kind])
        final.append(make_piece_state(kind, transform=transform))

    polys = [p.vertices for p in final]
    info = union_info(polys)
    outline = make_outline(_lex_rotated(_chain_ring(info.boundary)))
    labels = [LABELS[k] for k in KIND_ORDER]
    adjacency = frozenset(
        tuple(sorted((labels[i], labels[j]))) for i, j in info.adjacency
    )

    instance = TceInstance(
        instance_id=a.instance_id or _content_id(final),
        target_outline=outline,
        initial_state=canonical_pieces(),
        final_state=tuple(final),
        adjacency_graph=adjacency,
    )
    record = evaluate(serialize_tce(instance), instance, cfg)
    if not record.vpr_pass:
        flags = [
            name
            for name, on in (("tse", record.tse), ("rge", record.rge), ("pe", record.pe))
            if on
        ]
        raise NormalizationError(
            f"snapped assembly fails verification ({', '.join(flags)})", record
        )
    return instance


# ---------------------------------------------------------------------------
# Task 1: multiple choice


@dataclass(frozen=True)
class McItem:
    """Four labeled silhouettes, exactly one congruent to the truth."""

    instance_id: str
    options: tuple[tuple[str, Outline], ...]  # (source id, silhouette), A..D
    answer_key: str
    image_svg: str
    shuffle_seed: int


def gen_task1(
    instance: TceInstance,
    pool: Sequence[tuple[str, Outline]],
    seed: int,
) -> McItem:
    """Seeded distractor sampling; options are pairwise non-congruent."""
    truth = instance.target_outline
    rng = random.Random(seed)
    eligible = [
        (pid, outline)
        for pid, outline in pool
        if not congruent_silhouettes(outline, truth)
    ]
    rng.shuffle(eligible)
    chosen: list[tuple[str, Outline]] = []
    for pid, outline in eligible:
        if all(not congruent_silhouettes(outline, kept) for _, kept in chosen):
            chosen.append((pid, outline))
            if len(chosen) == 3:
                break
    if len(chosen) < 3:
        raise ValueError("pool has fewer than 3 non-congruent distractors")
    entries = [(True, instance.instance_id, truth)] + [
        (False, pid, outline) for pid, outline in chosen
    ]
    rng.shuffle(entries)
    answer_key = "ABCD"[next(i for i, e in enumerate(entries) if e[0])]
    options = tuple((pid, outline) for _, pid, outline in entries)
    return McItem(
        instance_id=instance.instance_id,
        options=options,
        answer_key=answer_key,
        image_svg=_render_grid([outline for _, outline in options]),
        shuffle_seed=seed,
    )


def mc_sidecar(item: McItem) -> dict:
    return {
        "instance_id": item.instance_id,
        "answer": item.answer_key,
        "seed": item.shuffle_seed,
        "options": [pid for pid, _ in item.options],
    }


# ---------------------------------------------------------------------------
# Task 2: prompt bundles


@dataclass(frozen=True)
class PromptBundle:
    instance_id: str
    text: str
    image_svg: str
    variant: str
    exemplars: tuple[str, ...]


def _outline_block(outline: Outline) -> str:
    doc = {
        "vertices": [_ser_point(v) for v in outline.vertices.vertices],
        "edges": [[i, j, format_scalar(length)] for i, j, length in outline.edges],
    }
    return _render_json(doc, 0)


def _pieces_block(pieces: Sequence[PieceState]) -> str:
    return _render_json([_ser_piece(p) for p in pieces], 0)


def _load_template(name: str) -> Template:
    path = resources.files("tcekit").joinpath("templates").joinpath(name)
    return Template(path.read_text(encoding="utf-8"))


def gen_task2(
    instance: TceInstance,
    variant: str = "full",
    exemplars: Sequence["TceInstance | str"] = (),
) -> PromptBundle:
    if variant not in ("full", "visual_centric"):
        raise ValueError(f"unknown variant {variant!r}")
    solved = tuple(
        e if isinstance(e, str) else serialize_tce(e) for e in exemplars
    )
    if solved:
        shots = "".join(
            f"Solved example {k + 1}:\n\n{text}\n" for k, text in enumerate(solved)
        )
        exemplar_block = shots + "\n"
    else:
        exemplar_block = ""
    template = _load_template(f"task2_{variant}.txt")
    text = template.substitute(
        exemplar_block=exemplar_block,
        instance_id=instance.instance_id,
        outline_block=_outline_block(instance.target_outline),
        pieces_block=_pieces_block(instance.initial_state),
    )
    return PromptBundle(
        instance_id=instance.instance_id,
        text=text,
        image_svg=render_svg(instance.target_outline, annotate=True),
        variant=variant,
        exemplars=solved,
    )


# ---------------------------------------------------------------------------
# SVG rendering


_PIECE_FILL = {
    PieceKind.LARGE_TRIANGLE_1: "#e4572e",
    PieceKind.LARGE_TRIANGLE_2: "#f3a712",
    PieceKind.MEDIUM_TRIANGLE: "#29335c",
    PieceKind.SMALL_TRIANGLE_1: "#669bbc",
    PieceKind.SMALL_TRIANGLE_2: "#a8c686",
    PieceKind.SQUARE: "#8e7dbe",
    PieceKind.PARALLELOGRAM: "#d81159",
}

_SILHOUETTE_FILL = "#333333"


def _fmt(v: float) -> str:
    out = f"{v:.6g}"
    return "0" if out == "-0" else out


def _ring_path(poly: Polygon) -> str:
    # y is negated so the scene's up stays up in screen space
    cmds = [
        f"{'M' if i == 0 else 'L'} {_fmt(x)} {_fmt(-y)}"
        for i, (x, y) in enumerate(poly.to_float_ring())
    ]
    return " ".join(cmds) + " Z"


def _view_box(polys: Sequence[Polygon]) -> tuple[float, float, float, float]:
    xs = [x for p in polys for x, _ in p.to_float_ring()]
    ys = [y for p in polys for _, y in p.to_float_ring()]
    minx, maxx = min(xs), max(xs)
    miny, maxy = min(ys), max(ys)
    margin = 0.05 * max(maxx - minx, maxy - miny, 1e-9)
    return (
        minx - margin,
        -(maxy + margin),
        (maxx - minx) + 2 * margin,
        (maxy - miny) + 2 * margin,
    )


def _svg(view: tuple[float, float, float, float], body: str) -> str:
    vb = " ".join(_fmt(v) for v in view)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vb}">\n{body}</svg>\n'
    )


def _render_outline(outline: Outline, annotate: bool) -> str:
    poly = outline.vertices
    view = _view_box([poly])
    parts = [f'<path d="{_ring_path(poly)}" fill="{_SILHOUETTE_FILL}"/>\n']
    if annotate:
        size = _fmt(max(view[2], view[3]) * 0.03)
        for v in poly.vertices:
            x, y = v.to_floats()
            label = f"({format_scalar(v.x)}, {format_scalar(v.y)})"
            parts.append(
                f'<text x="{_fmt(x)}" y="{_fmt(-y)}" font-size="{size}" '
                f'fill="#c1121f">{_escape(label)}</text>\n'
            )
    return _svg(view, "".join(parts))


def _render_assembly(pieces: Sequence[PieceState]) -> str:
    polys = [p.vertices for p in pieces]
    view = _view_box(polys)
    stroke = _fmt(max(view[2], view[3]) * 0.004)
    body = "".join(
        f'<path d="{_ring_path(p.vertices)}" fill="{_PIECE_FILL[p.kind]}" '
        f'stroke="#1a1a1a" stroke-width="{stroke}"/>\n'
        for p in pieces
    )
    return _svg(view, body)


def _render_grid(options: Sequence[Outline]) -> str:
    # 2x2 panel of silhouettes, labeled A through D
    cells = []
    for idx, outline in enumerate(options):
        col, row = idx % 2, idx // 2
        inner = _render_outline(outline, annotate=False)
        x, y = 10 + col * 110, 22 + row * 122
        cells.append(
            f'<text x="{x + 45}" y="{y - 4}" font-size="12" text-anchor="middle" '
            f'fill="#1a1a1a">{"ABCD"[idx]}</text>\n'
            f'<g transform="translate({x},{y})">'
            f'<svg width="90" height="100" viewBox="{_inner_view(inner)}" '
            f'preserveAspectRatio="xMidYMid meet">{_inner_body(inner)}</svg></g>\n'
        )
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 230 260">\n'
        + "".join(cells)
        + "</svg>\n"
    )


def _inner_view(svg: str) -> str:
    start = svg.index('viewBox="') + len('viewBox="')
    return svg[start : svg.index('"', start)]


def _inner_body(svg: str) -> str:
    start = svg.index(">") + 1
    return svg[start : svg.rindex("</svg>")].strip()


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_svg(subject, *, annotate: bool = False) -> str:
    """Deterministic vector rendering of an outline, assembly, or item."""
    if isinstance(subject, Outline):
        return _render_outline(subject, annotate)
    if isinstance(subject, McItem):
        return _render_grid([outline for _, outline in subject.options])
    if isinstance(subject, Sequence) and subject and isinstance(subject[0], PieceState):
        return _render_assembly(subject)
    raise TypeError(f"cannot render {type(subject).__name__}")
