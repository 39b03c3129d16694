"""Two-stage assembly verification.

Stage 1 grades a submission against hard constraints: schema conformance
(TSE, from the codec's violation report), rigid-shape preservation per
piece (RGE), and physical feasibility of the whole assembly (PE: pairwise
overlap, global connectivity).  A submission passes validation (VPR) only
when all three flags are clear.

Stage 2 scores silhouette fidelity against the target outline with area
IoU and boundary Hausdorff distance.  It runs whenever a piece list was
recoverable, even if Stage 1 failed, so near-miss output still gets a
quality score; only an unparseable submission is scored 0 / infinity.

The flags are independent: one record can carry schema violations, rigid
distortions, and overlaps at the same time, so corpus rates need not sum
to anything in particular.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import ClassVar, Sequence

from .geom import (
    DEFAULT_HAUSDORFF_RESOLUTION,
    Polygon,
    UnionInfo,
    boundary_of,
    hausdorff,
    intersection_area,
    iou,
    polygon_area,
    polygon_perimeter,
    union_info,
)
from .tangram import (
    KIND_INFO,
    PieceState,
    TceInstance,
    TseReport,
    _squared_edges,
    parse_tce,
)

RGE_REL_TOL = 1e-4
OVERLAP_TOL = 1e-6


@dataclass(frozen=True)
class EvalConfig:
    """Knobs for the verifier; the defaults are the published thresholds."""

    resolution: float = DEFAULT_HAUSDORFF_RESOLUTION
    iou_threshold: float = 0.99
    hausdorff_threshold: float = 0.05
    rge_rel_tol: float = RGE_REL_TOL
    overlap_tol: float = OVERLAP_TOL


@dataclass(frozen=True)
class RigidIssue:
    """Relative area and perimeter deviation of one distorted piece."""

    label: str
    area_delta: float
    perimeter_delta: float


@dataclass(frozen=True)
class PhysicsIssue:
    overlap_pairs: tuple[tuple[str, str], ...]
    component_count: int


@dataclass(frozen=True)
class VerificationRecord:
    instance_id: str
    tse: bool
    tse_report: TseReport
    rge: bool
    rge_issues: tuple[RigidIssue, ...]
    pe: bool
    pe_issue: "PhysicsIssue | None"
    vpr_pass: bool
    iou: float
    hausdorff: float
    success: bool


def check_rigid(piece: PieceState, rel_tol: float = RGE_REL_TOL) -> "RigidIssue | None":
    """Compare one placed piece against its canonical shape.

    Exact coordinates must reproduce the canonical area and the sorted
    multiset of squared edge lengths exactly (which pins the perimeter
    without ever taking a square root).  Decimal coordinates get a
    relative tolerance on area and perimeter instead.
    """
    info = KIND_INFO[piece.kind]
    poly = piece.vertices
    if poly.is_exact():
        if polygon_area(poly) == info.area and _squared_edges(poly) == info.squared_edges:
            return None
    else:
        area_delta = abs(float(polygon_area(poly)) - float(info.area)) / float(info.area)
        per_delta = abs(
            float(polygon_perimeter(poly)) - float(info.perimeter)
        ) / float(info.perimeter)
        if area_delta <= rel_tol and per_delta <= rel_tol:
            return None
    area_delta = abs(float(polygon_area(poly)) - float(info.area)) / float(info.area)
    per_delta = abs(float(polygon_perimeter(poly)) - float(info.perimeter)) / float(
        info.perimeter
    )
    return RigidIssue(piece.label, area_delta, per_delta)


def _physics_issue(
    pieces: Sequence[PieceState], info: UnionInfo, overlap_tol: float
) -> "PhysicsIssue | None":
    polys = [p.vertices for p in pieces]
    exact = all(p.is_exact() for p in polys)
    pairs: list[tuple[str, str]] = []
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            overlap = intersection_area(polys[i], polys[j])
            hit = overlap > 0 if exact else float(overlap) > overlap_tol
            if hit:
                a, b = sorted((pieces[i].label, pieces[j].label))
                pairs.append((a, b))
    if not pairs and info.components == 1:
        return None
    return PhysicsIssue(tuple(pairs), info.components)


def check_physics(
    pieces: Sequence[PieceState], overlap_tol: float = OVERLAP_TOL
) -> "PhysicsIssue | None":
    """Flag pairwise overlap or a disconnected union.

    Connectivity requires shared boundary of positive length; touching
    at a single point leaves two pieces in separate components.
    """
    if not pieces:
        return PhysicsIssue((), 0)
    info = union_info([p.vertices for p in pieces])
    return _physics_issue(pieces, info, overlap_tol)


def evaluate(
    submission: str, truth: TceInstance, cfg: EvalConfig = EvalConfig()
) -> VerificationRecord:
    """Grade one submitted document against a ground-truth instance."""
    inst, report = parse_tce(submission)
    tse = not report.ok()
    if inst is None:
        return VerificationRecord(
            instance_id=truth.instance_id,
            tse=True,
            tse_report=report,
            rge=False,
            rge_issues=(),
            pe=False,
            pe_issue=None,
            vpr_pass=False,
            iou=0.0,
            hausdorff=math.inf,
            success=False,
        )
    issues = tuple(
        issue
        for issue in (check_rigid(p, cfg.rge_rel_tol) for p in inst.final_state)
        if issue is not None
    )
    polys = [p.vertices for p in inst.final_state]
    info = union_info(polys)
    phys = _physics_issue(inst.final_state, info, cfg.overlap_tol)
    rge = bool(issues)
    pe = phys is not None
    vpr_pass = not (tse or rge or pe)

    target: Polygon = truth.target_outline.vertices
    iou_val = iou(polys, target)
    if info.boundary:
        hd = hausdorff(info.boundary, boundary_of(target), cfg.resolution)
    else:
        hd = math.inf
    success = (
        vpr_pass and iou_val >= cfg.iou_threshold and hd <= cfg.hausdorff_threshold
    )
    return VerificationRecord(
        instance_id=truth.instance_id,
        tse=tse,
        tse_report=report,
        rge=rge,
        rge_issues=issues,
        pe=pe,
        pe_issue=phys,
        vpr_pass=vpr_pass,
        iou=iou_val,
        hausdorff=hd,
        success=success,
    )


def record_line(rec: VerificationRecord) -> str:
    """One verification record as a single line of JSON."""
    doc = {
        "instance_id": rec.instance_id,
        "tse": rec.tse,
        "tse_codes": sorted(c.value for c in rec.tse_report.codes()),
        "rge": rec.rge,
        "rge_detail": [
            {
                "label": i.label,
                "area_delta": i.area_delta,
                "perimeter_delta": i.perimeter_delta,
            }
            for i in rec.rge_issues
        ],
        "pe": rec.pe,
        "pe_detail": None
        if rec.pe_issue is None
        else {
            "overlap_pairs": [list(p) for p in rec.pe_issue.overlap_pairs],
            "component_count": rec.pe_issue.component_count,
        },
        "vpr_pass": rec.vpr_pass,
        "iou": rec.iou,
        "hausdorff": None if math.isinf(rec.hausdorff) else rec.hausdorff,
        "success": rec.success,
    }
    return json.dumps(doc)


@dataclass(frozen=True)
class CorpusReport:
    """Aggregate rates over a corpus, rendered like the benchmark table."""

    count: int
    tse_rate: float
    rge_rate: float
    pe_rate: float
    vpr_rate: float
    mean_iou: float
    mean_hausdorff: float
    success_rate: float

    COLUMNS: ClassVar[tuple[str, ...]] = (
        "TSE",
        "RGE",
        "PE",
        "VPR",
        "IoU",
        "Hausdorff",
        "Success",
    )

    def row(self) -> tuple[str, ...]:
        return (
            f"{self.tse_rate:.2f}",
            f"{self.rge_rate:.2f}",
            f"{self.pe_rate:.2f}",
            f"{self.vpr_rate:.2f}",
            f"{self.mean_iou:.2f}",
            f"{self.mean_hausdorff:.4f}",
            f"{self.success_rate:.2f}",
        )

    def to_csv(self) -> str:
        return ",".join(self.COLUMNS) + "\n" + ",".join(self.row()) + "\n"

    def to_text(self) -> str:
        row = self.row()
        widths = [max(len(c), len(v)) for c, v in zip(self.COLUMNS, row)]
        head = "  ".join(c.rjust(w) for c, w in zip(self.COLUMNS, widths))
        body = "  ".join(v.rjust(w) for v, w in zip(row, widths))
        return head + "\n" + body + "\n"


def aggregate(records: Sequence[VerificationRecord]) -> CorpusReport:
    """Corpus rates as percentages; order-independent by construction.

    Means use exactly rounded summation, so shuffling the records cannot
    change any reported digit.  The Hausdorff mean skips the infinite
    sentinels of unparseable submissions.
    """
    if not records:
        raise ValueError("no records to aggregate")
    n = len(records)

    def rate(flags: Sequence[bool]) -> float:
        return 100.0 * sum(flags) / n

    finite = [r.hausdorff for r in records if math.isfinite(r.hausdorff)]
    return CorpusReport(
        count=n,
        tse_rate=rate([r.tse for r in records]),
        rge_rate=rate([r.rge for r in records]),
        pe_rate=rate([r.pe for r in records]),
        vpr_rate=rate([r.vpr_pass for r in records]),
        mean_iou=100.0 * math.fsum(r.iou for r in records) / n,
        mean_hausdorff=math.fsum(finite) / len(finite) if finite else math.inf,
        success_rate=rate([r.success for r in records]),
    )
