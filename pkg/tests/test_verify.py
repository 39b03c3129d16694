"""Tests for the two-stage verifier: constraint flags and silhouette metrics."""

import json
import math
import random

import pytest

from tcekit.exactnum import ExactValue
from tcekit.geom import Polygon, RigidTransform, apply
from tcekit.tangram import (
    KIND_ORDER,
    PieceKind,
    TceInstance,
    TseReport,
    make_outline,
    make_piece_state,
    serialize_tce,
)
from tcekit.verify import (
    CorpusReport,
    EvalConfig,
    VerificationRecord,
    aggregate,
    check_physics,
    check_rigid,
    evaluate,
    record_line,
)

E = ExactValue

# Hand-verified tiling of the 2x4 rectangle by all seven pieces.
RECT_TARGET = [(0, 0), (4, 0), (4, 2), (0, 2)]
RECT_RINGS = {
    PieceKind.LARGE_TRIANGLE_1: [(2, 0), (4, 0), (4, 2)],
    PieceKind.LARGE_TRIANGLE_2: [(2, 0), (4, 2), (2, 2)],
    PieceKind.MEDIUM_TRIANGLE: [(0, 0), (2, 0), (1, 1)],
    PieceKind.SMALL_TRIANGLE_1: [(0, 0), (1, 1), (0, 1)],
    PieceKind.SMALL_TRIANGLE_2: [(2, 1), (2, 2), (1, 2)],
    PieceKind.SQUARE: [(0, 1), (1, 1), (1, 2), (0, 2)],
    PieceKind.PARALLELOGRAM: [(1, 1), (2, 0), (2, 1), (1, 2)],
}


def rect_instance(rings=None, target=None) -> TceInstance:
    rings = rings if rings is not None else RECT_RINGS
    target = target if target is not None else RECT_TARGET
    return TceInstance(
        instance_id="rect-2x4",
        target_outline=make_outline(Polygon(target)),
        initial_state=tuple(
            make_piece_state(k) for k in KIND_ORDER
        ),
        final_state=tuple(
            make_piece_state(k, Polygon(rings[k])) for k in KIND_ORDER
        ),
        adjacency_graph=frozenset(),
    )


# ---------------------------------------------------------------------------
# check_rigid


def test_rigid_canonical_rotated_and_translated():
    piece = make_piece_state(
        PieceKind.SQUARE, transform=RigidTransform.from_parts(45, False, (3, 2))
    )
    assert check_rigid(piece) is None


def test_rigid_scaled_square_fails():
    piece = make_piece_state(
        PieceKind.SQUARE, Polygon([(0, 0), (2, 0), (2, 2), (0, 2)])
    )
    issue = check_rigid(piece)
    assert issue is not None
    assert issue.label == "SQ"
    assert issue.area_delta == pytest.approx(3.0)  # area 4 against 1


def test_rigid_moved_vertex_fails_on_perimeter():
    # shifting (0,1) to (0.1,1) shears the triangle: area stays 0.5
    # exactly, so only the perimeter catches it
    piece = make_piece_state(
        PieceKind.SMALL_TRIANGLE_1, Polygon([(0.0, 0.0), (1.0, 0.0), (0.1, 1.0)])
    )
    issue = check_rigid(piece)
    assert issue is not None
    assert issue.area_delta < 1e-12
    assert issue.perimeter_delta > 1e-3


def test_rigid_all_rect_assembly_pieces_pass():
    inst = rect_instance()
    assert all(check_rigid(p) is None for p in inst.final_state)


def test_rigid_reflection_is_invisible():
    # area and edge lengths cannot see a reflection; legality of
    # reflections is a placement question, not a rigidity one
    refl = RigidTransform([[-1, 0, 0], [0, 1, 0], [0, 0, 1]])
    for kind in (PieceKind.SMALL_TRIANGLE_1, PieceKind.PARALLELOGRAM):
        piece = make_piece_state(kind)
        mirrored = make_piece_state(kind, apply(refl, piece.vertices))
        assert check_rigid(mirrored) is None


def test_rigid_float_within_tolerance():
    c, s = math.cos(0.3), math.sin(0.3)  # any rigid angle preserves shape
    ring = [(c * x - s * y + 10.0, s * x + c * y - 4.0) for x, y in [(0, 0), (1, 0), (1, 1), (0, 1)]]
    assert check_rigid(make_piece_state(PieceKind.SQUARE, Polygon(ring))) is None


def test_rigid_float_tolerance_boundary():
    ring = [(0.0, 0.0), (1.001, 0.0), (1.001, 1.0), (0.0, 1.0)]
    issue = check_rigid(make_piece_state(PieceKind.SQUARE, Polygon(ring)))
    assert issue is not None  # area off by 1e-3 relative, over the 1e-4 line
    assert check_rigid(
        make_piece_state(
            PieceKind.SQUARE, Polygon([(0.0, 0.0), (1.00001, 0.0), (1.00001, 1.0), (0.0, 1.0)])
        )
    ) is None


# ---------------------------------------------------------------------------
# check_physics


def test_physics_rect_assembly_passes():
    assert check_physics(rect_instance().final_state) is None


def test_physics_coincident_triangles_overlap():
    rings = dict(RECT_RINGS)
    rings[PieceKind.LARGE_TRIANGLE_2] = rings[PieceKind.LARGE_TRIANGLE_1]
    issue = check_physics(rect_instance(rings).final_state)
    assert issue is not None
    assert ("LT1", "LT2") in issue.overlap_pairs


def test_physics_far_translation_disconnects():
    rings = dict(RECT_RINGS)
    rings[PieceKind.SMALL_TRIANGLE_2] = [(102, 1), (102, 2), (101, 2)]
    issue = check_physics(rect_instance(rings).final_state)
    assert issue is not None
    assert issue.overlap_pairs == ()
    assert issue.component_count == 2


def test_physics_canonical_pile_overlaps():
    pieces = tuple(make_piece_state(k) for k in KIND_ORDER)
    issue = check_physics(pieces)
    assert issue is not None
    assert issue.overlap_pairs


def test_physics_point_contact_is_disconnected():
    a = make_piece_state(PieceKind.SMALL_TRIANGLE_1, Polygon([(0, 0), (1, 0), (0, 1)]))
    b = make_piece_state(PieceKind.SMALL_TRIANGLE_2, Polygon([(1, 0), (2, 0), (1, 1)]))
    issue = check_physics((a, b))
    assert issue is not None
    assert issue.overlap_pairs == ()
    assert issue.component_count == 2


def test_physics_edge_contact_is_connected():
    a = make_piece_state(PieceKind.SMALL_TRIANGLE_1, Polygon([(0, 0), (1, 0), (0, 1)]))
    b = make_piece_state(PieceKind.SMALL_TRIANGLE_2, Polygon([(0, 1), (1, 0), (1, 1)]))
    assert check_physics((a, b)) is None


# ---------------------------------------------------------------------------
# evaluate


def test_evaluate_identity_submission():
    truth = rect_instance()
    rec = evaluate(serialize_tce(truth), truth)
    assert not rec.tse and not rec.rge and not rec.pe
    assert rec.vpr_pass
    assert rec.iou >= 1.0 - 1e-12
    assert rec.hausdorff <= 0.005
    assert rec.success
    assert rec.instance_id == "rect-2x4"


def test_evaluate_scaled_piece():
    truth = rect_instance()
    rings = dict(RECT_RINGS)
    rings[PieceKind.LARGE_TRIANGLE_1] = [(2.2, 0.0), (4.4, 0.0), (4.4, 2.2)]
    rec = evaluate(serialize_tce(rect_instance(rings)), truth)
    assert rec.rge
    assert not rec.vpr_pass
    assert rec.iou < 1.0
    assert any(i.label == "LT1" for i in rec.rge_issues)


def test_evaluate_empty_text():
    truth = rect_instance()
    rec = evaluate("", truth)
    assert rec.tse
    assert not rec.vpr_pass and not rec.success
    assert rec.iou == 0.0
    assert math.isinf(rec.hausdorff)


def test_evaluate_partial_piece_list_still_scored():
    truth = rect_instance()
    doc = json.loads(serialize_tce(truth))
    doc["final_state"] = doc["final_state"][:-1]  # drop the parallelogram
    rec = evaluate(json.dumps(doc), truth)
    assert rec.tse  # wrong piece count
    assert 0.0 < rec.iou < 1.0
    assert math.isfinite(rec.hausdorff)


def test_evaluate_overlap_flagged():
    truth = rect_instance()
    rings = dict(RECT_RINGS)
    rings[PieceKind.LARGE_TRIANGLE_2] = rings[PieceKind.LARGE_TRIANGLE_1]
    rec = evaluate(serialize_tce(rect_instance(rings)), truth)
    assert rec.pe
    assert rec.pe_issue is not None
    assert ("LT1", "LT2") in rec.pe_issue.overlap_pairs
    assert not rec.success


def test_evaluate_deterministic():
    truth = rect_instance()
    text = serialize_tce(truth)
    a = evaluate(text, truth)
    b = evaluate(text, truth)
    assert a == b
    assert record_line(a) == record_line(b)


def test_evaluate_rigid_motion_invariance():
    truth = rect_instance()
    base = evaluate(serialize_tce(truth), truth)
    motion = RigidTransform.from_parts(45, False, (E(0, 1), E(-3)))
    moved_rings = {
        k: apply(motion, Polygon(ring)).vertices for k, ring in RECT_RINGS.items()
    }
    moved_target = apply(motion, Polygon(RECT_TARGET)).vertices
    moved = rect_instance(moved_rings, moved_target)
    rec = evaluate(serialize_tce(moved), moved)
    assert (rec.tse, rec.rge, rec.pe, rec.vpr_pass, rec.success) == (
        base.tse,
        base.rge,
        base.pe,
        base.vpr_pass,
        base.success,
    )
    assert abs(rec.iou - base.iou) <= 1e-9
    assert abs(rec.hausdorff - base.hausdorff) <= 0.01


def test_evaluate_success_thresholds_configurable():
    truth = rect_instance()
    cfg = EvalConfig(iou_threshold=1.1)  # unreachable on purpose
    rec = evaluate(serialize_tce(truth), truth, cfg)
    assert rec.vpr_pass and not rec.success


def test_record_line_shape():
    truth = rect_instance()
    rec = evaluate("", truth)
    doc = json.loads(record_line(rec))
    assert doc["instance_id"] == "rect-2x4"
    assert doc["tse"] is True
    assert doc["hausdorff"] is None  # infinity sentinel
    assert "\n" not in record_line(rec)


# ---------------------------------------------------------------------------
# aggregate


def _rec(i: int, *, tse=False, rge=False, pe=False, iou_val=1.0, hd=0.0) -> VerificationRecord:
    vpr = not (tse or rge or pe)
    return VerificationRecord(
        instance_id=f"r{i:04d}",
        tse=tse,
        tse_report=TseReport(),
        rge=rge,
        rge_issues=(),
        pe=pe,
        pe_issue=None,
        vpr_pass=vpr,
        iou=iou_val,
        hausdorff=hd,
        success=vpr and iou_val >= 0.99 and hd <= 0.05,
    )


def test_aggregate_table_arithmetic():
    records = [_rec(i, rge=(i >= 226)) for i in range(1000)]
    report = aggregate(records)
    assert report.row()[3] == "22.60"  # VPR over 1000 with 226 passing
    assert report.count == 1000


def test_aggregate_all_pass():
    report = aggregate([_rec(i) for i in range(40)])
    assert report.row() == ("0.00", "0.00", "0.00", "100.00", "100.00", "0.0000", "100.00")


def test_aggregate_mean_iou():
    records = [
        _rec(0, iou_val=1.0),
        _rec(1, iou_val=0.5),
        _rec(2, iou_val=0.5),
        _rec(3, iou_val=0.0),
    ]
    assert aggregate(records).row()[4] == "50.00"


def test_aggregate_hausdorff_skips_infinite():
    records = [
        _rec(0, hd=0.1),
        _rec(1, tse=True, iou_val=0.0, hd=math.inf),
        _rec(2, hd=0.3),
    ]
    report = aggregate(records)
    assert report.mean_hausdorff == pytest.approx(0.2)


def test_aggregate_all_infinite_hausdorff():
    records = [_rec(0, tse=True, iou_val=0.0, hd=math.inf)]
    assert math.isinf(aggregate(records).mean_hausdorff)


def test_aggregate_empty_raises():
    with pytest.raises(ValueError):
        aggregate([])


def test_aggregate_order_independent():
    rng = random.Random(7)
    records = [
        _rec(i, tse=rng.random() < 0.1, rge=rng.random() < 0.4,
             iou_val=rng.random(), hd=rng.random())
        for i in range(300)
    ]
    shuffled = records[:]
    rng.shuffle(shuffled)
    assert aggregate(records) == aggregate(shuffled)


def test_csv_columns():
    report = aggregate([_rec(0)])
    lines = report.to_csv().splitlines()
    assert lines[0] == "TSE,RGE,PE,VPR,IoU,Hausdorff,Success"
    assert len(lines) == 2
    assert CorpusReport.COLUMNS == ("TSE", "RGE", "PE", "VPR", "IoU", "Hausdorff", "Success")


def test_text_table_aligned():
    report = aggregate([_rec(0)])
    head, body = report.to_text().splitlines()
    assert "Hausdorff" in head
    assert len(head) == len(body)
