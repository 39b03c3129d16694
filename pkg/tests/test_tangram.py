"""Tests for the piece inventory, TCE codec, and congruence checks."""

import itertools
import json
from fractions import Fraction

import pytest

from tcekit.exactnum import ExactValue, SQRT2
from tcekit.geom import Polygon, RigidTransform, apply, is_convex, polygon_area
from tcekit.tangram import (
    KIND_BY_LABEL,
    KIND_INFO,
    KIND_ORDER,
    LABELS,
    Outline,
    PieceKind,
    PieceState,
    TceInstance,
    TseCode,
    canonical_pieces,
    centroid,
    congruent_silhouettes,
    edge_length,
    make_outline,
    make_piece_state,
    parse_tce,
    serialize_tce,
)

E = ExactValue


def _demo_instance() -> TceInstance:
    target = make_outline(Polygon([(0, 0), (4, 0), (4, 2), (0, 2)]))
    final = tuple(
        make_piece_state(
            kind,
            transform=RigidTransform.from_parts(
                (45 * i) % 360, kind is PieceKind.PARALLELOGRAM, (i, Fraction(1, 2))
            ),
        )
        for i, kind in enumerate(KIND_ORDER)
    )
    return TceInstance(
        instance_id="demo-001",
        target_outline=target,
        initial_state=canonical_pieces(),
        final_state=final,
        adjacency_graph=frozenset({("LT1", "SQ"), ("MT", "PG")}),
    )


# ---------------------------------------------------------------------------
# inventory


def test_inventory_area_and_perimeter():
    sq = KIND_INFO[PieceKind.SQUARE]
    assert sq.area == E(1)
    assert sq.perimeter == E(4)
    lt = KIND_INFO[PieceKind.LARGE_TRIANGLE_1]
    assert lt.area == E(2)
    assert lt.perimeter == E(4, 2)


def test_inventory_total_area_is_eight():
    total = sum((KIND_INFO[k].area for k in KIND_ORDER), E(0))
    assert total == E(8)


def test_inventory_shapes_are_convex_ccw():
    for kind in PieceKind:
        poly = KIND_INFO[kind].polygon
        assert is_convex(poly)
        assert polygon_area(poly).sign() > 0


def test_reflection_flag_only_on_parallelogram():
    for kind in PieceKind:
        assert KIND_INFO[kind].reflection_allowed == (
            kind is PieceKind.PARALLELOGRAM
        )


def test_edge_multisets_distinct_except_pairs():
    pairs = {
        frozenset({PieceKind.LARGE_TRIANGLE_1, PieceKind.LARGE_TRIANGLE_2}),
        frozenset({PieceKind.SMALL_TRIANGLE_1, PieceKind.SMALL_TRIANGLE_2}),
    }
    for a, b in itertools.combinations(PieceKind, 2):
        same = KIND_INFO[a].squared_edges == KIND_INFO[b].squared_edges
        assert same == (frozenset({a, b}) in pairs)


def test_labels_roundtrip():
    assert set(LABELS.values()) == {"LT1", "LT2", "MT", "ST1", "ST2", "SQ", "PG"}
    for kind, label in LABELS.items():
        assert KIND_BY_LABEL[label] is kind


def test_canonical_pieces_deterministic():
    a = canonical_pieces()
    b = canonical_pieces()
    assert a == b
    assert len(a) == 7
    assert [p.kind for p in a] == list(KIND_ORDER)
    assert all(p.transform is None for p in a)


def test_piece_state_invariants():
    for piece in canonical_pieces():
        ring = piece.vertices
        assert piece.center == centroid(ring)
        for i, j, length in piece.edges:
            assert length == edge_length(ring.vertices[i], ring.vertices[j])


def test_transform_reproduces_vertices():
    inst = _demo_instance()
    for piece in inst.final_state:
        assert piece.transform is not None
        moved = apply(piece.transform, KIND_INFO[piece.kind].polygon)
        assert moved == piece.vertices


# ---------------------------------------------------------------------------
# serialization round trip


def test_roundtrip_identity():
    inst = _demo_instance()
    text = serialize_tce(inst)
    back, report = parse_tce(text)
    assert report.ok()
    assert back == inst


def test_roundtrip_with_float_coordinates():
    target = make_outline(Polygon([(0, 0), (4, 0), (4, 2), (0, 2)]))
    jittered = Polygon([(0.1, 0.2), (1.1, 0.2), (1.1, 1.2), (0.1, 1.2)])
    final = list(canonical_pieces())
    final[5] = make_piece_state(PieceKind.SQUARE, jittered)
    inst = TceInstance("float-01", target, canonical_pieces(), tuple(final), frozenset())
    back, report = parse_tce(serialize_tce(inst))
    assert report.ok()
    assert back == inst


def test_serialized_values_use_latex():
    target = make_outline(Polygon([(0, 0), (4, 0), (4, E(0, 2)), (0, E(0, 2))]))
    inst = TceInstance(
        "latex-01", target, canonical_pieces(), canonical_pieces(), frozenset()
    )
    text = serialize_tce(inst)
    assert '"2\\\\sqrt{2}"' in text
    doc = json.loads(text)
    assert doc["target_outline"]["vertices"][2] == ["4", "2\\sqrt{2}"]


def test_serialized_square_vertices_convention():
    doc = json.loads(serialize_tce(_demo_instance()))
    square = doc["initial_state"][5]
    assert square["type"] == "square"
    assert square["vertices"] == [["0", "0"], ["1", "0"], ["1", "1"], ["0", "1"]]


def test_serialized_outline_edges_are_pairs():
    doc = json.loads(serialize_tce(_demo_instance()))
    assert doc["target_outline"]["edges"] == [[0, 1], [1, 2], [2, 3], [3, 0]]
    piece_edges = doc["initial_state"][0]["edges"]
    assert all(len(e) == 3 and isinstance(e[2], str) for e in piece_edges)


def test_empty_adjacency_serializes_as_list():
    inst = TceInstance(
        "empty-adj",
        make_outline(Polygon([(0, 0), (1, 0), (0, 1)])),
        canonical_pieces(),
        canonical_pieces(),
        frozenset(),
    )
    doc = json.loads(serialize_tce(inst))
    assert doc["adjacency_graph"] == []


def test_transform_matrix_only_when_present():
    doc = json.loads(serialize_tce(_demo_instance()))
    assert all("transform_matrix" not in p for p in doc["initial_state"])
    assert all("transform_matrix" in p for p in doc["final_state"])


# ---------------------------------------------------------------------------
# lenient parsing and the violation taxonomy


def _mutated_doc(**changes) -> dict:
    doc = json.loads(serialize_tce(_demo_instance()))
    doc.update(changes)
    return doc


def test_parse_truncated_document():
    text = serialize_tce(_demo_instance())[:40]
    inst, report = parse_tce(text)
    assert inst is None
    assert report.codes() == {TseCode.UNPARSEABLE}


def test_parse_non_object():
    inst, report = parse_tce("[1, 2, 3]")
    assert inst is None
    assert TseCode.UNPARSEABLE in report.codes()


def test_parse_eight_pieces():
    doc = _mutated_doc()
    doc["final_state"].append(doc["final_state"][0])
    inst, report = parse_tce(json.dumps(doc))
    assert inst is not None
    assert TseCode.BAD_PIECE_COUNT in report.codes()
    assert TseCode.DUPLICATE_KIND in report.codes()


def test_parse_six_pieces():
    doc = _mutated_doc()
    doc["final_state"].pop()
    inst, report = parse_tce(json.dumps(doc))
    assert inst is not None
    assert TseCode.BAD_PIECE_COUNT in report.codes()
    assert len(inst.final_state) == 6


def test_parse_unknown_piece_type():
    doc = _mutated_doc()
    doc["final_state"][0]["type"] = "pentagon"
    inst, report = parse_tce(json.dumps(doc))
    assert inst is not None
    assert TseCode.UNKNOWN_PIECE_TYPE in report.codes()
    # the broken piece is dropped, the rest survive
    assert len(inst.final_state) == 6


def test_parse_duplicate_kind():
    doc = _mutated_doc()
    doc["final_state"][1]["type"] = "large_triangle_1"
    _, report = parse_tce(json.dumps(doc))
    assert TseCode.DUPLICATE_KIND in report.codes()


def test_parse_bad_coordinate():
    doc = _mutated_doc()
    doc["final_state"][0]["vertices"][0][0] = "wat"
    inst, report = parse_tce(json.dumps(doc))
    assert TseCode.BAD_COORDINATE in report.codes()
    assert inst is not None


def test_parse_bad_edge_index():
    doc = _mutated_doc()
    doc["final_state"][0]["edges"][0] = [0, 99, "2"]
    _, report = parse_tce(json.dumps(doc))
    assert TseCode.BAD_EDGE_INDEX in report.codes()


def test_parse_edge_length_mismatch():
    doc = _mutated_doc()
    doc["final_state"][0]["edges"][0][2] = "7"
    _, report = parse_tce(json.dumps(doc))
    assert TseCode.BAD_EDGE_INDEX in report.codes()


def test_parse_edge_length_close_float_accepted():
    doc = _mutated_doc()
    doc["final_state"][0]["edges"][0][2] = "2.0000001"
    _, report = parse_tce(json.dumps(doc))
    assert TseCode.BAD_EDGE_INDEX not in report.codes()


def test_parse_missing_field():
    doc = _mutated_doc()
    del doc["adjacency_graph"]
    inst, report = parse_tce(json.dumps(doc))
    assert inst is not None
    assert TseCode.MISSING_FIELD in report.codes()


def test_parse_missing_center_recovers_centroid():
    doc = _mutated_doc()
    del doc["final_state"][0]["center"]
    inst, report = parse_tce(json.dumps(doc))
    assert TseCode.MISSING_FIELD in report.codes()
    piece = inst.final_state[0]
    assert piece.center == centroid(piece.vertices)


def test_parse_accepts_pair_edges_and_json_numbers():
    doc = _mutated_doc()
    doc["target_outline"]["vertices"] = [[0, 0], [4, 0], [4, 2], [0, 2]]
    doc["final_state"][0]["edges"] = [[0, 1], [1, 2], [2, 0]]
    inst, report = parse_tce(json.dumps(doc))
    assert report.ok()
    assert inst.target_outline.vertices.vertices[1].x == E(4)


def test_parse_unrecoverable_without_final_state():
    doc = _mutated_doc()
    del doc["final_state"]
    inst, report = parse_tce(json.dumps(doc))
    assert inst is None
    assert TseCode.MISSING_FIELD in report.codes()


def test_parse_unrecoverable_without_target():
    doc = _mutated_doc()
    del doc["target_outline"]
    inst, report = parse_tce(json.dumps(doc))
    assert inst is None


def test_parse_adjacency_validation():
    doc = _mutated_doc(adjacency_graph=[["LT1", "XX"], ["SQ", "SQ"], ["MT", "PG"]])
    inst, report = parse_tce(json.dumps(doc))
    assert TseCode.BAD_EDGE_INDEX in report.codes()
    assert inst.adjacency_graph == frozenset({("MT", "PG")})


def test_adjacency_normalized_unordered():
    doc = _mutated_doc(adjacency_graph=[["SQ", "LT1"], ["LT1", "SQ"]])
    inst, report = parse_tce(json.dumps(doc))
    assert report.ok()
    assert inst.adjacency_graph == frozenset({("LT1", "SQ")})


# ---------------------------------------------------------------------------
# congruence


def _outline_of(coords) -> Outline:
    return make_outline(Polygon(coords))


def test_congruent_rotated():
    a = _outline_of([(0, 0), (2, 0), (2, 1), (0, 1)])
    b = _outline_of([(5, 5), (6, 5), (6, 7), (5, 7)])  # rotated 90 and shifted
    assert congruent_silhouettes(a, b)


def test_congruent_self():
    a = _outline_of([(0, 0), (2, 0), (1, 1)])
    assert congruent_silhouettes(a, a)


def test_congruent_reflected():
    a = _outline_of([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    refl = RigidTransform([[-1, 0, 0], [0, 1, 0], [0, 0, 1]])
    b = make_outline(apply(refl, a.vertices))
    assert congruent_silhouettes(a, b)


def test_congruent_45_degree_lattice():
    mt = KIND_INFO[PieceKind.MEDIUM_TRIANGLE].polygon
    rot = apply(RigidTransform.from_parts(45, False, (SQRT2, E(3))), mt)
    assert congruent_silhouettes(make_outline(mt), make_outline(rot))


def test_not_congruent_different_shapes():
    square = _outline_of([(0, 0), (1, 0), (1, 1), (0, 1)])
    tri = _outline_of([(0, 0), (2, 0), (0, 1)])  # same area, different shape
    assert not congruent_silhouettes(square, tri)


def test_not_congruent_similar_scaled():
    a = _outline_of([(0, 0), (1, 0), (1, 1), (0, 1)])
    b = _outline_of([(0, 0), (2, 0), (2, 2), (0, 2)])
    assert not congruent_silhouettes(a, b)


def test_congruence_rejects_floats():
    a = _outline_of([(0, 0), (1, 0), (1, 1), (0, 1)])
    b = make_outline(Polygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]))
    with pytest.raises(ValueError):
        congruent_silhouettes(a, b)
