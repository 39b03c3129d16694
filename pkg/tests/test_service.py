"""HTTP facade: envelopes, error taxonomy, and endpoint behavior."""

import json

import pytest
from fastapi.testclient import TestClient

import tcekit.service as service
from tcekit.pipeline import RawAssembly, normalize
from tcekit.service import create_app, resolve_bind
from tcekit.tangram import PieceKind, serialize_tce

RECT_RINGS = {
    "large_triangle_1": [(2, 0), (4, 0), (4, 2)],
    "large_triangle_2": [(2, 0), (4, 2), (2, 2)],
    "medium_triangle": [(0, 0), (2, 0), (1, 1)],
    "small_triangle_1": [(0, 0), (1, 1), (0, 1)],
    "small_triangle_2": [(2, 1), (2, 2), (1, 2)],
    "square": [(0, 1), (1, 1), (1, 2), (0, 2)],
    "parallelogram": [(1, 1), (2, 0), (2, 1), (1, 2)],
}


def raw_body(rings=RECT_RINGS):
    return {
        "pieces": [
            {"type": name, "vertices": [[float(x), float(y)] for x, y in ring]}
            for name, ring in rings.items()
        ]
    }


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app(), raise_server_exceptions=False) as c:
        yield c


@pytest.fixture(scope="module")
def rect_doc():
    raw = RawAssembly(
        None,
        tuple(
            (PieceKind(name), tuple((float(x), float(y)) for x, y in ring))
            for name, ring in RECT_RINGS.items()
        ),
    )
    return json.loads(serialize_tce(normalize(raw)))


def body_of(resp):
    doc = resp.json()
    assert doc["ok"] in (True, False)
    assert ("data" in doc) != ("error" in doc)
    if not doc["ok"]:
        err = doc["error"]
        assert set(err) == {"code", "message", "detail"}
    return doc


# ---------------------------------------------------------------------------
# /pieces


def test_pieces_inventory(client):
    resp = client.get("/pieces")
    assert resp.status_code == 200
    doc = body_of(resp)
    assert doc["ok"]
    pieces = doc["data"]["pieces"]
    assert len(pieces) == 7
    square = next(p for p in pieces if p["type"] == "square")
    assert square["vertices"] == [["0", "0"], ["1", "0"], ["1", "1"], ["0", "1"]]


def test_pieces_byte_identical(client):
    first = client.get("/pieces")
    second = client.get("/pieces")
    assert first.content == second.content


# ---------------------------------------------------------------------------
# /snap


def test_snap_root_two_over_two(client):
    resp = client.post(
        "/snap", json={"vertices": [[0.7071068, 0.0]], "tol": 0.001}
    )
    doc = body_of(resp)
    assert doc["ok"]
    entry = doc["data"]["vertices"][0]
    assert entry["ok"]
    assert entry["exact"] == ["\\frac{\\sqrt{2}}{2}", "0"]
    assert entry["residual"][0] == pytest.approx(0.0, abs=1e-6)


def test_snap_exact_float_zero_residual(client):
    resp = client.post("/snap", json={"vertices": [[0.5, 0.25]]})
    doc = body_of(resp)
    entry = doc["data"]["vertices"][0]
    assert entry["ok"]
    assert entry["residual"] == [0.0, 0.0]


def test_snap_partial_failure_itemized(client):
    resp = client.post("/snap", json={"vertices": [[0.5, 0.5], [0.28033, 0.0]]})
    assert resp.status_code == 200
    doc = body_of(resp)
    assert doc["ok"]
    first, second = doc["data"]["vertices"]
    assert first["ok"]
    assert not second["ok"]
    assert second["index"] == 1
    assert second["message"]


def test_snap_rejects_bad_tol(client):
    resp = client.post("/snap", json={"vertices": [[0.0, 0.0]], "tol": 0})
    assert resp.status_code == 400
    doc = body_of(resp)
    assert doc["error"]["code"] == "bad-request"


def test_snap_rejects_malformed_vertices(client):
    resp = client.post("/snap", json={"vertices": "nope"})
    assert resp.status_code == 400
    assert body_of(resp)["error"]["code"] == "bad-request"


# ---------------------------------------------------------------------------
# /validate


def test_validate_good_document(client, rect_doc):
    resp = client.post("/validate", json=rect_doc)
    doc = body_of(resp)
    assert doc["ok"]
    record = doc["data"]
    assert record["vpr_pass"] is True
    assert record["success"] is True
    assert record["instance_id"] == rect_doc["instance_id"]


def test_validate_flags_missing_piece(client, rect_doc):
    broken = json.loads(json.dumps(rect_doc))
    del broken["final_state"][2]
    resp = client.post("/validate", json=broken)
    doc = body_of(resp)
    assert doc["ok"]
    assert doc["data"]["tse"] is True
    assert doc["data"]["vpr_pass"] is False


def test_validate_empty_body_bad_request(client):
    resp = client.post(
        "/validate", content=b"", headers={"content-type": "application/json"}
    )
    assert resp.status_code == 400
    assert body_of(resp)["error"]["code"] == "bad-request"


def test_validate_unusable_document(client):
    resp = client.post("/validate", json={"hello": 1})
    assert resp.status_code == 422
    doc = body_of(resp)
    assert doc["error"]["code"] == "verify-failed"
    assert doc["error"]["detail"]


# ---------------------------------------------------------------------------
# /normalize


def test_normalize_rect_assembly(client):
    resp = client.post("/normalize", json=raw_body())
    doc = body_of(resp)
    assert doc["ok"]
    tce = doc["data"]
    assert tce["target_outline"]["vertices"][0] == ["0", "0"]
    assert len(tce["final_state"]) == 7
    check = client.post("/validate", json=tce)
    assert check.json()["data"]["success"] is True


def test_normalize_deterministic(client):
    a = client.post("/normalize", json=raw_body())
    b = client.post("/normalize", json=raw_body())
    assert a.content == b.content


def test_normalize_unsnappable_vertex(client):
    rings = {k: list(v) for k, v in RECT_RINGS.items()}
    rings["square"] = [(0, 1), (1.28033, 1), (1, 2), (0, 2)]
    resp = client.post("/normalize", json=raw_body(rings))
    assert resp.status_code == 422
    doc = body_of(resp)
    assert doc["error"]["code"] == "snap-failed"


def test_normalize_geometry_failure(client):
    rings = {k: list(v) for k, v in RECT_RINGS.items()}
    rings["small_triangle_2"] = [(0, 0), (1, 1), (0, 1)]  # coincides with st1
    resp = client.post("/normalize", json=raw_body(rings))
    assert resp.status_code == 422
    assert body_of(resp)["error"]["code"] == "verify-failed"


def test_normalize_malformed_body(client):
    resp = client.post("/normalize", json={"pieces": 3})
    assert resp.status_code == 400
    assert body_of(resp)["error"]["code"] == "bad-request"


# ---------------------------------------------------------------------------
# /render


def test_render_outline(client):
    resp = client.post(
        "/render", json={"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}
    )
    doc = body_of(resp)
    assert doc["ok"]
    svg = doc["data"]["svg"]
    assert svg.startswith("<svg")
    assert 'viewBox="-0.05 -1.05 1.1 1.1"' in svg


def test_render_deterministic(client):
    payload = {"vertices": [[0, 0], [2, 0], [2, 1], [0, 1]]}
    a = client.post("/render", json=payload)
    b = client.post("/render", json=payload)
    assert a.content == b.content


def test_render_document_assembly(client, rect_doc):
    resp = client.post("/render", json=rect_doc)
    doc = body_of(resp)
    assert doc["ok"]
    assert doc["data"]["svg"].count("<path") == 7


def test_render_bad_payload(client):
    for payload in ({"vertices": 42}, {}, {"vertices": [[0, 0], [1, 0]]}):
        resp = client.post("/render", json=payload)
        assert resp.status_code == 400
        assert body_of(resp)["error"]["code"] == "bad-request"


def test_internal_error_envelope(client, monkeypatch):
    def boom(subject, **kwargs):
        raise RuntimeError("kaput")

    monkeypatch.setattr(service, "render_svg", boom)
    resp = client.post(
        "/render", json={"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}
    )
    assert resp.status_code == 500
    assert body_of(resp)["error"]["code"] == "internal"


# ---------------------------------------------------------------------------
# binding


def test_bind_defaults_to_loopback(monkeypatch):
    monkeypatch.delenv("TCE_SERVICE_PORT", raising=False)
    host, port = resolve_bind()
    assert host == "127.0.0.1"
    assert port == 8765


def test_bind_env_port(monkeypatch):
    monkeypatch.setenv("TCE_SERVICE_PORT", "9100")
    assert resolve_bind() == ("127.0.0.1", 9100)


def test_bind_explicit_port_wins(monkeypatch):
    monkeypatch.setenv("TCE_SERVICE_PORT", "9100")
    assert resolve_bind(port=7001) == ("127.0.0.1", 7001)


def test_bind_refuses_non_loopback_without_flag():
    with pytest.raises(ValueError):
        resolve_bind(host="0.0.0.0")
    host, _port = resolve_bind(host="0.0.0.0", allow_remote=True)
    assert host == "0.0.0.0"


def test_bind_rejects_bad_env_port(monkeypatch):
    monkeypatch.setenv("TCE_SERVICE_PORT", "not-a-port")
    with pytest.raises(ValueError):
        resolve_bind()
