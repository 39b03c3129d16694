"""Local JSON-over-HTTP facade for the studio and other clients.

Every endpoint is a pure function over its request body wrapped in a
uniform envelope: {"ok": true, "data": ...} on success, otherwise
{"ok": false, "error": {"code", "message", "detail"}} with codes
bad-request, snap-failed, verify-failed, or internal.  The server binds
loopback only unless remote access is explicitly opted into.
"""

from __future__ import annotations

import json
import math
import os

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .exactnum.latex import format_scalar
from .geom import Polygon
from .pipeline import (
    DEFAULT_SNAP_TOL,
    NormalizationError,
    SnapError,
    normalize,
    parse_raw,
    render_svg,
    snap_scalar,
)
from .tangram import (
    _ser_piece,
    canonical_pieces,
    make_outline,
    parse_tce,
    serialize_tce,
)
from .verify import VerificationRecord, evaluate

DEFAULT_PORT = 8765
_LOOPBACK = {"127.0.0.1", "::1", "localhost"}


def _ok(data: object, status: int = 200) -> JSONResponse:
    return JSONResponse({"ok": True, "data": data}, status_code=status)


def _fail(
    code: str, message: str, detail: object = None, status: int = 400
) -> JSONResponse:
    return JSONResponse(
        {"ok": False, "error": {"code": code, "message": message, "detail": detail}},
        status_code=status,
    )


class _Reject(Exception):
    def __init__(self, code: str, message: str, detail: object = None, status: int = 400):
        super().__init__(message)
        self.response = _fail(code, message, detail, status)


async def _body(request: Request) -> object:
    try:
        return await request.json()
    except (json.JSONDecodeError, UnicodeDecodeError):
        raise _Reject("bad-request", "request body is not valid JSON")


def _ser_record(r: VerificationRecord) -> dict:
    return {
        "instance_id": r.instance_id,
        "tse": r.tse,
        "tse_violations": [
            {"code": v.code.value, "detail": v.detail}
            for v in r.tse_report.violations
        ],
        "rge": r.rge,
        "rge_issues": [
            {
                "label": i.label,
                "area_delta": i.area_delta,
                "perimeter_delta": i.perimeter_delta,
            }
            for i in r.rge_issues
        ],
        "pe": r.pe,
        "pe_issue": None
        if r.pe_issue is None
        else {
            "overlap_pairs": [list(p) for p in r.pe_issue.overlap_pairs],
            "component_count": r.pe_issue.component_count,
        },
        "vpr_pass": r.vpr_pass,
        "iou": r.iou,
        "hausdorff": None if math.isinf(r.hausdorff) else r.hausdorff,
        "success": r.success,
    }


def _snap_payload(body: object) -> dict:
    if not isinstance(body, dict) or not isinstance(body.get("vertices"), list):
        raise _Reject("bad-request", "body must be {vertices: [[x, y], ...]}")
    tol = body.get("tol", DEFAULT_SNAP_TOL)
    if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol <= 0:
        raise _Reject("bad-request", "tol must be a positive number")
    entries = []
    for index, pair in enumerate(body["vertices"]):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in pair)
        ):
            raise _Reject("bad-request", f"vertex {index} is not a number pair")
        x, y = float(pair[0]), float(pair[1])
        try:
            sx, sy = snap_scalar(x, tol), snap_scalar(y, tol)
        except SnapError as exc:
            entries.append({"ok": False, "index": index, "message": str(exc)})
            continue
        entries.append(
            {
                "ok": True,
                "exact": [format_scalar(sx), format_scalar(sy)],
                "residual": [abs(sx.to_float() - x), abs(sy.to_float() - y)],
            }
        )
    return {"vertices": entries}


def _float_ring(raw: object) -> Polygon:
    if not isinstance(raw, list) or not all(
        isinstance(p, (list, tuple))
        and len(p) == 2
        and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in p)
        for p in raw
    ):
        raise _Reject("bad-request", "vertices must be a list of number pairs")
    try:
        return Polygon([(float(x), float(y)) for x, y in raw])
    except (ValueError, TypeError) as exc:
        raise _Reject("bad-request", f"bad outline ring: {exc}")


def create_app() -> FastAPI:
    app = FastAPI(openapi_url=None, docs_url=None, redoc_url=None)
    inventory = {"pieces": [_ser_piece(p) for p in canonical_pieces()]}

    @app.exception_handler(Exception)
    async def on_unexpected(request: Request, exc: Exception) -> JSONResponse:
        return _fail("internal", f"{type(exc).__name__}: {exc}", status=500)

    @app.exception_handler(_Reject)
    async def on_reject(request: Request, exc: _Reject) -> JSONResponse:
        return exc.response

    @app.get("/pieces")
    async def pieces() -> JSONResponse:
        return _ok(inventory)

    @app.post("/snap")
    async def snap(request: Request) -> JSONResponse:
        return _ok(_snap_payload(await _body(request)))

    @app.post("/validate")
    async def validate(request: Request) -> JSONResponse:
        body = await _body(request)
        if not isinstance(body, dict):
            raise _Reject("bad-request", "body must be a TCE document object")
        text = json.dumps(body)
        inst, report = parse_tce(text)
        if inst is None:
            raise _Reject(
                "verify-failed",
                "document has no usable target outline or final state",
                [{"code": v.code.value, "detail": v.detail} for v in report.violations],
                status=422,
            )
        return _ok(_ser_record(evaluate(text, inst)))

    @app.post("/normalize")
    async def normalize_endpoint(request: Request) -> JSONResponse:
        body = await _body(request)
        if not isinstance(body, dict):
            raise _Reject("bad-request", "body must be a raw assembly object")
        try:
            raw = parse_raw(json.dumps(body))
        except ValueError as exc:
            raise _Reject("bad-request", f"bad raw assembly: {exc}")
        try:
            inst = normalize(raw)
        except SnapError as exc:
            raise _Reject("snap-failed", str(exc), status=422)
        except NormalizationError as exc:
            raise _Reject("verify-failed", str(exc), status=422)
        return _ok(json.loads(serialize_tce(inst)))

    @app.post("/render")
    async def render(request: Request) -> JSONResponse:
        body = await _body(request)
        if not isinstance(body, dict):
            raise _Reject("bad-request", "body must be an outline or TCE document")
        if "vertices" in body:
            outline = make_outline(_float_ring(body["vertices"]))
            return _ok({"svg": render_svg(outline)})
        if "final_state" in body:
            inst, _report = parse_tce(json.dumps(body))
            if inst is None:
                raise _Reject("bad-request", "document could not be parsed")
            return _ok({"svg": render_svg(inst.final_state)})
        raise _Reject("bad-request", "need either vertices or a TCE document")

    return app


def resolve_bind(
    port: "int | None" = None,
    host: "str | None" = None,
    allow_remote: bool = False,
) -> tuple[str, int]:
    """Pick the bind address: loopback unless remote is explicitly allowed."""

    if host is None:
        host = "127.0.0.1"
    if host not in _LOOPBACK and not allow_remote:
        raise ValueError(
            f"refusing to bind {host!r}: non-loopback binding needs allow_remote"
        )
    if port is None:
        env = os.environ.get("TCE_SERVICE_PORT")
        if env is not None:
            try:
                port = int(env)
            except ValueError:
                raise ValueError(f"TCE_SERVICE_PORT is not a port number: {env!r}")
        else:
            port = DEFAULT_PORT
    if not 0 < port < 65536:
        raise ValueError(f"port out of range: {port}")
    return host, port


def serve(
    port: "int | None" = None,
    host: "str | None" = None,
    allow_remote: bool = False,
) -> None:
    import uvicorn

    bind_host, bind_port = resolve_bind(port, host, allow_remote)
    uvicorn.run(create_app(), host=bind_host, port=bind_port, log_level="warning")
