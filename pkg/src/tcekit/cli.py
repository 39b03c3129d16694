"""Single `tce` entry point wiring the toolkit into reproducible runs.

Every subcommand that writes files also drops a manifest next to them
(seed, config, version, timestamps), so a run can be re-created exactly.
Exit codes: 0 success, 1 usage error, 2 data error, 3 unsat or exhausted.
"""

from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from .exactnum import ExactValue, is_exact
from .exactnum.latex import parse_scalar
from .geom import Point, Polygon
from .harness import load_responses, run_task2, score_task1
from .pipeline import (
    DEFAULT_SNAP_TOL,
    RawAssembly,
    filter_raw,
    gen_task1,
    gen_task2,
    normalize,
    parse_raw,
    render_svg,
)
from .solver import EXHAUSTED, SolverConfig, generate_instances, solve
from .tangram import Outline, TceInstance, make_outline, parse_tce, serialize_tce

_CONFIG_KEYS = {"seed", "tol", "node_budget", "time_budget"}

_LABELS = "ABCD"


class _DataError(Exception):
    """Input was readable but semantically unusable (exit 2)."""


class _UnsatError(Exception):
    """Solve ended without an assembly (exit 3)."""


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    seed: "int | None"
    config_overrides: "dict[str, object]"
    version: str
    started: str
    finished: str


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_manifest(
    target: Path,
    subcommand: str,
    *,
    inputs: "list[Path | str]",
    outputs: "list[Path | str]",
    seed: "int | None",
    overrides: "dict[str, object]",
    started: str,
) -> None:
    manifest = RunManifest(
        subcommand=subcommand,
        inputs=tuple(str(p) for p in inputs),
        outputs=tuple(str(p) for p in outputs),
        seed=seed,
        config_overrides=dict(overrides),
        version=__version__,
        started=started,
        finished=_now(),
    )
    if target.is_dir():
        path = target / "run-manifest.json"
    else:
        path = target.with_name(target.name + ".manifest.json")
    path.write_text(json.dumps(manifest.__dict__, indent=2) + "\n")


def _load_config(path: "str | None") -> "dict[str, object]":
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise click.UsageError(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"config file is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise click.UsageError("config file must hold a JSON object")
    unknown = sorted(set(doc) - _CONFIG_KEYS)
    if unknown:
        raise click.UsageError(f"unknown config keys: {', '.join(unknown)}")
    return doc


def _conf(ctx: click.Context) -> "dict[str, object]":
    return ctx.obj or {}


def _resolve_seed(ctx: click.Context, flag: "int | None") -> int:
    if flag is not None:
        return flag
    return int(_conf(ctx).get("seed", 0))  # type: ignore[arg-type]


@click.group()
@click.version_option(__version__)
@click.option(
    "--config",
    "config_path",
    envvar="TCE_CONFIG",
    default=None,
    metavar="PATH",
    help="JSON config supplying flag defaults; explicit flags win.",
)
@click.pass_context
def cli(ctx: click.Context, config_path: "str | None") -> None:
    """Tangram corpus, task, and verification toolkit."""
    ctx.obj = _load_config(config_path)


def main(argv: "list[str] | None" = None) -> int:
    """Console entry point; maps failures onto the documented exit codes."""
    try:
        rv = cli.main(args=argv, prog_name="tce", standalone_mode=False)
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except _DataError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except _UnsatError as exc:
        click.echo(str(exc), err=True)
        return 3
    return int(rv) if isinstance(rv, int) else 0


# ---------------------------------------------------------------------------
# corpus plumbing


def _load_corpus(dir_path: Path) -> "list[TceInstance]":
    instances = []
    for path in sorted(dir_path.glob("*.json")):
        if path.name.endswith(".manifest.json") or path.name == "run-manifest.json":
            continue
        inst, _report = parse_tce(path.read_text())
        if inst is None:
            raise _DataError(f"{path.name} is not a usable instance document")
        instances.append(inst)
    if not instances:
        raise _DataError(f"no instance documents in {dir_path}")
    return sorted(instances, key=lambda i: i.instance_id)


@cli.command("gen-corpus")
@click.option("--count", type=int, required=True)
@click.option("--seed", type=int, default=None)
@click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    required=True,
)
@click.pass_context
def gen_corpus_cmd(ctx: click.Context, count: int, seed: "int | None", out_dir: Path) -> None:
    """Generate a deterministic corpus of solved instances."""
    if count <= 0:
        raise click.UsageError("--count must be positive")
    seed = _resolve_seed(ctx, seed)
    started = _now()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        instances = generate_instances(count, seed=seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for inst in instances:
        path = out_dir / f"{inst.instance_id}.json"
        path.write_text(serialize_tce(inst) + "\n")
        outputs.append(path)
    for w in caught:
        click.echo(f"warning: {w.message}", err=True)
    _write_manifest(
        out_dir,
        "gen-corpus",
        inputs=[],
        outputs=outputs,
        seed=seed,
        overrides=_conf(ctx),
        started=started,
    )
    click.echo(f"wrote {len(outputs)} instances to {out_dir}")


@cli.command("normalize")
@click.argument(
    "raw_path", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    required=True,
)
@click.option("--tol", type=float, default=None)
@click.pass_context
def normalize_cmd(
    ctx: click.Context, raw_path: Path, out_dir: Path, tol: "float | None"
) -> None:
    """Filter and normalize raw assemblies into instance documents."""
    if tol is None:
        tol = float(_conf(ctx).get("tol", DEFAULT_SNAP_TOL))  # type: ignore[arg-type]
    started = _now()
    out_dir.mkdir(parents=True, exist_ok=True)
    log_lines = []
    outputs = []
    for n, line in enumerate(raw_path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = parse_raw(line)
            gate = filter_raw(raw, tol)
            if not gate.accepted:
                log_lines.append(f"line {n}: rejected ({gate.reason})")
                continue
            inst = normalize(raw, tol=tol)
        except ValueError as exc:
            log_lines.append(f"line {n}: rejected ({exc})")
            continue
        path = out_dir / f"{inst.instance_id}.json"
        path.write_text(serialize_tce(inst) + "\n")
        outputs.append(path)
        log_lines.append(f"line {n}: accepted {inst.instance_id}")
    log_path = out_dir / "normalize.log"
    log_path.write_text("".join(f"{entry}\n" for entry in log_lines))
    for entry in log_lines:
        click.echo(entry)
    _write_manifest(
        out_dir,
        "normalize",
        inputs=[raw_path],
        outputs=outputs + [log_path],
        seed=None,
        overrides=_conf(ctx),
        started=started,
    )


# ---------------------------------------------------------------------------
# task generation


def _float_ring(outline: Outline) -> "list[list[float]]":
    return [[x, y] for x, y in outline.vertices.to_float_ring()]


@cli.command("gen-task1")
@click.argument(
    "corpus_dir", type=click.Path(exists=True, file_okay=False, path_type=Path)
)
@click.option("--seed", type=int, default=None)
@click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    required=True,
)
@click.pass_context
def gen_task1_cmd(
    ctx: click.Context, corpus_dir: Path, seed: "int | None", out_dir: Path
) -> None:
    """Build silhouette-choice items with a sidecar answer key."""
    seed = _resolve_seed(ctx, seed)
    started = _now()
    instances = _load_corpus(corpus_dir)
    pool = [(inst.instance_id, inst.target_outline) for inst in instances]
    master = random.Random(seed)
    items = []
    keys = {}
    for inst in instances:
        item_seed = master.randrange(2**31)
        try:
            item = gen_task1(inst, pool, seed=item_seed)
        except ValueError as exc:
            raise _DataError(f"{inst.instance_id}: {exc}") from exc
        keys[item.instance_id] = item.answer_key
        # option source ids stay out of the payload: the correct one would
        # name the instance and give the answer away
        items.append(
            {
                "instance_id": item.instance_id,
                "options": {
                    _LABELS[n]: _float_ring(outline)
                    for n, (_src, outline) in enumerate(item.options)
                },
                "image_svg": item.image_svg,
                "shuffle_seed": item.shuffle_seed,
            }
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    items_path = out_dir / "items.jsonl"
    items_path.write_text("".join(json.dumps(i) + "\n" for i in items))
    keys_path = out_dir / "keys.json"
    keys_path.write_text(json.dumps(keys, indent=2, sort_keys=True) + "\n")
    _write_manifest(
        out_dir,
        "gen-task1",
        inputs=[corpus_dir],
        outputs=[items_path, keys_path],
        seed=seed,
        overrides=_conf(ctx),
        started=started,
    )
    click.echo(f"wrote {len(items)} items to {items_path}")


@cli.command("gen-task2")
@click.argument(
    "corpus_dir", type=click.Path(exists=True, file_okay=False, path_type=Path)
)
@click.option(
    "--variant", type=click.Choice(["full", "visual-centric"]), default="full"
)
@click.option("--shots", type=int, default=0)
@click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    required=True,
)
@click.pass_context
def gen_task2_cmd(
    ctx: click.Context, corpus_dir: Path, variant: str, shots: int, out_dir: Path
) -> None:
    """Build construction prompts, optionally with solved exemplars."""
    if shots < 0:
        raise click.UsageError("--shots must be >= 0")
    started = _now()
    instances = _load_corpus(corpus_dir)
    bundles = []
    for inst in instances:
        exemplars = [
            e for e in instances if e.instance_id != inst.instance_id
        ][:shots]
        bundle = gen_task2(
            inst, variant=variant.replace("-", "_"), exemplars=exemplars
        )
        bundles.append(
            {
                "instance_id": bundle.instance_id,
                "variant": bundle.variant,
                "text": bundle.text,
                "image_svg": bundle.image_svg,
                "exemplars": [e.instance_id for e in exemplars],
            }
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    bundles_path = out_dir / "bundles.jsonl"
    bundles_path.write_text("".join(json.dumps(b) + "\n" for b in bundles))
    _write_manifest(
        out_dir,
        "gen-task2",
        inputs=[corpus_dir],
        outputs=[bundles_path],
        seed=None,
        overrides=_conf(ctx),
        started=started,
    )
    click.echo(f"wrote {len(bundles)} prompts to {bundles_path}")


# ---------------------------------------------------------------------------
# scoring


def _record_dict(record) -> "dict[str, object]":
    return {
        "instance_id": record.instance_id,
        "tse": record.tse,
        "rge": record.rge,
        "pe": record.pe,
        "vpr_pass": record.vpr_pass,
        "iou": record.iou,
        "hausdorff": None if math.isinf(record.hausdorff) else record.hausdorff,
        "success": record.success,
    }


@cli.command("verify")
@click.argument(
    "responses_path", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@click.option(
    "--truth",
    "truth_dir",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    required=True,
)
@click.option(
    "--report",
    "report_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
)
@click.pass_context
def verify_cmd(
    ctx: click.Context, responses_path: Path, truth_dir: Path, report_path: Path
) -> None:
    """Verify construction responses against truth instances."""
    started = _now()
    try:
        responses = load_responses(responses_path)
    except ValueError as exc:
        raise _DataError(str(exc)) from exc
    truths = _load_corpus(truth_dir)
    try:
        report, records = run_task2(responses, truths)
    except (KeyError, ValueError) as exc:
        raise _DataError(str(exc)) from exc
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(report.to_csv())
    records_path = report_path.with_name(report_path.stem + ".records.jsonl")
    records_path.write_text(
        "".join(json.dumps(_record_dict(r)) + "\n" for r in records)
    )
    click.echo(report.to_text())
    _write_manifest(
        report_path,
        "verify",
        inputs=[responses_path, truth_dir],
        outputs=[report_path, records_path],
        seed=None,
        overrides=_conf(ctx),
        started=started,
    )


@cli.command("score-task1")
@click.argument(
    "responses_path", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@click.option(
    "--keys",
    "keys_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
)
@click.option(
    "--report", "report_path", type=click.Path(dir_okay=False, path_type=Path)
)
@click.pass_context
def score_task1_cmd(
    ctx: click.Context,
    responses_path: Path,
    keys_path: Path,
    report_path: "Path | None",
) -> None:
    """Score silhouette-choice responses against an answer key."""
    started = _now()
    try:
        responses = load_responses(responses_path, task=1)
        keys = json.loads(keys_path.read_text())
    except (ValueError, json.JSONDecodeError) as exc:
        raise _DataError(str(exc)) from exc
    if not isinstance(keys, dict):
        raise _DataError("answer key file must hold a JSON object")
    try:
        score = score_task1(responses, keys)
    except (KeyError, ValueError) as exc:
        raise _DataError(str(exc)) from exc
    click.echo(score.to_text())
    if report_path is not None:
        report_path.parent.mkdir(parents=True, exist_ok=True)
        report_path.write_text(score.to_csv())
        _write_manifest(
            report_path,
            "score-task1",
            inputs=[responses_path, keys_path],
            outputs=[report_path],
            seed=None,
            overrides=_conf(ctx),
            started=started,
        )


# ---------------------------------------------------------------------------
# solving and rendering


def _outline_from_doc(doc) -> Outline:
    vertices = doc.get("vertices") if isinstance(doc, dict) else None
    if not isinstance(vertices, list) or len(vertices) < 3:
        raise _DataError("outline document needs a 'vertices' list")
    points = []
    for entry in vertices:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise _DataError("outline vertices must be [x, y] pairs")
        coords = []
        for c in entry:
            if isinstance(c, bool) or not isinstance(c, (int, str)):
                raise _DataError(
                    "outline coordinates must be integers or exact strings"
                )
            value = parse_scalar(c) if isinstance(c, str) else ExactValue(c)
            if not is_exact(value):
                raise _DataError(f"coordinate {c!r} is not exact")
            coords.append(value)
        points.append(Point(coords[0], coords[1]))
    try:
        return make_outline(Polygon(points))
    except ValueError as exc:
        raise _DataError(str(exc)) from exc


@cli.command("solve")
@click.argument(
    "outline_path", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@click.option("--all", "find_all", is_flag=True, help="Search exhaustively.")
@click.option("--node-budget", type=int, default=None)
@click.option("--time-budget", type=float, default=None)
@click.option(
    "--out", "out_path", type=click.Path(dir_okay=False, path_type=Path)
)
@click.pass_context
def solve_cmd(
    ctx: click.Context,
    outline_path: Path,
    find_all: bool,
    node_budget: "int | None",
    time_budget: "float | None",
    out_path: "Path | None",
) -> None:
    """Fill an outline with the seven pieces; exit 3 when impossible."""
    started = _now()
    try:
        doc = json.loads(outline_path.read_text())
    except json.JSONDecodeError as exc:
        raise _DataError(f"not valid JSON: {exc}") from exc
    target = _outline_from_doc(doc)
    conf = _conf(ctx)
    defaults = SolverConfig()
    cfg = SolverConfig(
        node_budget=(
            node_budget
            if node_budget is not None
            else int(conf.get("node_budget", defaults.node_budget))  # type: ignore[arg-type]
        ),
        time_budget=(
            time_budget
            if time_budget is not None
            else float(conf.get("time_budget", defaults.time_budget))  # type: ignore[arg-type]
        ),
        find_all=find_all,
    )
    result = solve(target, cfg)
    if result is EXHAUSTED:
        raise _UnsatError("exhausted: budget ran out before a verdict")
    if result is None:
        raise _UnsatError("unsat: no assembly of the seven pieces fits")
    raw = RawAssembly(
        None, tuple((p.kind, p.vertices.to_float_ring()) for p in result)
    )
    text = serialize_tce(normalize(raw))
    if out_path is None:
        click.echo(text)
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text + "\n")
        _write_manifest(
            out_path,
            "solve",
            inputs=[outline_path],
            outputs=[out_path],
            seed=None,
            overrides=conf,
            started=started,
        )
        click.echo(f"solved: {out_path}")


@cli.command("render")
@click.argument(
    "source_path", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@click.option(
    "--out", "out_path", type=click.Path(dir_okay=False, path_type=Path)
)
@click.pass_context
def render_cmd(
    ctx: click.Context, source_path: Path, out_path: "Path | None"
) -> None:
    """Render an outline or a solved instance to SVG."""
    started = _now()
    text = source_path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _DataError(f"not valid JSON: {exc}") from exc
    if isinstance(doc, dict) and "final_state" in doc:
        inst, _report = parse_tce(text)
        if inst is None:
            raise _DataError("unusable instance document")
        svg = render_svg(inst.final_state)
    elif isinstance(doc, dict) and "vertices" in doc:
        ring = []
        for entry in doc["vertices"]:
            if (
                not isinstance(entry, (list, tuple))
                or len(entry) != 2
                or any(
                    isinstance(c, bool) or not isinstance(c, (int, float))
                    for c in entry
                )
            ):
                raise _DataError("outline vertices must be numeric [x, y] pairs")
            ring.append(Point(float(entry[0]), float(entry[1])))
        try:
            svg = render_svg(make_outline(Polygon(ring)))
        except ValueError as exc:
            raise _DataError(str(exc)) from exc
    else:
        raise _DataError("expected an outline or an instance document")
    if out_path is None:
        click.echo(svg)
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(svg)
        _write_manifest(
            out_path,
            "render",
            inputs=[source_path],
            outputs=[out_path],
            seed=None,
            overrides=_conf(ctx),
            started=started,
        )


@cli.command("serve")
@click.option("--port", type=int, default=None)
@click.option("--host", default=None)
@click.option("--allow-remote", is_flag=True)
def serve_cmd(port: "int | None", host: "str | None", allow_remote: bool) -> None:
    """Run the HTTP facade (loopback only unless --allow-remote)."""
    from . import service

    service.serve(port=port, host=host, allow_remote=allow_remote)
