"""Benchmark execution and scoring around model response files.

Scoring is strictly offline: responses live in line-delimited JSON files
and the verdicts are recomputed from text alone, so every number here is
reproducible without network access.  The gateway client is optional and
cache-first; its authentication secret is read from a named environment
variable at call time and never written anywhere.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import httpx

from .pipeline import PromptBundle
from .tangram import TceInstance
from .verify import CorpusReport, EvalConfig, VerificationRecord, aggregate, evaluate

_CHOICES = ("A", "B", "C", "D")


@dataclass(frozen=True)
class ResponseRecord:
    """One model response plus optional transport metadata."""

    instance_id: str
    raw_text: str
    task: int = 2
    latency: "float | None" = None
    retries: int = 0
    error: "str | None" = None

    def __post_init__(self) -> None:
        if self.task not in (1, 2):
            raise ValueError("task must be 1 or 2")


@dataclass(frozen=True)
class Task1Score:
    n: int
    acc: float
    invalid: float
    verdicts: tuple[tuple[str, str], ...]

    COLUMNS = ("Acc", "Invalid")

    def row(self) -> tuple[str, str]:
        return (f"{self.acc:.2f}", f"{self.invalid:.2f}")

    def to_csv(self) -> str:
        return ",".join(self.COLUMNS) + "\n" + ",".join(self.row()) + "\n"

    def to_text(self) -> str:
        row = self.row()
        widths = [max(len(c), len(v)) for c, v in zip(self.COLUMNS, row)]
        head = "  ".join(c.rjust(w) for c, w in zip(self.COLUMNS, widths))
        body = "  ".join(v.rjust(w) for v, w in zip(row, widths))
        return head + "\n" + body + "\n"


# ---------------------------------------------------------------------------
# Task 1: choice extraction and scoring

# keyword match is case-insensitive, the candidate letter is not: lowercase
# a-d are everyday words ("a", "d'accord") far more often than options
_EXPLICIT = re.compile(
    r"(?i:\b(?:answer|option)\b).{0,24}?(?<![A-Za-z0-9])([A-D])(?![A-Za-z0-9])",
    re.S,
)
_STANDALONE = re.compile(r"(?<![A-Za-z0-9])([A-D])(?![A-Za-z0-9])")
_FINAL_LINE = re.compile(r"\(?([A-D])\)?[.!]?")


def parse_choice(text: str) -> str:
    """Mine an option letter out of free-form text; ambiguity is invalid.

    Two rules, in order: the last explicit answer pattern ("answer ...",
    "option ...", or a final line that is just a letter) wins; failing
    that, a letter that is the only standalone candidate in the whole
    text.  Total and deterministic; trailing whitespace never matters.
    """

    hits = [(m.end(1), m.group(1)) for m in _EXPLICIT.finditer(text)]
    lines = text.rstrip().splitlines()
    if lines:
        tail = lines[-1].strip().strip("*`_\"' ")
        m = _FINAL_LINE.fullmatch(tail)
        if m:
            hits.append((len(text) + 1, m.group(1)))
    if hits:
        return max(hits)[1]
    seen = set(_STANDALONE.findall(text))
    if len(seen) == 1:
        return seen.pop()
    return "invalid"


def score_task1(
    responses: Sequence[ResponseRecord], keys: Mapping[str, str]
) -> Task1Score:
    """Accuracy and invalid rate as percentages over the response list.

    Invalid responses count against accuracy; correct, wrong, and
    invalid fractions always sum to exactly 100.
    """

    if not responses:
        raise ValueError("no responses to score")
    verdicts = []
    correct = invalid = 0
    for rec in responses:
        if rec.instance_id not in keys:
            raise KeyError(f"no answer key for instance {rec.instance_id!r}")
        key = keys[rec.instance_id]
        if key not in _CHOICES:
            raise ValueError(f"answer key for {rec.instance_id!r} is not A-D")
        got = parse_choice(rec.raw_text)
        if got == "invalid":
            verdict = "invalid"
            invalid += 1
        elif got == key:
            verdict = "correct"
            correct += 1
        else:
            verdict = "wrong"
        verdicts.append((rec.instance_id, verdict))
    n = len(responses)
    return Task1Score(n, 100.0 * correct / n, 100.0 * invalid / n, tuple(verdicts))


# ---------------------------------------------------------------------------
# Task 2: submission extraction and batch verification

_FENCE = re.compile(r"```[^\n]*\n(.*?)```", re.S)


def _longest_braced(text: str) -> str:
    best = ""
    depth = 0
    start = -1
    for idx, ch in enumerate(text):
        if ch == "{":
            if depth == 0:
                start = idx
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0 and idx + 1 - start > len(best):
                best = text[start : idx + 1]
    return best


def extract_submission(text: str) -> str:
    """Candidate document text for the parser; empty when none is found.

    Fenced code blocks take precedence over surrounding prose; within
    the chosen text the longest balanced-brace span is the candidate.
    The parser owns all judgement about whether it is a valid document.
    """

    blocks = _FENCE.findall(text)
    candidates = blocks if blocks else [text]
    return max((_longest_braced(c) for c in candidates), key=len)


def run_task2(
    responses: Sequence[ResponseRecord],
    truths: "Mapping[str, TceInstance] | Iterable[TceInstance]",
    cfg: EvalConfig = EvalConfig(),
    max_parallel: int = 8,
) -> tuple[CorpusReport, tuple[VerificationRecord, ...]]:
    """Extract, verify, and aggregate one response file against truths.

    Records come back in response order; the aggregate is independent of
    that order and of the parallelism degree.
    """

    if isinstance(truths, Mapping):
        table = dict(truths)
    else:
        table = {t.instance_id: t for t in truths}
    seen: set[str] = set()
    for rec in responses:
        if rec.instance_id in seen:
            raise ValueError(f"duplicate instance id {rec.instance_id!r}")
        seen.add(rec.instance_id)
        if rec.instance_id not in table:
            raise KeyError(f"no ground truth for instance {rec.instance_id!r}")

    def grade(rec: ResponseRecord) -> VerificationRecord:
        return evaluate(extract_submission(rec.raw_text), table[rec.instance_id], cfg)

    if max_parallel <= 1 or len(responses) <= 1:
        records = tuple(grade(r) for r in responses)
    else:
        with ThreadPoolExecutor(max_workers=max_parallel) as pool:
            records = tuple(pool.map(grade, responses))
    return aggregate(records), records


def report_csv(reports: Mapping[str, CorpusReport]) -> str:
    lines = ["Model," + ",".join(CorpusReport.COLUMNS)]
    for name, report in reports.items():
        lines.append(name + "," + ",".join(report.row()))
    return "\n".join(lines) + "\n"


def render_report(reports: Mapping[str, CorpusReport]) -> str:
    """Side-by-side text table, one row per model."""

    head = ("Model",) + CorpusReport.COLUMNS
    rows = [(name,) + report.row() for name, report in reports.items()]
    widths = [max(len(r[c]) for r in [head, *rows]) for c in range(len(head))]
    out = []
    for row in [head, *rows]:
        first = row[0].ljust(widths[0])
        rest = "  ".join(v.rjust(w) for v, w in zip(row[1:], widths[1:]))
        out.append(f"{first}  {rest}".rstrip())
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Response files


def load_responses(path: "str | Path", task: int = 2) -> list[ResponseRecord]:
    """Read a line-delimited response file; blank lines are skipped."""

    records = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
            instance_id = doc["instance_id"]
            raw_text = doc["raw_text"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"bad response on line {lineno}: {exc}") from exc
        if not isinstance(instance_id, str) or not isinstance(raw_text, str):
            raise ValueError(f"bad response on line {lineno}: ids and text are strings")
        records.append(
            ResponseRecord(
                instance_id,
                raw_text,
                task=doc.get("task", task),
                latency=doc.get("latency"),
                retries=doc.get("retries", 0),
                error=doc.get("error"),
            )
        )
    return records


def save_responses(records: Iterable[ResponseRecord], path: "str | Path") -> None:
    lines = []
    for rec in records:
        doc = {"instance_id": rec.instance_id, "raw_text": rec.raw_text, "task": rec.task}
        if rec.latency is not None:
            doc["latency"] = rec.latency
        if rec.retries:
            doc["retries"] = rec.retries
        if rec.error is not None:
            doc["error"] = rec.error
        lines.append(json.dumps(doc))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


# ---------------------------------------------------------------------------
# Gateway client


@dataclass(frozen=True)
class GatewayConfig:
    """Where and how to reach a model endpoint.

    ``token_env`` names the environment variable holding the secret; the
    secret itself is read per call and never stored in config or cache.
    """

    endpoint: str
    template: str = "chat"
    token_env: str = "TCE_GATEWAY_TOKEN"
    max_parallel: int = 4
    max_retries: int = 2
    backoff: float = 0.25
    timeout: float = 60.0
    cache_dir: "str | Path | None" = None

    def __post_init__(self) -> None:
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be at least 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must not be negative")
        if self.backoff <= 0 or self.timeout <= 0:
            raise ValueError("backoff and timeout must be positive")


def load_gateway_config(path: "str | Path") -> GatewayConfig:
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, dict):
        raise ValueError("gateway config must be a JSON object")
    known = {f.name for f in fields(GatewayConfig)}
    stray = set(doc) - known
    if stray:
        raise ValueError(f"unknown gateway config keys: {sorted(stray)}")
    return GatewayConfig(**doc)


def _chat_request(bundle: PromptBundle) -> dict:
    parts: list[dict] = [{"type": "text", "text": bundle.text}]
    if bundle.image_svg:
        data = base64.b64encode(bundle.image_svg.encode("utf-8")).decode("ascii")
        parts.append(
            {"type": "image", "media_type": "image/svg+xml", "data": data}
        )
    return {"messages": [{"role": "user", "content": parts}]}


_TEMPLATES = {"chat": _chat_request}


def _cache_name(instance_id: str, template: str, variant: str) -> str:
    raw = "\x1f".join((instance_id, template, variant))
    digest = hashlib.sha256(raw.encode("utf-8")).hexdigest()[:12]
    safe = re.sub(r"[^-A-Za-z0-9_.]", "_", f"{instance_id}.{template}.{variant}")
    return f"{safe[:80]}-{digest}.json"


def _record_to_doc(rec: ResponseRecord) -> dict:
    return {
        "instance_id": rec.instance_id,
        "raw_text": rec.raw_text,
        "task": rec.task,
        "latency": rec.latency,
        "retries": rec.retries,
    }


def _fetch_one(
    client: httpx.Client,
    bundle: PromptBundle,
    cfg: GatewayConfig,
    headers: dict,
    cache: "Path | None",
) -> ResponseRecord:
    path = (
        cache / _cache_name(bundle.instance_id, cfg.template, bundle.variant)
        if cache
        else None
    )
    if path is not None and path.exists():
        doc = json.loads(path.read_text())
        return ResponseRecord(**doc)
    body = _TEMPLATES[cfg.template](bundle)
    started = time.monotonic()
    error = "no attempt made"
    attempt = 0
    for attempt in range(cfg.max_retries + 1):
        if attempt:
            time.sleep(cfg.backoff * 2 ** (attempt - 1))
        try:
            resp = client.post(cfg.endpoint, json=body, headers=headers)
        except httpx.HTTPError as exc:
            error = f"transport failure: {exc}"
            continue
        if resp.status_code == 200:
            try:
                content = resp.json()["content"]
            except (json.JSONDecodeError, KeyError, TypeError):
                content = None
            if not isinstance(content, str):
                error = "malformed gateway response"
                break
            rec = ResponseRecord(
                bundle.instance_id,
                content,
                task=2,
                latency=time.monotonic() - started,
                retries=attempt,
            )
            if path is not None:
                tmp = path.with_name(path.name + f".tmp{os.getpid()}")
                tmp.write_text(json.dumps(_record_to_doc(rec)))
                os.replace(tmp, path)
            return rec
        error = f"gateway status {resp.status_code}"
        if resp.status_code != 429 and resp.status_code < 500:
            break
    # failures are never cached, so a later run can still succeed
    return ResponseRecord(
        bundle.instance_id,
        "",
        task=2,
        latency=time.monotonic() - started,
        retries=attempt,
        error=error,
    )


def call_gateway(
    bundles: Sequence[PromptBundle],
    cfg: GatewayConfig,
    transport: "httpx.BaseTransport | None" = None,
) -> list[ResponseRecord]:
    """Send one request per bundle, cache-first, with bounded parallelism.

    Results keep bundle order.  Transport failures surface as records
    with empty text and error metadata rather than exceptions, so a long
    run always completes.
    """

    if cfg.template not in _TEMPLATES:
        raise ValueError(f"unknown request template {cfg.template!r}")
    cache = Path(cfg.cache_dir) if cfg.cache_dir is not None else None
    if cache is not None:
        cache.mkdir(parents=True, exist_ok=True)
    token = os.environ.get(cfg.token_env) if cfg.token_env else None
    headers = {"authorization": f"Bearer {token}"} if token else {}
    client = httpx.Client(transport=transport, timeout=cfg.timeout)
    try:
        with ThreadPoolExecutor(max_workers=cfg.max_parallel) as pool:
            return list(
                pool.map(
                    lambda b: _fetch_one(client, b, cfg, headers, cache), bundles
                )
            )
    finally:
        client.close()
