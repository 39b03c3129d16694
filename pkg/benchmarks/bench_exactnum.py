#!/usr/bin/env python3
"""Time the exact arithmetic backends against each other.

The backend is fixed at import time, so each one runs in a fresh
interpreter (``TCEKIT_PURE_PYTHON=1`` forces the fallback) and the
parent process prints a side-by-side table with speedups.
"""

import argparse
import json
import os
import random
import subprocess
import sys
import time

WORKLOADS = ("arith", "area", "evaluate")


def _sample_values(count: int):
    from fractions import Fraction

    from tcekit.exactnum import ExactValue

    rng = random.Random(99)
    out = []
    for _ in range(count):
        out.append(
            ExactValue(
                Fraction(rng.randint(-40, 40), rng.choice((1, 2, 4))),
                Fraction(rng.randint(-40, 40), rng.choice((1, 2, 4))),
            )
        )
    return out


def run_arith(ops: int) -> float:
    """Pairwise add/sub/mul/compare on bounded operands."""
    vals = _sample_values(256)
    sink = 0
    t0 = time.perf_counter()
    for k in range(ops):
        a = vals[k & 255]
        b = vals[(k * 7 + 3) & 255]
        c = (a + b) * (a - b)
        if c < a:
            sink += 1
    elapsed = time.perf_counter() - t0
    assert 0 <= sink <= ops
    return elapsed


def run_area(ops: int) -> float:
    """Rigid transforms plus signed area over the canonical pieces."""
    from tcekit.exactnum import ExactValue
    from tcekit.geom import Point, RigidTransform, apply, polygon_area
    from tcekit.tangram import canonical_pieces

    polys = [p.vertices for p in canonical_pieces()]
    t = RigidTransform.from_parts(45, False, Point(ExactValue(1), ExactValue(2)))
    rounds = max(1, ops // 500)
    t0 = time.perf_counter()
    for _ in range(rounds):
        for poly in polys:
            polygon_area(apply(t, poly))
    return time.perf_counter() - t0


def run_evaluate(ops: int) -> float:
    """Full verification of a solved instance against itself."""
    from tcekit.solver import generate_instances
    from tcekit.tangram import serialize_tce
    from tcekit.verify import evaluate

    inst = generate_instances(1, seed=5)[0]
    text = serialize_tce(inst)
    rounds = max(1, ops // 50_000)
    t0 = time.perf_counter()
    for _ in range(rounds):
        record = evaluate(text, inst)
        assert record.success
    return time.perf_counter() - t0


_RUNNERS = {"arith": run_arith, "area": run_area, "evaluate": run_evaluate}


def _worker(ops: int, repeats: int) -> None:
    from tcekit.exactnum import BACKEND

    results = {}
    for name in WORKLOADS:
        runner = _RUNNERS[name]
        results[name] = min(runner(ops) for _ in range(repeats))
    json.dump({"backend": BACKEND, "results": results}, sys.stdout)


def _spawn(pure: bool, ops: int, repeats: int) -> dict:
    env = dict(os.environ)
    env.pop("TCEKIT_PURE_PYTHON", None)
    if pure:
        env["TCEKIT_PURE_PYTHON"] = "1"
    proc = subprocess.run(
        [sys.executable, __file__, "--worker", "--ops", str(ops), "--repeats", str(repeats)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ops", type=int, default=100_000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args(argv)
    if args.ops <= 0 or args.repeats <= 0:
        parser.error("--ops and --repeats must be positive")

    if args.worker:
        _worker(args.ops, args.repeats)
        return 0

    fast = _spawn(False, args.ops, args.repeats)
    pure = _spawn(True, args.ops, args.repeats)
    if args.json:
        json.dump({"default": fast, "pure": pure}, sys.stdout, indent=2)
        print()
        return 0

    if fast["backend"] == pure["backend"]:
        print("note: compiled backend unavailable, comparing pure against itself")
    header = f"{'workload':<10} {fast['backend']:>12} {pure['backend']:>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name in WORKLOADS:
        a = fast["results"][name]
        b = pure["results"][name]
        ratio = b / a if a > 0 else float("inf")
        print(f"{name:<10} {a:>10.4f} s {b:>10.4f} s {ratio:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
