"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 a computed value disagrees
with its expectation, 3 a precondition of the requested computation fails.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
import zlib
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .coords import DEFAULT_TOWER_CAP, as_fraction, tower
from .errors import (
    BudgetExceeded,
    DegreeUnassignable,
    GraphonLabError,
    LevelTooLarge,
    MeasureMismatch,
    MTooLarge,
    PreconditionViolated,
    TooManyBlocks,
)
from .graphons import (
    ConstantGraphon,
    HalfGraphon,
    SvejkGraphon,
    cf_for_copy,
    degree,
    extract_cf_copy,
    fmt_value,
    from_descriptor,
    make_svejk,
)
from .graphons.svejk import PARTS, Q_DEGREE_BOUND, TABLE_DEGREES, part_interval
from .sets import BlockGrid, PartitionSpec

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_PRECONDITION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def stage_seed(seed: int, stage: str) -> int:
    """Independent seed for a named stage of a command."""
    ss = np.random.SeedSequence([seed & (2**64 - 1), zlib.crc32(stage.encode())])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# -- graphon descriptors --------------------------------------------------------


def parse_graphon(text: str, args) -> object:
    """``constant:1/2``, ``cf:4``, ``svejk``, ``half``, ``step:FILE``, inline JSON or ``@FILE``."""
    if text.startswith("@"):
        return from_descriptor(json.loads(Path(text[1:]).read_text()))
    if text.lstrip().startswith("{"):
        return from_descriptor(json.loads(text))
    kind, _, arg = text.partition(":")
    arg = arg.split("=", 1)[-1] if arg else arg
    if kind == "constant":
        return from_descriptor({"kind": "constant", "p": arg or "1/2"})
    if kind in ("cf", "conlon-fox"):
        if not arg:
            raise UsageError("cf needs m, e.g. cf:4")
        return from_descriptor({"kind": "cf", "m": int(arg)})
    if kind == "svejk":
        return make_svejk(args.tail_k, args.tower_cap)
    if kind == "half":
        return from_descriptor({"kind": "half"})
    if kind == "step":
        return from_descriptor(json.loads(Path(arg).read_text()))
    raise UsageError(f"unknown graphon {text!r}")


def _fmt(v, args) -> str:
    if args.decimal and not isinstance(v, (bool, str)):
        return f"{float(v):.15g}"
    return fmt_value(v)


# -- output -----------------------------------------------------------------------


def emit(args, command: str, inputs: dict, outputs: dict, rows: Optional[list] = None, out=None) -> None:
    out = out or sys.stdout
    digest = hashlib.sha256(json.dumps(inputs, sort_keys=True, default=str).encode()).hexdigest()[:16]
    config = {
        "seed": args.seed, "samples": args.samples, "tol": args.tol,
        "tower_cap": args.tower_cap, "tail_k": args.tail_k,
    }
    if args.format == "csv":
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["key", "value"])
            for k, v in outputs.items():
                w.writerow([k, v])
        out.write(buf.getvalue())
        return
    record = {"command": command, "config": config, "inputs": inputs, "inputs_digest": digest,
              "outputs": outputs}
    if rows is not None:
        record["rows"] = rows
    out.write(json.dumps(record, indent=1, default=str) + "\n")


# -- partitions --------------------------------------------------------------------


def load_partition_arg(text: str, n_blocks: int) -> PartitionSpec:
    """A partition file, ``trivial`` or ``coords:j`` (split by the first ``j`` block bits)."""
    grid = BlockGrid.uniform(n_blocks)
    if text == "trivial":
        return PartitionSpec.trivial(grid)
    if text.startswith("coords:"):
        j = int(text.split(":", 1)[1])
        return PartitionSpec.from_labels(grid, np.arange(n_blocks) & ((1 << j) - 1))
    from .regularity import load_partition

    P = load_partition(text)
    return P if P.grid is not None else P.on_grid(grid)


# -- commands ----------------------------------------------------------------------


def cmd_eval(args) -> int:
    g = parse_graphon(args.graphon, args)
    x, y = as_fraction(Fraction(args.x)), as_fraction(Fraction(args.y))
    if args.scaled:
        x, y = x / 13, y / 13
    v = g.evaluate(x, y)
    emit(args, "eval", {"graphon": args.graphon, "x": str(x), "y": str(y)}, {"value": _fmt(v, args)})
    return EXIT_OK


def _svejk_degrees(g: SvejkGraphon, args) -> tuple[list, bool]:
    rng = np.random.default_rng(stage_seed(args.seed, "degrees"))
    rows, ok = [], True
    for p in PARTS:
        lo, hi = part_interval(p)
        xs = [lo + (hi - lo) * Fraction(float(u)) for u in rng.random(args.points)]
        ds = [float(g.degree(x, args.tol)) for x in xs]
        if p == "Q":
            expected = f">= {Q_DEGREE_BOUND}"
            good = min(ds) >= float(Q_DEGREE_BOUND) - args.tol
        else:
            expected = str(TABLE_DEGREES[p])
            good = max(abs(d - float(TABLE_DEGREES[p])) for d in ds) <= args.tol
        ok &= good
        rows.append({"part": p, "min": f"{min(ds):.15g}", "max": f"{max(ds):.15g}",
                     "mean": f"{sum(ds) / len(ds):.15g}", "expected": expected, "ok": good})
    return rows, ok


def cmd_degrees(args) -> int:
    g = parse_graphon(args.graphon, args)
    if isinstance(g, SvejkGraphon):
        rows, ok = _svejk_degrees(g, args)
    else:
        rng = np.random.default_rng(stage_seed(args.seed, "degrees"))
        xs = [Fraction(float(u)) for u in rng.random(args.points)]
        ds = [degree(g, x, args.tol) for x in xs]
        row = {"part": "all", "min": _fmt(min(ds), args), "max": _fmt(max(ds), args),
               "mean": f"{float(sum(ds)) / len(ds):.15g}"}
        ok = True
        if isinstance(g, ConstantGraphon):
            row["expected"] = _fmt(g.p, args)
            ok = all(abs(float(d) - float(g.p)) <= args.tol for d in ds)
        elif isinstance(g, HalfGraphon):
            spot = degree(g, Fraction(1, 4))
            row["expected"] = "x"
            row["degree_at_1/4"] = _fmt(spot, args)
            ok = spot == Fraction(1, 4) and all(abs(float(d) - float(x)) <= args.tol for d, x in zip(ds, xs))
        else:
            row["expected"] = ""
        row["ok"] = ok
        rows = [row]
    emit(args, "degrees", {"graphon": args.graphon, "points": args.points}, {"ok": ok}, rows)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_sample(args) -> int:
    from .sampling import w_random_graph

    g = parse_graphon(args.graphon, args)
    G = w_random_graph(g, args.k, stage_seed(args.seed, "sample"))
    emit(args, "sample", {"graphon": args.graphon, "k": args.k},
         {"n": G.n, "edges": " ".join(f"{i}-{j}" for i, j in sorted(G.edges))})
    return EXIT_OK


def cmd_density(args) -> int:
    from .constraints import parse_expression
    from .constraints.evaluate import evaluate_expression

    g = parse_graphon(args.graphon, args)
    e = parse_expression(args.expression)
    v = evaluate_expression(e, g, args.samples, stage_seed(args.seed, "density"))
    emit(args, "density", {"graphon": args.graphon, "expression": args.expression},
         {"value": _fmt(v.value, args), "stderr": f"{v.stderr:.6g}", "exact": v.exact})
    return EXIT_OK


def cmd_partition(args) -> int:
    from .regularity import deviation_exact, fk_partition, save_partition
    from .regularity.deviation import MAX_EXACT_BLOCKS

    g = parse_graphon(args.graphon, args)
    eps = Fraction(args.epsilon)
    P, trace = fk_partition(g, eps, args.restarts, stage_seed(args.seed, "partition"))
    if args.out:
        save_partition(P, args.out)
    if args.trace:
        Path(args.trace).write_text(trace.to_csv())
    outputs = {"parts": len(P), "steps": len(trace.records) - 1, "energy": _fmt(trace.energies[-1], args),
               "monotone": trace.is_monotone()}
    if P.grid.size <= MAX_EXACT_BLOCKS:
        outputs["final_deviation"] = _fmt(deviation_exact(g, P).deviation, args)
    rows = [{"step": s, "parts": k, "energy": _fmt(e, args)} for s, k, e in trace.records]
    emit(args, "partition", {"graphon": args.graphon, "epsilon": str(eps)}, outputs, rows)
    return EXIT_OK


def cmd_deviation(args) -> int:
    from .regularity import deviation_exact, deviation_heuristic

    g = parse_graphon(args.graphon, args)
    P = load_partition_arg(args.partition, g.grid.size)
    if args.heuristic:
        w = deviation_heuristic(g, P, args.restarts, stage_seed(args.seed, "deviation"))
    else:
        w = deviation_exact(g, P)
    emit(args, "deviation", {"graphon": args.graphon, "partition": args.partition},
         {"deviation": _fmt(w.deviation, args), "method": w.method,
          "A": w.A.to_dict(), "B": w.B.to_dict()})
    return EXIT_OK


def cmd_refute(args) -> int:
    from .regularity import refute_cf, refute_verify, save_report

    P = load_partition_arg(args.partition, 1 << args.m)
    report = refute_cf(args.m, P)
    verdict = refute_verify(report, args.m, P)
    if args.out:
        save_report(report, args.out)
    emit(args, "refute", {"m": args.m, "partition": args.partition}, {
        "parts": report.k, "i0": report.i0, "discrepancy": _fmt(report.discrepancy, args),
        "implied_epsilon": _fmt(report.implied_epsilon, args), "verified": verdict.ok,
        "failed_checks": verdict.failures, "warnings": report.warnings,
    })
    return EXIT_OK if verdict.ok else EXIT_MISMATCH


def _load_parts(text: Optional[str], g):
    from .constraints import PartEntry, PartTable, svejk_part_table
    from .sets import IntervalSet

    if text is None:
        return PartTable((PartEntry("X", Fraction(1), Fraction(0), IntervalSet.unit()),))
    if text == "svejk":
        return svejk_part_table()
    return PartTable.load(text)


def cmd_constraint(args) -> int:
    from .constraints.evaluate import evaluate_decorated, evaluate_ordinary
    from .constraints.files import load_constraints

    g = parse_graphon(args.graphon, args)
    lines = load_constraints(args.file)
    parts = _load_parts(args.parts, g)
    rows, ok = [], True
    for i, cl in enumerate(lines):
        seed = stage_seed(args.seed, f"constraint:{i}")
        if cl.constraint.decorated:
            v = evaluate_decorated(cl.constraint, g, parts, args.root_samples, args.nonroot_samples,
                                   seed, args.estimator)
        else:
            v = evaluate_ordinary(cl.constraint, g, args.samples, seed)
        ok &= v.ok
        rows.append({"line": cl.line, "constraint": cl.text, "status": v.status,
                     "lhs": _fmt(v.lhs, args), "lhs_stderr": f"{v.lhs_stderr:.6g}",
                     "rhs": _fmt(v.rhs, args), "rhs_stderr": f"{v.rhs_stderr:.6g}",
                     "acceptance": "" if v.acceptance is None else f"{v.acceptance:.6g}"})
    emit(args, "constraint", {"file": args.file, "graphon": args.graphon, "parts": args.parts},
         {"all_ok": ok}, rows)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_extract_cf(args) -> int:
    svejk = make_svejk(args.tail_k, args.tower_cap)
    copy = extract_cf_copy(args.n, svejk)
    ref = cf_for_copy(args.n, args.tower_cap)
    rng = np.random.default_rng(stage_seed(args.seed, "extract-cf"))
    pts = rng.random((args.pairs, 2))
    diff = max(abs(Fraction(copy.evaluate(x, y)) - Fraction(ref.evaluate(x, y))) for x, y in pts)
    emit(args, "extract-cf", {"n": args.n, "pairs": args.pairs},
         {"m": tower(args.n, args.tower_cap), "max_abs_diff": _fmt(diff, args)})
    return EXIT_OK if diff == 0 else EXIT_MISMATCH


# -- entry point -------------------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, default) -> None:
    """``default=SUPPRESS`` keeps a subcommand from overwriting earlier values."""

    def d(v):
        return v if default is None else default

    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--samples", type=int, default=d(100_000))
    p.add_argument("--tol", type=float, default=d(1e-8))
    p.add_argument("--tower-cap", type=int, default=d(DEFAULT_TOWER_CAP))
    p.add_argument("--tail-k", type=int, default=d(40))
    p.add_argument("--format", choices=("json", "csv"), default=d("json"))
    p.add_argument("--decimal", action="store_true", default=d(False), help="print every number in decimal")


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the command name
    common = _Parser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    p = _Parser(prog="graphonlab", description="Graphon constructions, regularity and constraints.")
    p.add_argument("--version", action="version", version=__version__)
    _global_flags(p, None)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    s = command("eval", "value W(x, y)")
    s.add_argument("graphon")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--scaled", action="store_true", help="x and y are given on [0, 13]")
    s.set_defaults(func=cmd_eval)

    s = command("degrees", "degree profile against expected values")
    s.add_argument("graphon")
    s.add_argument("--points", type=int, default=200)
    s.set_defaults(func=cmd_degrees)

    s = command("sample", "one W-random graph")
    s.add_argument("graphon")
    s.add_argument("k", type=int)
    s.set_defaults(func=cmd_sample)

    s = command("density", "density expression such as 'K3' or 'C4 + 1/2'")
    s.add_argument("graphon")
    s.add_argument("expression")
    s.set_defaults(func=cmd_density)

    s = command("partition", "energy-increment refinement")
    s.add_argument("graphon")
    s.add_argument("epsilon")
    s.add_argument("--out")
    s.add_argument("--trace")
    s.add_argument("--restarts", type=int, default=20)
    s.set_defaults(func=cmd_partition)

    s = command("deviation", "largest regularity defect of a partition")
    s.add_argument("graphon")
    s.add_argument("partition")
    s.add_argument("--heuristic", action="store_true")
    s.add_argument("--restarts", type=int, default=20)
    s.set_defaults(func=cmd_deviation)

    s = command("refute", "witness that a partition of W_CF^m is not regular")
    s.add_argument("m", type=int)
    s.add_argument("partition")
    s.add_argument("--out")
    s.set_defaults(func=cmd_refute)

    s = command("constraint", "check constraints from a file")
    s.add_argument("file")
    s.add_argument("graphon")
    s.add_argument("--parts")
    s.add_argument("--root-samples", type=int, default=200)
    s.add_argument("--nonroot-samples", type=int, default=2000)
    s.add_argument("--estimator", choices=("product", "bernoulli"), default="product")
    s.set_defaults(func=cmd_constraint)

    s = command("extract-cf", "compare the embedded copy with W_CF^t(n)")
    s.add_argument("n", type=int)
    s.add_argument("--pairs", type=int, default=10_000)
    s.set_defaults(func=cmd_extract_cf)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.samples < 1 or args.tol <= 0 or args.tower_cap < 0 or args.tail_k < 1:
        parser.error("--samples, --tol and --tail-k must be positive, --tower-cap non-negative")
    if not 0 <= args.seed < 2**64:
        parser.error("--seed must be a 64-bit unsigned integer")
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except (PreconditionViolated, LevelTooLarge, TooManyBlocks, BudgetExceeded, MTooLarge) as exc:
        print(f"graphonlab: precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (DegreeUnassignable, MeasureMismatch) as exc:
        print(f"graphonlab: mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (UsageError, GraphonLabError, ValueError, OSError, KeyError) as exc:
        print(f"graphonlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"graphonlab: {args.command} took {time.perf_counter() - t0:.3f} s", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
