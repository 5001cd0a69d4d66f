"""Command line: ``bipcheck analyze|verify|sweep|decompose|spectrum``.

Exit codes: 0 success, 1 a check failed, 2 spec/usage error, 3 an enumeration
cap was exceeded.  Flags may also be set through ``BIPCHECK_<FLAG>``
environment variables (e.g. ``BIPCHECK_SUBSET_CAP=20``); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import combinatorics as comb
from .corpus import FAMILIES, family_docs
from .errors import BipcheckError, TooLarge
from .graphs import RegularMultigraph
from .groups import cycle_notation
from .harness import FAIL, GraphAnalysis, sweep, verify_graph
from .report import (analysis_report, check_dict, csv_row, graph_identity, instance_row, margin_table,
                     ratios_dict, write_csv)
from .spec import SCHEMA_VERSION, SpecError, build_graph, load_spec

EXIT_OK, EXIT_FAIL, EXIT_SPEC, EXIT_CAP = 0, 1, 2, 3
ENV_PREFIX = "BIPCHECK_"

log = logging.getLogger("bipcheck")


def _env(name: str, default=None, kind=str):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return default
    try:
        return kind(raw)
    except ValueError:
        raise SystemExit(f"bipcheck: bad value {raw!r} for {ENV_PREFIX + name.upper()}")


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _load(args):
    doc = load_spec(args.spec)
    built = build_graph(doc)
    subset_cap = args.subset_cap if args.subset_cap is not None else (built.subset_cap or comb.SUBSET_CAP)
    ternary_cap = args.ternary_cap if args.ternary_cap is not None else (built.ternary_cap or comb.TERNARY_CAP)
    return built, subset_cap, ternary_cap


def _identity_graph(gr: RegularMultigraph) -> RegularMultigraph:
    """The d * identity multigraph used by ``--debug-corrupt``."""
    return RegularMultigraph(gr.d * np.eye(gr.n, dtype=np.int64), gr.d, "debug_identity", {}, gr.labels)


def _context(args) -> tuple[GraphAnalysis, dict]:
    built, subset_cap, ternary_cap = _load(args)
    gr = built.graph
    spectral = _identity_graph(gr) if args.debug_corrupt else None
    if spectral is not None:
        log.warning("debug: spectral stage uses d * identity instead of the adjacency")
    ctx = GraphAnalysis(gr, subset_cap=subset_cap, ternary_cap=ternary_cap, spectrum_graph=spectral,
                        seed=args.seed)
    return ctx, built.spec


def cmd_analyze(args) -> int:
    ctx, spec = _context(args)
    doc, capped = analysis_report(ctx, spec)
    with _output(args.out) as fh:
        if args.format == "csv":
            reports = verify_graph(ctx)
            write_csv([csv_row(ctx, ctx.gr.family, ctx.gr.n, ctx.gr.d, reports)], fh)
        else:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    if capped:
        skipped = [k for k, v in doc["constants"].items() if "skipped" in v]
        log.error("enumeration cap exceeded for: %s", ", ".join(skipped))
        return EXIT_CAP
    return EXIT_OK


def cmd_verify(args) -> int:
    ctx, spec = _context(args)
    reports = verify_graph(ctx)
    if args.out:
        doc = {"schema_version": SCHEMA_VERSION, "kind": "verification",
               "graph": graph_identity(ctx.gr, spec, spec.get("name")),
               "checks": [check_dict(r) for r in reports]}
        with _output(args.out) as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    else:
        print(margin_table(reports))
    failed = [r.check_id for r in reports if r.verdict == FAIL]
    counts = {v: sum(r.verdict == v for r in reports) for v in ("pass", "fail", "inapplicable")}
    print(f"{counts['pass']} pass, {counts['fail']} fail, {counts['inapplicable']} inapplicable", file=sys.stderr)
    if failed:
        log.error("failing checks: %s", ", ".join(failed))
        return EXIT_FAIL
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.family not in FAMILIES:
        raise SpecError(f"unknown family {args.family!r}; choose from {', '.join(sorted(FAMILIES))}", "--family")
    docs = family_docs(args.family, args.min, args.max)
    rows: list[dict | None] = [None] * len(docs)
    todo = []
    for i, doc in enumerate(docs):
        try:
            gr = build_graph(doc).graph
        except SpecError as exc:
            rows[i] = csv_row(None, args.family, 0, 0, skipped=exc.message)
            continue
        if gr.n > args.subset_cap:
            rows[i] = csv_row(None, args.family, gr.n, gr.d, skipped=f"n={gr.n} exceeds subset cap {args.subset_cap}")
            continue
        todo.append((i, doc["name"], gr))
    result = sweep([(name, gr) for _, name, gr in todo], jobs=args.jobs, subset_cap=args.subset_cap,
                   ternary_cap=args.ternary_cap, seed=args.seed)
    for (i, _, _), res in zip(todo, result.instances):
        rows[i] = instance_row(res, args.family)
    with _output(args.out) as fh:
        if args.format == "json":
            json.dump({"schema_version": SCHEMA_VERSION, "kind": "sweep", "rows": rows,
                       "min_ratios": ratios_dict(result.min_ratios)}, fh, indent=2)
            fh.write("\n")
        else:
            write_csv(rows, fh)
    failures = result.failures
    summary = {"schema_version": SCHEMA_VERSION, "kind": "sweep_summary", "family": args.family,
               "min": args.min, "max": args.max, "instances": len(docs),
               "skipped": sum(r["verdicts"].startswith("skipped:") for r in rows),
               "failures": [f"{name}:{rep.check_id}" for name, rep in failures],
               "min_ratios": ratios_dict(result.min_ratios)}
    text = ", ".join(f"{k}={'-' if v is None else v}" for k, v in result.min_ratios.items())
    print(f"sweep {args.family} [{args.min}, {args.max}]: {len(docs)} instances, "
          f"{summary['skipped']} skipped, {len(failures)} failing checks; min tightness ratios: {text}",
          file=sys.stderr)
    if args.out not in (None, "-"):
        with open(f"{args.out}.summary.json", "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    return EXIT_FAIL if failures else EXIT_OK


def cmd_decompose(args) -> int:
    built, _, _ = _load(args)
    gr = _identity_graph(built.graph) if args.debug_corrupt else built.graph
    with _output(args.out) as fh:
        for p in comb.birkhoff_decompose(gr):
            fh.write(cycle_notation(p) + "\n")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    ctx, _ = _context(args)
    with _output(args.out) as fh:
        fh.write(", ".join(f"{x:.9f}" for x in ctx.spectrum.eigenvalues) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=_env("out"), help="output path (default stdout)")
    common.add_argument("--subset-cap", type=int, default=_env("subset_cap", None, int),
                        help=f"max vertices for subset enumeration (default {comb.SUBSET_CAP})")
    common.add_argument("--ternary-cap", type=int, default=_env("ternary_cap", None, int),
                        help=f"max vertices for (L, R) enumeration (default {comb.TERNARY_CAP})")
    common.add_argument("--seed", type=int, default=_env("seed", 0, int), help="seed for sampled subsets")
    common.add_argument("-v", "--verbose", action="store_true")

    with_spec = argparse.ArgumentParser(add_help=False)
    with_spec.add_argument("--spec", required=True, help="graph-spec JSON document")
    with_spec.add_argument("--debug-corrupt", action="store_true",
                           help="replace the spectral-stage matrix by d * identity (testing aid)")

    p = argparse.ArgumentParser(prog="bipcheck", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common, with_spec], help="constants, spectrum and checks")
    a.add_argument("--format", choices=("json", "csv"), default=_env("format", "json"))
    a.set_defaults(func=cmd_analyze)
    v = sub.add_parser("verify", parents=[common, with_spec], help="run the inequality checks")
    v.set_defaults(func=cmd_verify)
    s = sub.add_parser("sweep", parents=[common], help="checks over a parametrised family")
    s.add_argument("--family", required=True, help=f"one of {', '.join(sorted(FAMILIES))}")
    s.add_argument("--min", type=int, default=_env("min", 3, int))
    s.add_argument("--max", type=int, default=_env("max", 13, int))
    s.add_argument("--jobs", type=int, default=_env("jobs", 1, int))
    s.add_argument("--format", choices=("json", "csv"), default=_env("format", "csv"))
    s.set_defaults(func=cmd_sweep)
    d = sub.add_parser("decompose", parents=[common, with_spec], help="Birkhoff-von Neumann permutations")
    d.set_defaults(func=cmd_decompose)
    sp = sub.add_parser("spectrum", parents=[common, with_spec], help="normalized eigenvalues, descending")
    sp.set_defaults(func=cmd_spectrum)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="bipcheck: %(levelname)s: %(message)s", stream=sys.stderr)
    if args.command == "sweep":
        args.subset_cap = args.subset_cap or comb.SUBSET_CAP
        args.ternary_cap = args.ternary_cap or comb.TERNARY_CAP
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"bipcheck: spec error at {exc.location}: {exc.message}", file=sys.stderr)
        return EXIT_SPEC
    except TooLarge as exc:
        print(f"bipcheck: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except BipcheckError as exc:
        print(f"bipcheck: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
