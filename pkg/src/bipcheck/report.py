"""Machine-readable reports: JSON documents, fixed-column CSV rows and a text margin table."""

from __future__ import annotations

import csv
import hashlib
import io
import time
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any

import numpy as np

from .combinatorics import CutWitness
from .errors import TooLarge
from .graphs import RegularMultigraph
from .harness import CheckReport, GraphAnalysis, InstanceResult, verify_graph
from .spec import SCHEMA_VERSION

CSV_COLUMNS = ("family", "n", "d", "h_edge_num", "h_edge_den", "h_vert_num", "h_vert_den",
               "beta_edge_num", "beta_edge_den", "beta_vert_num", "beta_vert_den",
               "h_square_num", "h_square_den", "mu_2", "mu_n", "verdicts")

CONSTANTS = (("h_edge", "edge_cheeger"), ("h_vert", "vertex_cheeger"), ("beta_edge", "beta_edge"),
             ("beta_vert", "beta_vert"), ("h_square", "square_cheeger"))


def decimal_str(x: Fraction, places: int = 15) -> str:
    with localcontext() as ctx:
        ctx.prec = 50
        q = Decimal(x.numerator) / Decimal(x.denominator)
        return str(q.quantize(Decimal(1).scaleb(-places)))


def rational(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "text": f"{x.numerator}/{x.denominator}",
            "decimal": decimal_str(x)}


def to_jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return rational(x)
    if isinstance(x, CutWitness):
        return x.as_lists()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    return x


def check_dict(rep: CheckReport) -> dict:
    return {"check_id": rep.check_id, "hypothesis_ok": rep.hypothesis_ok, "verdict": rep.verdict,
            "lhs": to_jsonable(rep.lhs), "value": to_jsonable(rep.value), "rhs": to_jsonable(rep.rhs),
            "margin": to_jsonable(rep.margin), "witness": to_jsonable(rep.witness), "detail": rep.detail}


def canonical_hash(gr: RegularMultigraph) -> str:
    """sha256 of the row-major adjacency after ordering vertices by label."""
    labels = gr.vertex_labels()
    order = sorted(range(gr.n), key=lambda v: (labels[v], v))
    m = gr.adj[np.ix_(order, order)]
    body = f"n={gr.n};d={gr.d};" + ";".join(",".join(map(str, row)) for row in m.tolist())
    return hashlib.sha256(body.encode()).hexdigest()


def graph_identity(gr: RegularMultigraph, spec: dict | None = None, name: str | None = None) -> dict:
    out = {"family": gr.family, "name": name, "params": to_jsonable(dict(gr.params)), "n": gr.n, "d": gr.d,
           "labels": list(gr.vertex_labels()), "canonical_hash": canonical_hash(gr)}
    if spec is not None:
        out["spec"] = spec
    return out


def spectrum_dict(ctx: GraphAnalysis) -> dict:
    s = ctx.spectrum
    return {"eigenvalues": list(s.eigenvalues), "mu_2": s.mu2, "mu_n": s.mun, "upper_gap": s.upper_gap,
            "lower_gap": s.lower_gap, "residual": s.residual, "sweeps": s.sweeps}


def analysis_report(ctx: GraphAnalysis, spec: dict | None = None, *, with_checks: bool = True) -> tuple[dict, bool]:
    """Full report for one graph; the flag says whether some enumeration cap was exceeded."""
    timing: dict[str, float] = {}
    constants: dict[str, Any] = {}
    witnesses: dict[str, Any] = {}
    capped = False
    for key, attr in CONSTANTS:
        t0 = time.perf_counter()
        try:
            value, wit = getattr(ctx, attr)
        except TooLarge as exc:
            constants[key] = {"skipped": str(exc)}
            capped = True
        else:
            constants[key] = rational(value)
            witnesses[key] = wit.as_lists()
        timing[key] = time.perf_counter() - t0
    t0 = time.perf_counter()
    spectrum = spectrum_dict(ctx)
    timing["spectrum"] = time.perf_counter() - t0
    doc = {"schema_version": SCHEMA_VERSION, "kind": "analysis",
           "graph": graph_identity(ctx.gr, spec, (spec or {}).get("name")),
           "bipartite": ctx.bipartite, "connected": ctx.connected,
           "constants": constants, "spectrum": spectrum, "witnesses": witnesses}
    if with_checks:
        t0 = time.perf_counter()
        doc["checks"] = [check_dict(r) for r in verify_graph(ctx)]
        timing["checks"] = time.perf_counter() - t0
    doc["timing"] = timing
    return doc, capped


def _verdicts(reports) -> str:
    return ";".join(f"{r.check_id}={r.verdict}" for r in reports)


def csv_row(ctx: GraphAnalysis | None, family: str, n: int, d: int, reports=(), skipped: str | None = None) -> dict:
    row = {c: "" for c in CSV_COLUMNS}
    row.update(family=family, n=n, d=d)
    if skipped is not None or ctx is None:
        row["verdicts"] = f"skipped:{skipped}"
        return row
    for key, attr in CONSTANTS:
        try:
            value = getattr(ctx, attr)[0]
        except TooLarge:
            continue
        row[f"{key}_num"], row[f"{key}_den"] = value.numerator, value.denominator
    row["mu_2"] = f"{ctx.spectrum.mu2:.12f}"
    row["mu_n"] = f"{ctx.spectrum.mun:.12f}"
    row["verdicts"] = _verdicts(reports)
    return row


def instance_row(res: InstanceResult, family: str, ctx: GraphAnalysis | None = None) -> dict:
    if res.error:
        return csv_row(None, family, res.graph.n, res.graph.d, skipped=res.error)
    ctx = ctx or res.analysis or GraphAnalysis(res.graph)
    return csv_row(ctx, family, res.graph.n, res.graph.d, res.reports)


def write_csv(rows, fh) -> None:
    w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)


def csv_text(rows) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def _short(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def margin_table(reports) -> str:
    """One row per check; ``value`` is the middle term of two-sided inequalities."""
    lines = [f"{'check':<15} {'verdict':<13} {'lhs':>14} {'value':>14} {'rhs':>14} {'margin':>14}"]
    for r in reports:
        lines.append(f"{r.check_id:<15} {r.verdict:<13} {_short(r.lhs):>14} {_short(r.value):>14} "
                     f"{_short(r.rhs):>14} {_short(r.margin):>14}")
    return "\n".join(lines)


def ratios_dict(ratios: dict) -> dict:
    return {k: (None if v is None else rational(v)) for k, v in ratios.items()}
