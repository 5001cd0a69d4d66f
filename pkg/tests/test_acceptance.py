"""Acceptance criteria 1-7. Each test prints one PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (lines appear in the terminal
output) or ``python3 tests/test_acceptance.py`` for just the summary.
"""

from __future__ import annotations

import contextlib
import io
import json
import math
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from bipcheck import combinatorics as comb
from bipcheck.cli import EXIT_CAP, EXIT_FAIL, EXIT_OK, EXIT_SPEC, main
from bipcheck.corpus import (bipartite_docs, corpus, corpus_docs, random_doubly_regular_matrices,
                             random_trapping_instances)
from bipcheck.graphs import graph_from_adjacency
from bipcheck.groups import cyclic, regular_action
from bipcheck.harness import FLOAT_SLACK, INAPPLICABLE, GraphAnalysis, TrappingInstance, sweep, trapping_H_delta
from bipcheck.spec import build_graph
from bipcheck.spectral import normalized_spectrum

import oracles

HERE = Path(__file__).parent
GOLDEN = json.loads((HERE / "fixtures" / "golden_constants.json").read_text())
FUNCS = {"h_edge": comb.edge_cheeger, "h_vert": comb.vertex_cheeger,
         "beta_edge": comb.edge_bipartiteness, "beta_vert": comb.vertex_bipartiteness}


def report(num: int, ok: bool, text: str, capsys=None) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {text}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


def margin_ok(margin) -> bool:
    # rational margins must be >= 0 exactly; float margins (eigenvalue sides) get the fixed slack
    if margin is None or isinstance(margin, (int, Fraction)):
        return margin is None or margin >= 0
    return margin >= -FLOAT_SLACK


def criterion_1() -> tuple[bool, str]:
    expected = {
        "triangle": {"h_edge": 1, "h_vert": 2, "beta_edge": Fraction(1, 3), "beta_vert": Fraction(1, 2)},
        "cycle5": {"h_edge": Fraction(1, 2), "h_vert": 1, "beta_edge": Fraction(1, 5), "beta_vert": Fraction(1, 4)},
        "cycle4": {"beta_edge": 0, "beta_vert": 0},
    }
    bad, slowest = [], 0.0
    for name, consts in expected.items():
        gr = graph_from_adjacency(GOLDEN[name]["adjacency"])
        for const, want in consts.items():
            assert Fraction(GOLDEN[name][const]) == want, "fixture disagrees with the stated golden"
            t0 = time.perf_counter()
            got, _ = FUNCS[const](gr)
            dt = time.perf_counter() - t0
            slowest = max(slowest, dt)
            if got != want or dt >= 1.0:
                bad.append(f"{name}.{const}={got} ({dt:.3f}s)")
    return not bad, f"golden constants exact, slowest {slowest * 1000:.1f} ms" + (f"; bad: {bad}" if bad else "")


def criterion_2() -> tuple[bool, str]:
    bad = []
    tri = normalized_spectrum(graph_from_adjacency(GOLDEN["triangle"]["adjacency"]))
    if abs(tri.mun + 0.5) > 1e-9:
        bad.append(f"triangle mu_n={tri.mun}")
    for n in range(3, 14):
        gr = build_graph({"family": "cayley", "group": {"kind": "cyclic", "n": n}, "connection_set": [1, n - 1]}).graph
        got = normalized_spectrum(gr).eigenvalues
        want = sorted((math.cos(2 * math.pi * k / n) for k in range(n)), reverse=True)
        err = max(abs(a - b) for a, b in zip(got, want))
        if err > 1e-8:
            bad.append(f"C{n} err={err:.2e}")
    for doc in bipartite_docs():
        mun = normalized_spectrum(build_graph(doc).graph).mun
        if abs(mun + 1) > 1e-9:
            bad.append(f"{doc['name']} mu_n={mun}")
    return not bad, "triangle, C3..C13 vs cos(2 pi k/n), bipartite mu_n=-1" + (f"; bad: {bad}" if bad else "")


def criterion_3() -> tuple[bool, str]:
    members = corpus()
    classes = {GraphAnalysis(gr).graph_class for _, gr in members}
    t0 = time.perf_counter()
    res = sweep(members)
    elapsed = time.perf_counter() - t0
    errors = [r.name for r in res.instances if r.error]
    failures = [f"{name}:{c.check_id}" for name, c in res.failures]
    negative = [f"{r.name}:{c.check_id}" for r in res.instances for c in r.reports
                if c.verdict != INAPPLICABLE and not margin_ok(c.margin)]
    applied = sum(c.verdict != INAPPLICABLE for r in res.instances for c in r.reports)
    sharp = sum(r.analysis.acts_by_automorphisms for r in res.instances if r.analysis)
    mins = res.min_ratios
    ratios_ok = all(v is not None and v >= 1 for v in mins.values())
    ok = (len(members) >= 25 and len(classes) == 5 and not errors and not failures and not negative
          and elapsed < 300 and ratios_ok)
    text = (f"{len(members)} instances, {len(classes)} classes, {applied} applicable checks passed, "
            f"{sharp} with sharp constants, {elapsed:.1f}s, min ratios "
            + ", ".join(f"{k}={v}" for k, v in mins.items()))
    if not ok:
        text += f"; errors={errors} failures={failures} negative={negative} classes={sorted(classes)}"
    return ok, text


def criterion_4() -> tuple[bool, str]:
    a = regular_action(cyclic(6))
    rep = trapping_H_delta(TrappingInstance(a, frozenset({0, 2, 4}), Fraction(1, 10)))
    # the defect bound is compared squared: 0^2 <= (1/10)(1+0)/2 * 36/4
    fixed = (rep.h_delta == [0, 2, 4] and rep.is_subgroup and rep.index == 2 and min(rep.defects) == 0
             and rep.bound_squared == Fraction(9, 20) and rep.conclusion_ok
             and rep.intersections == oracles.translate_intersections(a.act.tolist(), [0, 2, 4]))
    gap_ok = []
    for inst in random_trapping_instances(400, seed=2024):
        r = trapping_H_delta(inst)
        if r.intersections != oracles.translate_intersections(inst.action.act.tolist(), sorted(inst.script_v)):
            return False, "translate intersections disagree with the oracle"
        if r.gap_hypothesis_ok:
            gap_ok.append(r)
        if len(gap_ok) == 20:
            break
    random_ok = len(gap_ok) == 20 and all(r.conclusion_ok for r in gap_ok)
    return fixed and random_ok, (f"cyclic(6) H_delta={rep.h_delta} index={rep.index} defect={min(rep.defects)}; "
                                 f"{sum(r.conclusion_ok for r in gap_ok)}/{len(gap_ok)} random gap instances conclude")


def criterion_5() -> tuple[bool, str]:
    mats = [gr.adj for _, gr in corpus(include_bipartite=True)]
    mats += random_doubly_regular_matrices(50, seed=5, max_n=10, max_d=6)
    bad = 0
    for m in mats:
        m = np.asarray(m)
        d = int(m[:, 0].sum())
        perms = comb.birkhoff_decompose(m)
        if len(perms) != d or not np.array_equal(comb.permutation_sum(perms, m.shape[0]), m):
            bad += 1
    return bad == 0, f"{len(mats)} matrices reassembled exactly with d permutations, {bad} bad"


def criterion_6() -> tuple[bool, str]:
    small = [(name, gr) for name, gr in corpus(include_bipartite=True) if gr.n <= 8]
    bad = []
    for name, gr in small:
        adj = gr.adj.tolist()
        ref = {"h_edge": oracles.edge_cheeger(adj), "h_vert": oracles.vertex_cheeger(adj),
               "beta_edge": oracles.edge_bipartiteness(adj), "beta_vert": oracles.vertex_bipartiteness(adj)}
        for const, fn in FUNCS.items():
            if fn(gr)[0] != ref[const]:
                bad.append(f"{name}.{const}")
    return not bad, f"{len(small)} graphs with n <= 8 agree on 4 constants" + (f"; bad: {bad}" if bad else "")


def criterion_7(tmp: Path) -> tuple[bool, str]:
    def spec(name, doc):
        p = tmp / name
        p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(p)

    c5 = spec("c5.json", {"family": "cayley", "group": {"kind": "cyclic", "n": 5}, "connection_set": [1, 4]})
    c30 = spec("c30.json", {"family": "cayley", "group": {"kind": "cyclic", "n": 30}, "connection_set": [1, 29]})
    with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
        codes = {
            "ok": main(["verify", "--spec", c5]) == EXIT_OK,
            "fail": main(["verify", "--spec", c5, "--debug-corrupt"]) == EXIT_FAIL,
            "spec": main(["verify", "--spec", spec("bad.json", '{"family": "cayley"')]) == EXIT_SPEC,
            "cap": main(["analyze", "--spec", c30, "--out", str(tmp / "c30.out")]) == EXIT_CAP,
        }
    hashes = []
    src = spec("petersen.json", corpus_docs()[-1])
    for i in range(2):
        out = tmp / f"run{i}.json"
        proc = subprocess.run([sys.executable, "-m", "bipcheck.cli", "analyze", "--spec", src, "--out", str(out)],
                              capture_output=True, text=True)
        if proc.returncode:
            return False, f"analyze run {i} exited {proc.returncode}: {proc.stderr.strip()}"
        doc = json.loads(out.read_text())
        hashes.append(doc["graph"]["canonical_hash"])
        src = spec(f"roundtrip{i}.json", doc["graph"]["spec"])
    stable = hashes[0] == hashes[1]
    ok = all(codes.values()) and stable
    return ok, f"exit codes {codes}, round-trip hash stable={stable} ({hashes[0][:12]})"


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6}


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num, capsys):
    ok, text = CRITERIA[num]()
    report(num, ok, text, capsys)
    assert ok, text


def test_criterion_7(tmp_path, capsys):
    ok, text = criterion_7(tmp_path)
    report(7, ok, text, capsys)
    assert ok, text


if __name__ == "__main__":
    import logging
    import tempfile

    logging.disable(logging.CRITICAL)
    results = []
    for num, fn in sorted(CRITERIA.items()):
        results.append(fn())
        report(num, *results[-1])
    with tempfile.TemporaryDirectory() as tmp:
        results.append(criterion_7(Path(tmp)))
        report(7, *results[-1])
    sys.exit(0 if all(ok for ok, _ in results) else 1)
