from __future__ import annotations

from fractions import Fraction

import pytest

from bipcheck.errors import HypothesisViolated, InapplicableBipartite
from bipcheck.graphs import cayley, cycle_graph
from bipcheck.groups import cyclic, regular_action
from bipcheck.harness import (FAIL, INAPPLICABLE, PASS, GraphAnalysis, TrappingInstance, check_cheeger_buser,
                              check_dichotomy, check_lemma_4_3, check_lower_gap_corollary, check_main_bipartiteness,
                              check_partition_conclusion, check_square_cheeger, check_trevisan, compare,
                              dichotomy_margin, piecewise_edge_bound, sweep, tightness_ratios, trapping_H_delta,
                              verify_graph)

from oracles import is_subgroup, translate_intersections

TRI, C4, C5, C9 = cycle_graph(3), cycle_graph(4), cycle_graph(5), cycle_graph(9)
K2 = cayley(cyclic(2), [1])


def test_compare_exact_and_float():
    assert compare("x", Fraction(1, 3), Fraction(1, 3)).verdict == PASS
    assert compare("x", Fraction(1, 3), Fraction(1, 3), strict=True).verdict == FAIL
    assert compare("x", 1.0, 1.0 - 1e-10).verdict == PASS
    assert compare("x", 1.0, 1.0 - 1e-8).verdict == FAIL


def test_cheeger_buser_examples():
    r = check_cheeger_buser(C5)
    assert r.verdict == PASS
    assert (float(r.lhs), r.value, float(r.rhs)) == pytest.approx((0.125, 0.690983, 1.0), abs=1e-6)
    r = check_cheeger_buser(TRI)
    assert (float(r.lhs), r.value, float(r.rhs)) == pytest.approx((0.5, 1.5, 2.0))
    r = check_cheeger_buser(K2)
    # h = 1 and mu_2 = -1, so the middle term is 1 - (-1) = 2
    assert r.verdict == PASS and (float(r.lhs), r.value, float(r.rhs)) == pytest.approx((0.5, 2.0, 2.0))


def test_cheeger_buser_disconnected_is_inapplicable():
    from bipcheck.graphs import graph_from_adjacency
    two_edges = graph_from_adjacency([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert check_cheeger_buser(two_edges).verdict == INAPPLICABLE


def test_trevisan_examples():
    r = check_trevisan(TRI)
    assert (r.lhs, r.rhs) == (Fraction(1, 18), Fraction(2, 3)) and r.value == pytest.approx(0.5)
    r = check_trevisan(C5)
    assert r.verdict == PASS
    assert (float(r.lhs), r.value, float(r.rhs)) == pytest.approx((0.02, 0.190983, 0.4), abs=1e-6)
    r = check_trevisan(C4)
    assert r.verdict == PASS and (r.lhs, r.rhs) == (0, 0) and r.value == pytest.approx(0, abs=1e-9)


def test_main_bipartiteness_examples():
    edge, vert = check_main_bipartiteness(TRI, "cayley")
    assert edge.verdict == vert.verdict == PASS
    # weakest stated forms also hold: beta_edge >= h / (90 d), beta_vert >= h_vert / 135
    ctx = GraphAnalysis(TRI)
    assert ctx.beta_edge[0] >= ctx.edge_cheeger[0] / 180 and ctx.beta_vert[0] >= ctx.vertex_cheeger[0] / 135
    ctx9 = GraphAnalysis(C9)
    assert ctx9.beta_edge[0] == Fraction(1, 9) and ctx9.edge_cheeger[0] == Fraction(1, 4)
    assert all(r.verdict == PASS for r in check_main_bipartiteness(ctx9, "cayley"))
    with pytest.raises(InapplicableBipartite):
        check_main_bipartiteness(C4, "cayley")
    with pytest.raises(ValueError):
        check_main_bipartiteness(C5, "square")


def test_piecewise_bound():
    assert piecewise_edge_bound(Fraction(1, 100), 2, 40) == Fraction(40, 100)
    assert piecewise_edge_bound(Fraction(1, 10), 2, 40) == 8
    assert piecewise_edge_bound(Fraction(1, 180), 2, 90) == 1


def test_lower_gap_corollary():
    r = check_lower_gap_corollary(TRI)
    assert r.verdict == PASS and r.lhs == Fraction(4, 2 * 135 ** 2 * 4)
    assert r.rhs == pytest.approx(0.5)
    assert check_lower_gap_corollary(C5).verdict == PASS
    with pytest.raises(InapplicableBipartite):
        check_lower_gap_corollary(K2)


def test_square_cheeger():
    r = check_square_cheeger(TRI, commuting_case=False)
    assert r.verdict == PASS and (r.lhs, r.rhs) == (Fraction(1, 96), Fraction(1, 2))
    assert check_square_cheeger(TRI, commuting_case=True).lhs == Fraction(1, 40)
    r = check_square_cheeger(C5, commuting_case=False)
    assert r.lhs == Fraction(1, 384) and r.verdict == PASS
    with pytest.raises(InapplicableBipartite):
        check_square_cheeger(C4)


def test_neighbourhood_walks():
    assert check_lemma_4_3(TRI, [0]).margin == 0
    assert check_lemma_4_3(TRI, [0b111]).margin == 0
    r = check_lemma_4_3(TRI, [0b001])
    assert (r.lhs, r.rhs) == (0, 2)
    assert check_lemma_4_3(C9).verdict == PASS
    assert check_lemma_4_3(cycle_graph(13), seed=3).detail.startswith("1000 subsets")


def test_dichotomy():
    r = check_dichotomy(TRI, regular_action(cyclic(3)))
    assert r.verdict == INAPPLICABLE and "psi=1/2" in r.detail
    r9 = check_dichotomy(C9, regular_action(cyclic(9)))
    ctx = GraphAnalysis(C9)
    holds = ctx.square_cheeger[0] < ctx.edge_cheeger[0] / 2
    assert (r9.verdict != INAPPLICABLE) == holds
    # g = identity always lands in the large branch
    for c in (Fraction(0), Fraction(1, 3), Fraction(2)):
        assert dichotomy_margin(12, 12, c) >= 0
    assert dichotomy_margin(12, 6, Fraction(1, 10)) < 0


def test_trapping_cyclic_six():
    a = regular_action(cyclic(6))
    rep = trapping_H_delta(TrappingInstance(a, frozenset({0, 2, 4}), Fraction(1, 10)))
    assert set(rep.intersections) == {0, 3}
    assert rep.intersections == translate_intersections(a.act.tolist(), [0, 2, 4])
    assert rep.gap_hypothesis_ok and rep.h_delta == [0, 2, 4]
    assert rep.is_subgroup and rep.index == 2
    assert [0, 2, 4] in rep.orbits and min(rep.defects) == 0
    assert rep.conclusion_ok


def test_trapping_gap_fails():
    a = regular_action(cyclic(6))
    rep = trapping_H_delta(TrappingInstance(a, frozenset({0, 1, 2}), Fraction(1, 10)))
    assert rep.intersections[1] == 2
    assert not rep.gap_hypothesis_ok and rep.is_subgroup is None


def test_trapping_hypotheses():
    a = regular_action(cyclic(6))
    with pytest.raises(HypothesisViolated) as exc:
        trapping_H_delta(TrappingInstance(a, frozenset({0, 2, 4}), Fraction(1, 3)))
    assert exc.value.failures == ["delta < (1-3xi)/4 fails"]
    from bipcheck.groups import natural_action, symmetric
    with pytest.raises(HypothesisViolated):
        trapping_H_delta(TrappingInstance(natural_action(symmetric(3)), frozenset({0}), Fraction(1, 10),
                                          xi=Fraction(1, 3)))


def test_partition_constraints():
    a = regular_action(cyclic(6))
    ok = TrappingInstance(a, frozenset({0, 2, 4}), Fraction(1, 10), mu=Fraction(1), kappa=Fraction(0))
    assert ok.partition_constraint_failures() == []
    bad = TrappingInstance(a, frozenset({0, 2, 4}), Fraction(1, 10), mu=Fraction(2), kappa=Fraction(1, 4))
    assert bad.partition_constraint_failures() == ["1/(2mu) - xi - kappa > 0 fails"]
    tight = TrappingInstance(a, frozenset({0, 2, 4}), Fraction(1, 5), mu=Fraction(1), kappa=Fraction(1, 5))
    assert tight.partition_constraint_failures() == ["delta < 2/(1+zeta) (1/(2mu) - xi - kappa)^2 fails"]


def test_trapping_subgroup_verdict_matches_brute_force():
    from bipcheck.corpus import random_trapping_instances
    for inst in random_trapping_instances(30, seed=7):
        rep = trapping_H_delta(inst)
        if rep.gap_hypothesis_ok:
            assert rep.is_subgroup == is_subgroup(inst.action.group.mul.tolist(), rep.h_delta)


def test_partition_conclusion():
    r = check_partition_conclusion(C4, regular_action(cyclic(4)))
    assert r.verdict == PASS and sorted(map(sorted, r.witness)) == [[0, 2], [1, 3]]
    assert check_partition_conclusion(C5).witness is None
    assert check_partition_conclusion(TRI).verdict == PASS


def test_verify_graph_five_cycle():
    reps = verify_graph(GraphAnalysis(C5))
    assert sum(r.verdict == PASS for r in reps) == 7
    assert [r.check_id for r in reps if r.verdict == INAPPLICABLE] == ["dichotomy"]


def test_verify_graph_four_cycle():
    reps = {r.check_id: r.verdict for r in verify_graph(GraphAnalysis(C4))}
    assert reps.pop("cheeger_buser") == reps.pop("trevisan") == PASS
    assert set(reps.values()) == {INAPPLICABLE}


def test_sweep_odd_cycles():
    res = sweep([(f"C{n}", cycle_graph(n)) for n in range(3, 14, 2)])
    assert len(res.instances) == 6 and not res.failures
    assert all(v is not None and v >= 1 for v in res.min_ratios.values())


def test_sweep_empty_and_bipartite_member():
    assert sweep([]).instances == []
    res = sweep([("C4", C4), ("C5", C5)])
    c4 = {r.check_id: r.verdict for r in res.instances[0].reports}
    assert c4["bipartiteness_edge"] == INAPPLICABLE and c4["square_cheeger"] == INAPPLICABLE
    assert tightness_ratios(GraphAnalysis(C4)) == {"edge": None, "vertex": None, "square": None}


def test_sweep_parallel_preserves_order():
    fam = [(f"C{n}", cycle_graph(n)) for n in (3, 4, 5, 6, 7)]
    one = sweep(fam)
    two = sweep(fam, jobs=2)
    assert [r.name for r in two.instances] == [r.name for r in one.instances]
    assert [[c.verdict for c in r.reports] for r in two.instances] == \
        [[c.verdict for c in r.reports] for r in one.instances]
    assert two.min_ratios == one.min_ratios
