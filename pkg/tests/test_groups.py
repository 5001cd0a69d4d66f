from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bipcheck.errors import ClosureTooLarge, InvalidDescriptor
from bipcheck.groups import (Subgroup, build_group, cycle_notation, cyclic, descend_to_no_index_two_transitive,
                             dihedral, direct_product, from_permutations, generate_subgroup, index_two_subgroups,
                             is_subgroup, is_transitive, make_action, natural_action, no_index_two_transitive,
                             orbits, parse_cycles, regular_action, stabilizer_size, subset_action, symmetric)

from oracles import index_two_subgroups_brute

SMALL_GROUPS = [cyclic(n) for n in range(1, 17)] + [dihedral(n) for n in range(3, 9)] + [
    symmetric(3), direct_product(cyclic(2), cyclic(2)), direct_product(cyclic(2), cyclic(4)),
    direct_product(cyclic(2), cyclic(6)), direct_product(cyclic(4), cyclic(4)),
    direct_product(cyclic(2), direct_product(cyclic(2), cyclic(2))),
    direct_product(cyclic(2), dihedral(4)),
]


def test_cyclic_one_is_trivial():
    g = cyclic(1)
    assert g.order == 1
    assert g.mul.tolist() == [[0]]


def test_cyclic_three_table():
    g = cyclic(3)
    assert g.mul.tolist() == [[(i + j) % 3 for j in range(3)] for i in range(3)]


def test_closure_of_transposition_and_three_cycle_is_s3():
    g = from_permutations([parse_cycles("(0 1)", 3), parse_cycles("(0 1 2)", 3)], 3)
    assert g.order == 6
    assert not g.is_abelian()
    ref = symmetric(3)
    assert sorted(map(tuple, g.perms.tolist())) == sorted(map(tuple, ref.perms.tolist()))


def test_closure_cap():
    gens = [parse_cycles("(0 1)", 5), parse_cycles("(0 1 2 3 4)", 5)]
    with pytest.raises(ClosureTooLarge):
        from_permutations(gens, 5, cap=50)


@pytest.mark.parametrize("g", SMALL_GROUPS, ids=lambda g: g.name)
def test_group_axioms(g):
    g.validate()
    n = g.order
    assert all(g.mul[x, g.inv[x]] == 0 and g.mul[g.inv[x], x] == 0 for x in range(n))


@pytest.mark.parametrize("g", SMALL_GROUPS, ids=lambda g: g.name)
def test_index_two_subgroups_match_brute_force(g):
    ours = {h.members for h in index_two_subgroups(g)}
    assert ours == set(index_two_subgroups_brute(g.mul.tolist()))


def test_index_two_examples():
    assert index_two_subgroups(cyclic(5)) == []
    assert [h.sorted() for h in index_two_subgroups(cyclic(6))] == [[0, 2, 4]]
    subs = index_two_subgroups(direct_product(cyclic(2), cyclic(2)))
    assert len(subs) == 3 and all(h.order == 2 for h in subs)
    assert len(index_two_subgroups(dihedral(4))) == 3
    assert len(index_two_subgroups(symmetric(4))) == 1


def test_dihedral_order_and_relations():
    g = dihedral(5)
    assert g.order == 10
    r, s = g.index("r"), g.index("s")
    assert g.mul[s, s] == 0
    assert g.mul[g.mul[s, r], s] == g.inv[r]


def test_parse_cycles_round_trip():
    p = parse_cycles("(0 2 1)(3 4)", 5)
    assert p == (2, 0, 1, 4, 3)
    assert parse_cycles(cycle_notation(p), 5) == p
    assert parse_cycles("()", 3) == (0, 1, 2)
    with pytest.raises(InvalidDescriptor):
        parse_cycles("(0 0)", 3)
    with pytest.raises(InvalidDescriptor):
        parse_cycles("0 1", 3)


def test_build_group_descriptors():
    assert build_group({"kind": "cyclic", "n": 7}).order == 7
    assert build_group({"kind": "dihedral", "n": 4}).order == 8
    assert build_group({"kind": "symmetric", "n": 4}).order == 24
    prod = build_group({"kind": "direct_product", "factors": [{"kind": "cyclic", "n": 2}, {"kind": "cyclic", "n": 3}]})
    assert prod.order == 6 and prod.is_abelian()
    g = build_group({"kind": "from_permutations", "generators": ["(0 1 2 3)"], "degree": 4})
    assert g.order == 4
    for bad in ({}, {"kind": "nope"}, {"kind": "cyclic"}, {"kind": "cyclic", "n": 0},
                {"kind": "from_permutations", "generators": ["(0 1)"]}):
        with pytest.raises(InvalidDescriptor):
            build_group(bad)


def test_orbits_and_transitivity():
    a = regular_action(cyclic(6))
    assert orbits(a, Subgroup(frozenset({0, 2, 4}))) == [[0, 2, 4], [1, 3, 5]]
    assert orbits(a) == [list(range(6))]
    assert orbits(a, Subgroup(frozenset({0}))) == [[v] for v in range(6)]
    assert is_transitive(a) and no_index_two_transitive(a)
    s3 = natural_action(symmetric(3))
    assert is_transitive(s3)
    assert not no_index_two_transitive(s3)
    trivial = make_action(cyclic(1), [[0, 1]])
    assert not is_transitive(trivial)


def test_stabilizers():
    assert stabilizer_size(regular_action(cyclic(6)), 3) == 1
    s3 = natural_action(symmetric(3))
    assert all(stabilizer_size(s3, v) == 2 for v in range(3))
    assert stabilizer_size(make_action(cyclic(1), [[0, 1]]), 0) == 1


def test_action_axioms_checked():
    with pytest.raises(InvalidDescriptor):
        make_action(cyclic(3), [[0, 1], [1, 0], [1, 0]]).validate()
    with pytest.raises(InvalidDescriptor):
        make_action(cyclic(2), [[1, 0], [0, 1]]).validate()


def test_descent_petersen_action():
    a = subset_action(symmetric(5), 2)
    assert a.degree == 10 and is_transitive(a)
    assert not no_index_two_transitive(a)
    b = descend_to_no_index_two_transitive(a)
    assert b.group.order == 60
    assert is_transitive(b) and no_index_two_transitive(b)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.lists(st.integers(0, 29), min_size=1, max_size=4))
def test_generated_subgroup_is_a_subgroup(n, gens):
    g = cyclic(n)
    h = generate_subgroup(g, [x % n for x in gens])
    assert is_subgroup(g, h.members)
    assert n % h.order == 0
    step = np.gcd.reduce([n] + [x % n for x in gens])
    assert h.members == frozenset(range(0, n, int(step)))


@settings(max_examples=25, deadline=None)
@given(st.permutations(list(range(5))), st.permutations(list(range(5))))
def test_closure_is_closed(p, q):
    g = from_permutations([tuple(p), tuple(q)], 5)
    perms = {tuple(x) for x in g.perms.tolist()}
    for a, b in itertools.product(perms, repeat=2):
        assert tuple(a[b[i]] for i in range(5)) in perms
