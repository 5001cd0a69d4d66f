"""Standard instance corpus, sweep families and seeded random generators."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator

import numpy as np

from .groups import (Subgroup, cyclic, descend_to_no_index_two_transitive, dihedral, index_two_subgroups,
                     orbits, regular_action, symmetric)
from .harness import TrappingInstance
from .spec import SCHEMA_VERSION, build_graph


def _doc(name: str, family: str, group: dict, **extra) -> dict:
    return {"schema_version": SCHEMA_VERSION, "name": name, "family": family, "group": group, **extra}


def cyclic_doc(family: str, n: int, s: list, name: str | None = None, **extra) -> dict:
    return _doc(name or f"{family}-C{n}", family, {"kind": "cyclic", "n": n},
                connection_set=[str(x) for x in s], **extra)


def cycle_doc(n: int) -> dict:
    return cyclic_doc("cayley", n, [1, n - 1], name=f"cycle-{n}")


def dihedral_doc(n: int) -> dict:
    return _doc(f"cayley-D{n}", "cayley", {"kind": "dihedral", "n": n},
                connection_set=["r", f"r^{n - 1}", "s", "rs"])


def twisted_cyclic_doc(family: str, n: int, s: list, k: int) -> dict:
    return cyclic_doc(family, n, s, name=f"{family}-C{n}-x{k}", automorphism={"1": str(k)})


def petersen_doc() -> dict:
    return _doc("petersen", "action_graph", {"kind": "symmetric", "n": 5},
                action={"kind": "subsets", "k": 2}, base_edges=[[0, 9]])


def corpus_docs() -> list[dict]:
    """Non-bipartite instances across all five graph classes."""
    docs = [cycle_doc(n) for n in range(3, 14, 2)]
    docs += [dihedral_doc(n) for n in range(3, 7)]
    docs.append(_doc("cayley-S3-mixed", "cayley", {"kind": "symmetric", "n": 3},
                     connection_set=["(0 1)", "(0 1 2)", "(0 2 1)"]))
    docs.append(_doc("cayley-S4-mixed", "cayley", {"kind": "symmetric", "n": 4},
                     connection_set=["(0 1 2 3)", "(0 3 2 1)", "(0 1 2)", "(0 2 1)"]))
    docs += [cyclic_doc("cayley_sum", n, [0, 1]) for n in range(3, 14)]
    docs += [
        twisted_cyclic_doc("twisted_cayley", 8, [1, 2, 5], 3),
        twisted_cyclic_doc("twisted_cayley", 8, [0, 1], 7),
        twisted_cyclic_doc("twisted_cayley", 9, [0, 1], 8),
        twisted_cyclic_doc("twisted_cayley", 10, [1, 2], 9),
        twisted_cyclic_doc("twisted_cayley_sum", 8, [0, 1, 7], 7),
        twisted_cyclic_doc("twisted_cayley_sum", 8, [0, 1, 3], 3),
        twisted_cyclic_doc("twisted_cayley_sum", 8, [1, 2, 5], 5),
        twisted_cyclic_doc("twisted_cayley_sum", 9, [2, 7], 8),
        twisted_cyclic_doc("twisted_cayley_sum", 10, [0, 1, 9], 9),
        # conjugation by a transposition / reflection
        _doc("twisted_cayley-S3-conj", "twisted_cayley", {"kind": "symmetric", "n": 3},
             connection_set=["()", "(1 2)", "(0 1 2)"],
             automorphism={"(0 1)": "(0 2)", "(0 1 2)": "(0 2 1)"}),
        _doc("twisted_cayley-D4-conj", "twisted_cayley", {"kind": "dihedral", "n": 4},
             connection_set=["e", "r", "s"], automorphism={"r": "r^3", "s": "s"}),
        _doc("twisted_cayley-D5-conj", "twisted_cayley", {"kind": "dihedral", "n": 5},
             connection_set=["e", "r", "s"], automorphism={"r": "r^4", "s": "s"}),
    ]
    docs.append(petersen_doc())
    return docs


def bipartite_docs() -> list[dict]:
    return [cycle_doc(4), cycle_doc(6), cyclic_doc("cayley", 2, [1], name="K2"),
            _doc("cayley-D4-reflections", "cayley", {"kind": "dihedral", "n": 4}, connection_set=["s", "rs"])]


def corpus(include_bipartite: bool = False) -> list[tuple[str, object]]:
    docs = corpus_docs() + (bipartite_docs() if include_bipartite else [])
    return [(d["name"], build_graph(d).graph) for d in docs]


# -- sweep families ------------------------------------------------------------

FAMILIES = {
    "odd-cycles": lambda n: cycle_doc(n) if n >= 3 and n % 2 else None,
    "cycles": lambda n: cycle_doc(n) if n >= 3 else None,
    "cayley-sum-cyclic": lambda n: cyclic_doc("cayley_sum", n, [0, 1]) if n >= 2 else None,
    "dihedral": lambda n: dihedral_doc(n) if n >= 3 else None,
    "complete": lambda n: cyclic_doc("cayley", n, list(range(1, n)), name=f"complete-{n}") if n >= 2 else None,
}


def family_docs(family: str, lo: int, hi: int) -> list[dict]:
    if family not in FAMILIES:
        raise KeyError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    return [d for d in (FAMILIES[family](n) for n in range(lo, hi + 1)) if d is not None]


# -- random instances ------------------------------------------------------------

def random_doubly_regular(rng: random.Random, max_n: int = 10, max_d: int = 6) -> np.ndarray:
    """A sum of d random permutation matrices (not necessarily symmetric)."""
    n = rng.randint(1, max_n)
    d = rng.randint(1, max_d)
    m = np.zeros((n, n), dtype=np.int64)
    for _ in range(d):
        p = list(range(n))
        rng.shuffle(p)
        m[p, np.arange(n)] += 1
    return m


def random_doubly_regular_matrices(count: int, seed: int = 0, **kw) -> list[np.ndarray]:
    rng = random.Random(seed)
    return [random_doubly_regular(rng, **kw) for _ in range(count)]


_TRAPPING_GROUPS = (lambda: cyclic(6), lambda: cyclic(8), lambda: cyclic(10), lambda: cyclic(12),
                    lambda: dihedral(3), lambda: dihedral(4), lambda: dihedral(5), lambda: symmetric(3))


def random_trapping_instances(count: int, seed: int = 0) -> Iterator[TrappingInstance]:
    """Seeded candidates near an index-two orbit: an orbit with a few points toggled.

    Constraint parameters are chosen so the standing constraints hold; the gap
    condition may or may not hold and is left to the caller to read off.
    """
    rng = random.Random(seed)
    made = 0
    while made < count:
        a = descend_to_no_index_two_transitive(regular_action(rng.choice(_TRAPPING_GROUPS)()))
        subs = index_two_subgroups(a.group)
        if not subs:
            continue
        h: Subgroup = rng.choice(subs)
        orb = set(rng.choice(orbits(a, h)))
        n = a.degree
        for v in rng.sample(range(n), rng.randint(0, max(1, n // 6))):
            orb ^= {v}
        if not orb:
            continue
        ratio = Fraction(len(orb), n)
        xi = max(Fraction(0), 1 - 2 * ratio)
        zeta = max(Fraction(0), 2 * ratio - 1)
        top = min((1 - zeta) / 2, (1 - 3 * xi) / 4)
        if top <= 0:
            continue
        delta = top * Fraction(rng.randint(1, 19), 20)
        made += 1
        yield TrappingInstance(a, frozenset(orb), delta, xi, zeta)
