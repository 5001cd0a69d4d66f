"""Finite groups as explicit multiplication tables, subgroups and group actions.

Element 0 is always the identity.  Every built group also keeps a faithful
permutation representation (``perms``) so that natural actions are available;
products follow function composition, ``mul[g][h] = g o h`` (apply ``h`` first),
which makes ``act[g][v] = perms[g][v]`` a left action.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ClosureTooLarge, InvalidDescriptor

DEFAULT_ELEMENT_CAP = 5040


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def cycle_notation(perm: Sequence[int]) -> str:
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            seen.add(start)
            continue
        cyc = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = perm[x]
        cycles.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(cycles) or "()"


@dataclass(frozen=True, eq=False)
class GroupTable:
    """A finite group given by its full multiplication table."""

    name: str
    mul: np.ndarray
    inv: np.ndarray
    labels: tuple[str, ...]
    perms: np.ndarray | None = field(default=None, repr=False)
    identity: int = 0

    @property
    def order(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return self.order

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidDescriptor(f"unknown element label {label!r} in {self.name}") from None

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def validate(self, *, sample: int = 2000, seed: int = 0) -> None:
        """Check the group axioms; raises ``InvalidDescriptor`` on failure."""
        n = self.order
        mul = self.mul
        if mul.shape != (n, n) or self.inv.shape != (n,):
            raise InvalidDescriptor("table shape mismatch")
        ref = np.arange(n)
        if not (np.array_equal(mul[0], ref) and np.array_equal(mul[:, 0], ref)):
            raise InvalidDescriptor("element 0 is not a two-sided identity")
        if not np.all(mul[ref, self.inv] == 0):
            raise InvalidDescriptor("inverse table is wrong")
        if not (np.all(np.sort(mul, axis=1) == ref) and np.all(np.sort(mul, axis=0) == ref[:, None])):
            raise InvalidDescriptor("multiplication table is not a Latin square")
        if n <= 64:
            # (gh)k == g(hk) for all triples, vectorised over k
            left = mul[mul]  # left[g, h, k] = mul[mul[g,h], k]
            right = mul[:, mul]  # right[g, h, k] = mul[g, mul[h,k]]
            if not np.array_equal(left, right):
                raise InvalidDescriptor("multiplication is not associative")
        else:
            rng = random.Random(seed)
            for _ in range(sample):
                a, b, c = (rng.randrange(n) for _ in range(3))
                if mul[mul[a, b], c] != mul[a, mul[b, c]]:
                    raise InvalidDescriptor("multiplication is not associative")


def _encode(perms: np.ndarray) -> np.ndarray:
    m = perms.shape[1]
    weights = m ** np.arange(m, dtype=np.int64)
    return perms.astype(np.int64) @ weights


def group_from_perm_list(name: str, perms: Sequence[Sequence[int]], labels: Sequence[str] | None = None) -> GroupTable:
    """Build the table of a set of permutations that is already closed; perms[0] must be the identity."""
    P = np.array(perms, dtype=np.int64)
    if P.ndim != 2:
        raise InvalidDescriptor("permutations must all act on the same number of points")
    n, m = P.shape
    if not np.array_equal(P[0], np.arange(m)):
        raise InvalidDescriptor("first permutation must be the identity")
    codes = _encode(P)
    order = np.argsort(codes)
    sorted_codes = codes[order]
    if len(np.unique(sorted_codes)) != n:
        raise InvalidDescriptor("duplicate permutations")

    def lookup(c: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(sorted_codes, c)
        pos = np.minimum(pos, n - 1)
        if not np.array_equal(sorted_codes[pos], c):
            raise InvalidDescriptor("permutation set is not closed under composition")
        return order[pos]

    mul = np.empty((n, n), dtype=np.int64)
    for g in range(n):
        # (g o h)(v) = g[h[v]] for every h at once
        mul[g] = lookup(_encode(P[g][P]))
    inv_perms = np.argsort(P, axis=1)
    inv = lookup(_encode(inv_perms))
    if labels is None:
        labels = [cycle_notation(p) for p in P.tolist()]
    grp = GroupTable(name=name, mul=_frozen(mul), inv=_frozen(inv), labels=tuple(labels), perms=_frozen(P))
    grp.validate()
    return grp


def cyclic(n: int) -> GroupTable:
    if n < 1:
        raise InvalidDescriptor(f"cyclic group order must be positive, got {n}")
    perms = [[(v + i) % n for v in range(n)] for i in range(n)]
    return group_from_perm_list(f"C{n}", perms, [str(i) for i in range(n)])


def dihedral(n: int) -> GroupTable:
    """Symmetries of the regular n-gon (order 2n): rotations ``r^k`` then reflections ``r^k s``."""
    if n < 3:
        raise InvalidDescriptor(f"dihedral group needs n >= 3, got {n}")
    rots = [[(v + k) % n for v in range(n)] for k in range(n)]
    refl = [[(k - v) % n for v in range(n)] for k in range(n)]
    labels = ["e" if k == 0 else ("r" if k == 1 else f"r^{k}") for k in range(n)]
    labels += ["s" if k == 0 else ("rs" if k == 1 else f"r^{k}s") for k in range(n)]
    return group_from_perm_list(f"D{n}", rots + refl, labels)


def symmetric(n: int) -> GroupTable:
    if not 1 <= n <= 6:
        raise InvalidDescriptor(f"symmetric(n) supports 1 <= n <= 6, got {n}")
    perms = [list(p) for p in itertools.permutations(range(n))]
    return group_from_perm_list(f"S{n}", perms)


def direct_product(g1: GroupTable, g2: GroupTable) -> GroupTable:
    if g1.perms is None or g2.perms is None:
        raise InvalidDescriptor("direct_product needs permutation representations")
    m1 = g1.perms.shape[1]
    perms = []
    labels = []
    for a in range(g1.order):
        for b in range(g2.order):
            perms.append(list(g1.perms[a]) + [m1 + x for x in g2.perms[b]])
            labels.append(f"({g1.labels[a]},{g2.labels[b]})")
    return group_from_perm_list(f"{g1.name}x{g2.name}", perms, labels)


def from_permutations(generators: Iterable[Sequence[int]], degree: int | None = None,
                      *, cap: int = DEFAULT_ELEMENT_CAP, name: str | None = None) -> GroupTable:
    """Close a list of permutations of ``{0..m-1}`` under composition (BFS from the identity)."""
    gens = [tuple(int(x) for x in g) for g in generators]
    if degree is None:
        degree = max((len(g) for g in gens), default=1)
    for g in gens:
        if len(g) != degree or sorted(g) != list(range(degree)):
            raise InvalidDescriptor(f"not a permutation of {degree} points: {g}")
    ident = tuple(range(degree))
    elements = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = tuple(x[s[v]] for v in range(degree))
                if y not in seen:
                    seen.add(y)
                    elements.append(y)
                    nxt.append(y)
                    if len(elements) > cap:
                        raise ClosureTooLarge(f"closure exceeds element cap {cap}")
        frontier = nxt
    return group_from_perm_list(name or f"<{len(gens)} gens on {degree}>", elements)


def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse cycle notation such as ``"(0 1 2)(3 4)"`` into an image tuple."""
    perm = list(range(degree))
    body = text.replace(",", " ").strip()
    if body in ("", "()"):
        return tuple(perm)
    if not (body.startswith("(") and body.endswith(")")):
        raise InvalidDescriptor(f"bad cycle notation {text!r}")
    for chunk in body[1:-1].split(")("):
        pts = [int(x) for x in chunk.split()]
        if any(not 0 <= p < degree for p in pts) or len(set(pts)) != len(pts):
            raise InvalidDescriptor(f"bad cycle {chunk!r} on {degree} points")
        for a, b in zip(pts, pts[1:] + pts[:1]):
            perm[a] = b
    return tuple(perm)


def build_group(descriptor: dict, *, cap: int = DEFAULT_ELEMENT_CAP) -> GroupTable:
    """Build a group from a descriptor mapping (the ``group`` field of a graph spec).

    Recognised kinds: ``cyclic``, ``dihedral``, ``symmetric`` (each with ``n``),
    ``direct_product`` (``factors``: two descriptors) and ``from_permutations``
    (``generators`` as image lists or cycle strings, plus ``degree``).
    """
    if not isinstance(descriptor, dict) or "kind" not in descriptor:
        raise InvalidDescriptor(f"group descriptor needs a 'kind': {descriptor!r}")
    kind = descriptor["kind"]
    try:
        if kind == "cyclic":
            return cyclic(int(descriptor["n"]))
        if kind == "dihedral":
            return dihedral(int(descriptor["n"]))
        if kind == "symmetric":
            return symmetric(int(descriptor["n"]))
        if kind == "direct_product":
            f1, f2 = descriptor["factors"]
            return direct_product(build_group(f1, cap=cap), build_group(f2, cap=cap))
        if kind == "from_permutations":
            gens = descriptor["generators"]
            degree = descriptor.get("degree")
            if degree is None:
                if any(isinstance(g, str) for g in gens):
                    raise InvalidDescriptor("cycle-notation generators need an explicit degree")
                degree = max((len(g) for g in gens), default=1)
            parsed = [parse_cycles(g, degree) if isinstance(g, str) else g for g in gens]
            return from_permutations(parsed, degree, cap=cap)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDescriptor(f"malformed {kind!r} descriptor: {exc}") from exc
    raise InvalidDescriptor(f"unknown group kind {kind!r}")


# -- subgroups ---------------------------------------------------------------

@dataclass(frozen=True)
class Subgroup:
    members: frozenset[int]

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def mask(self) -> int:
        return sum(1 << g for g in self.members)

    def __contains__(self, g: int) -> bool:
        return g in self.members

    def sorted(self) -> list[int]:
        return sorted(self.members)


def is_subgroup(g: GroupTable, members: Iterable[int]) -> bool:
    s = set(members)
    if g.identity not in s:
        return False
    return all(int(g.inv[a]) in s for a in s) and all(int(g.mul[a, b]) in s for a in s for b in s)


def generate_subgroup(g: GroupTable, gens: Iterable[int]) -> Subgroup:
    members = {g.identity}
    frontier = [g.identity]
    gens = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = int(g.mul[x, s])
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(frozenset(members))


def whole_group(g: GroupTable) -> Subgroup:
    return Subgroup(frozenset(range(g.order)))


def index_two_subgroups(g: GroupTable) -> list[Subgroup]:
    """All subgroups of index two.

    They are the kernels of the nonzero homomorphisms onto {+1, -1}.  Such a
    homomorphism kills every square and every commutator, so it factors through
    ``G / N`` with ``N`` generated by those; ``G / N`` is an F_2-vector space and
    the index-two subgroups are the preimages of its hyperplanes.
    """
    n = g.order
    if n % 2:
        return []
    mul, inv = g.mul, g.inv
    squares = {int(mul[a, a]) for a in range(n)}
    comms = {int(mul[mul[a, b], mul[inv[a], inv[b]]]) for a in range(n) for b in range(n)}
    N = generate_subgroup(g, squares | comms)
    # coset of x is xN; label each element by its coset
    coset_of = [-1] * n
    reps = []
    for x in range(n):
        if coset_of[x] < 0:
            cid = len(reps)
            reps.append(x)
            for k in N.members:
                coset_of[int(mul[x, k])] = cid
    # F_2 coordinates of each coset w.r.t. a greedily chosen basis
    coord = {coset_of[g.identity]: 0}
    rank = 0
    for x in reps:
        cx = coset_of[x]
        if cx in coord:
            continue
        bit = 1 << rank
        rank += 1
        for c0, vec in list(coord.items()):
            y = int(mul[reps[c0], x])
            coord[coset_of[y]] = vec | bit
    result = []
    for functional in range(1, 1 << rank):
        members = frozenset(x for x in range(n) if bin(coord[coset_of[x]] & functional).count("1") % 2 == 0)
        result.append(Subgroup(members))
    result.sort(key=lambda h: sorted(h.members))
    return result


def subgroup_table(g: GroupTable, h: Subgroup) -> tuple[GroupTable, list[int]]:
    """Relabel ``h`` as a standalone ``GroupTable``; also return the embedding list."""
    elems = sorted(h.members)
    pos = {x: i for i, x in enumerate(elems)}
    mul = [[pos[int(g.mul[a, b])] for b in elems] for a in elems]
    inv = [pos[int(g.inv[a])] for a in elems]
    perms = None if g.perms is None else _frozen(g.perms[elems])
    sub = GroupTable(name=f"{g.name}[{len(elems)}]", mul=_frozen(mul), inv=_frozen(inv),
                     labels=tuple(g.labels[x] for x in elems), perms=perms)
    return sub, elems


# -- actions -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupAction:
    """A left action of ``group`` on ``{0..degree-1}``; ``act[g, v]`` is the image of v."""

    group: GroupTable
    act: np.ndarray
    point_labels: tuple[str, ...] | None = None

    @property
    def degree(self) -> int:
        return int(self.act.shape[1])

    def validate(self) -> None:
        g = self.group
        n = self.degree
        if self.act.shape != (g.order, n):
            raise InvalidDescriptor("action table has the wrong shape")
        if not np.array_equal(self.act[g.identity], np.arange(n)):
            raise InvalidDescriptor("identity does not act trivially")
        if not np.all(np.sort(self.act, axis=1) == np.arange(n)):
            raise InvalidDescriptor("some group element does not act by a permutation")
        for x in range(g.order):
            # act[xh] == act[x] o act[h] for every h
            if not np.array_equal(self.act[g.mul[x]], self.act[x][self.act]):
                raise InvalidDescriptor("table is not a left action")


def make_action(group: GroupTable, act, point_labels=None) -> GroupAction:
    a = GroupAction(group, _frozen(act), None if point_labels is None else tuple(point_labels))
    a.validate()
    return a


def regular_action(g: GroupTable) -> GroupAction:
    """Left multiplication of ``g`` on itself."""
    return make_action(g, g.mul, g.labels)


def natural_action(g: GroupTable) -> GroupAction:
    if g.perms is None:
        raise InvalidDescriptor(f"{g.name} has no permutation representation")
    return make_action(g, g.perms, [str(i) for i in range(g.perms.shape[1])])


def subset_action(g: GroupTable, k: int) -> GroupAction:
    """Induced action on the k-subsets of the permuted points (subsets in lexicographic order)."""
    if g.perms is None:
        raise InvalidDescriptor(f"{g.name} has no permutation representation")
    m = g.perms.shape[1]
    subsets = list(itertools.combinations(range(m), k))
    pos = {s: i for i, s in enumerate(subsets)}
    act = [[pos[tuple(sorted(int(p[x]) for x in s))] for s in subsets] for p in g.perms]
    labels = ["".join(map(str, s)) if m <= 10 else "{" + ",".join(map(str, s)) + "}" for s in subsets]
    return make_action(g, act, labels)


def orbits(a: GroupAction, restrict_to: Subgroup | None = None) -> list[list[int]]:
    """Orbits of ``restrict_to`` (default: the whole group), smallest unvisited point first."""
    elems = range(a.group.order) if restrict_to is None else restrict_to.sorted()
    images = a.act[list(elems)]
    seen = np.zeros(a.degree, dtype=bool)
    result = []
    for v in range(a.degree):
        if seen[v]:
            continue
        orb = np.unique(images[:, v])
        seen[orb] = True
        result.append([int(x) for x in orb])
    return result


def is_transitive(a: GroupAction) -> bool:
    return len(orbits(a)) == 1


def no_index_two_transitive(a: GroupAction) -> bool:
    return all(len(orbits(a, h)) >= 2 for h in index_two_subgroups(a.group))


def stabilizer_size(a: GroupAction, v: int) -> int:
    return int(np.count_nonzero(a.act[:, v] == v))


def restrict_action(a: GroupAction, h: Subgroup) -> GroupAction:
    sub, elems = subgroup_table(a.group, h)
    return GroupAction(sub, _frozen(a.act[elems]), a.point_labels)


def descend_to_no_index_two_transitive(a: GroupAction) -> GroupAction:
    """Pass to transitive index-two subgroups until none of the current group's is transitive."""
    while True:
        for h in index_two_subgroups(a.group):
            if len(orbits(a, h)) == 1:
                a = restrict_action(a, h)
                break
        else:
            return a
