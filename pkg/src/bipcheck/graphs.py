"""Regular multigraphs from group data: Cayley, Cayley sum, their twisted
variants, orbit closures of group actions, and square graphs.

Adjacency convention: ``adj[u][v]`` is the number of generators (or
permutations) sending v to u.  A loop produced by one generator adds 1 to
``adj[v][v]`` and 1 to the degree.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DirectedResult, InternalError, InvalidDescriptor, NotInvariant, NotRegular
from .groups import GroupAction, GroupTable

GRAPH_CLASSES = ("cayley", "cayley_sum", "twisted_cayley", "twisted_cayley_sum", "vertex_transitive")


@dataclass(frozen=True, eq=False)
class RegularMultigraph:
    adj: np.ndarray
    d: int
    family: str = "custom"
    params: Mapping = field(default_factory=dict)
    labels: tuple[str, ...] | None = None
    action: GroupAction | None = field(default=None, repr=False)

    def __post_init__(self):
        adj = np.array(self.adj, dtype=np.int64)
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)
        _validate(adj, self.d)

    @property
    def n(self) -> int:
        return int(self.adj.shape[0])

    def vertex_labels(self) -> tuple[str, ...]:
        return self.labels if self.labels is not None else tuple(str(v) for v in range(self.n))

    def neighbours(self, v: int) -> list[int]:
        return [int(u) for u in np.flatnonzero(self.adj[:, v])]

    def edges(self) -> list[tuple[int, int, int]]:
        """Undirected edge list ``(u, v, multiplicity)`` with ``u <= v``."""
        us, vs = np.nonzero(np.triu(self.adj))
        return [(int(u), int(v), int(self.adj[u, v])) for u, v in zip(us, vs)]

    def is_connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for u in self.neighbours(v):
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return len(seen) == self.n


def _validate(adj: np.ndarray, d: int) -> None:
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise InvalidDescriptor("adjacency must be square")
    if adj.shape[0] < 2:
        raise InvalidDescriptor("a graph needs at least two vertices")
    if d < 1:
        raise InvalidDescriptor("degree must be positive")
    if np.any(adj < 0):
        raise InvalidDescriptor("adjacency entries must be nonnegative")
    if not np.array_equal(adj, adj.T):
        raise DirectedResult("adjacency is not symmetric")
    if np.any(adj.sum(axis=0) != d) or np.any(adj.sum(axis=1) != d):
        raise NotRegular(f"row/column sums are not all equal to d={d}")


@dataclass(frozen=True)
class AutomorphismMap:
    perm: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.perm[x]

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.perm))


def identity_automorphism(g: GroupTable) -> AutomorphismMap:
    return AutomorphismMap(tuple(range(g.order)))


def validate_automorphism(g: GroupTable, sigma: AutomorphismMap) -> None:
    perm = np.array(sigma.perm)
    if sorted(sigma.perm) != list(range(g.order)):
        raise InvalidDescriptor("automorphism is not a bijection")
    # sigma(gh) == sigma(g) sigma(h)
    if not np.array_equal(perm[g.mul], g.mul[perm][:, perm]):
        raise InvalidDescriptor("map is not a group homomorphism")


def automorphism_from_images(g: GroupTable, images: Mapping[int, int]) -> AutomorphismMap:
    """Extend generator images to an automorphism by walking words in the generators."""
    gens = list(images)
    sigma = {g.identity: g.identity}
    queue = deque([g.identity])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = int(g.mul[x, s])
            img = int(g.mul[sigma[x], images[s]])
            if y in sigma:
                if sigma[y] != img:
                    raise InvalidDescriptor("generator images do not define a homomorphism")
            else:
                sigma[y] = img
                queue.append(y)
    if len(sigma) != g.order:
        raise InvalidDescriptor("automorphism keys do not generate the group")
    aut = AutomorphismMap(tuple(sigma[x] for x in range(g.order)))
    validate_automorphism(g, aut)
    return aut


def multiplier_automorphism(g: GroupTable, k: int) -> AutomorphismMap:
    """x -> k*x on a cyclic group written additively."""
    return automorphism_from_images(g, {1 % g.order: k % g.order})


def connection_set(g: GroupTable, elements: Iterable[int]) -> tuple[int, ...]:
    s = tuple(sorted(set(int(x) for x in elements)))
    if not s:
        raise InvalidDescriptor("connection set must be nonempty")
    if s[0] < 0 or s[-1] >= g.order:
        raise InvalidDescriptor("connection set element out of range")
    return s


def _from_rule(g: GroupTable, s: Sequence[int], rule, family: str, params: dict) -> RegularMultigraph:
    s = connection_set(g, s)
    n = g.order
    adj = np.zeros((n, n), dtype=np.int64)
    xs = np.arange(n)
    for el in s:
        np.add.at(adj, (rule(xs, el), xs), 1)
    if not np.array_equal(adj, adj.T):
        raise DirectedResult(f"{family} construction is not undirected for S={list(s)}")
    return RegularMultigraph(adj, len(s), family, params, g.labels, GroupAction(g, g.mul, g.labels))


def _params(g: GroupTable, s, sigma: AutomorphismMap | None = None) -> dict:
    p = {"group": g.name, "S": [g.labels[x] for x in sorted(set(s))]}
    if sigma is not None:
        p["sigma"] = [g.labels[x] for x in sigma.perm]
    return p


def cayley(g: GroupTable, s: Iterable[int]) -> RegularMultigraph:
    """x ~ xs."""
    s = list(s)
    return _from_rule(g, s, lambda xs, el: g.mul[xs, el], "cayley", _params(g, s))


def cayley_sum(g: GroupTable, s: Iterable[int]) -> RegularMultigraph:
    """x ~ x^{-1}s."""
    s = list(s)
    return _from_rule(g, s, lambda xs, el: g.mul[g.inv[xs], el], "cayley_sum", _params(g, s))


def twisted_cayley(g: GroupTable, s: Iterable[int], sigma: AutomorphismMap) -> RegularMultigraph:
    """x ~ sigma(xs)."""
    validate_automorphism(g, sigma)
    s = list(s)
    perm = np.array(sigma.perm)
    return _from_rule(g, s, lambda xs, el: perm[g.mul[xs, el]], "twisted_cayley", _params(g, s, sigma))


def twisted_cayley_sum(g: GroupTable, s: Iterable[int], sigma: AutomorphismMap) -> RegularMultigraph:
    """x ~ sigma(x^{-1}s); an undirected result forces sigma(S) = S."""
    validate_automorphism(g, sigma)
    s = list(s)
    perm = np.array(sigma.perm)
    gr = _from_rule(g, s, lambda xs, el: perm[g.mul[g.inv[xs], el]], "twisted_cayley_sum", _params(g, s, sigma))
    if {sigma(x) for x in s} != set(s):
        raise InternalError("symmetric twisted Cayley sum adjacency with sigma(S) != S")
    return gr


def from_action_graph(a: GroupAction, base_edges: Iterable[Sequence[int]]) -> RegularMultigraph:
    """Orbit closure of ``base_edges`` (``(u, v)`` or ``(u, v, multiplicity)``) under ``a``.

    Each distinct image edge receives the multiplicity of its base edge.
    """
    n = a.degree
    adj = np.zeros((n, n), dtype=np.int64)
    base = []
    for e in base_edges:
        u, v = int(e[0]), int(e[1])
        w = int(e[2]) if len(e) > 2 else 1
        if not (0 <= u < n and 0 <= v < n) or w < 1:
            raise InvalidDescriptor(f"bad base edge {e!r}")
        base.append((u, v, w))
        images = {tuple(sorted((int(a.act[g, u]), int(a.act[g, v])))) for g in range(a.group.order)}
        for x, y in images:
            adj[x, y] += w
            if x != y:
                adj[y, x] += w
    rows = adj.sum(axis=1)
    if len(set(rows.tolist())) != 1 or rows[0] == 0:
        raise NotRegular(f"orbit closure has row sums {sorted(set(rows.tolist()))}")
    if not invariant_under(adj, a):
        raise NotInvariant("adjacency is not invariant under the action")
    params = {"group": a.group.name, "degree": n, "base_edges": [list(e) for e in base]}
    return RegularMultigraph(adj, int(rows[0]), "vertex_transitive", params, a.point_labels, a)


def invariant_under(m: np.ndarray, a: GroupAction) -> bool:
    for g in range(a.group.order):
        p = a.act[g]
        if not np.array_equal(m[np.ix_(p, p)], m):
            return False
    return True


def commutes_with_action(gr: RegularMultigraph, a: GroupAction, power: int = 1) -> bool:
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    if a.degree != gr.n:
        raise InvalidDescriptor("action degree does not match the vertex count")
    m = gr.adj if power == 1 else gr.adj @ gr.adj
    return invariant_under(m, a)


def square_graph(gr: RegularMultigraph) -> RegularMultigraph:
    params = {"parent_family": gr.family, "parent": dict(gr.params)}
    return RegularMultigraph(gr.adj @ gr.adj, gr.d * gr.d, "square", params, gr.labels, gr.action)


@dataclass(frozen=True)
class BipartiteVerdict:
    bipartite: bool
    coloring: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.bipartite

    def classes(self) -> tuple[list[int], list[int]] | None:
        if self.coloring is None:
            return None
        return ([v for v, c in enumerate(self.coloring) if c == 0],
                [v for v, c in enumerate(self.coloring) if c == 1])


def is_bipartite(gr: RegularMultigraph) -> BipartiteVerdict:
    """2-colour the support graph; any loop is an odd closed walk."""
    if np.any(np.diag(gr.adj) > 0):
        return BipartiteVerdict(False)
    color = [-1] * gr.n
    for root in range(gr.n):
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in gr.neighbours(v):
                if color[u] < 0:
                    color[u] = 1 - color[v]
                    queue.append(u)
                elif color[u] == color[v]:
                    return BipartiteVerdict(False)
    return BipartiteVerdict(True, tuple(color))


def graph_from_adjacency(adj, family: str = "custom", params: Mapping | None = None,
                         labels: Sequence[str] | None = None) -> RegularMultigraph:
    adj = np.asarray(adj, dtype=np.int64)
    d = int(adj.sum(axis=0)[0]) if adj.size else 0
    return RegularMultigraph(adj, d, family, dict(params or {}), None if labels is None else tuple(labels))


def cycle_graph(n: int) -> RegularMultigraph:
    from .groups import cyclic

    if n < 3:
        raise InvalidDescriptor("cycles need n >= 3")
    return cayley(cyclic(n), [1, n - 1])
