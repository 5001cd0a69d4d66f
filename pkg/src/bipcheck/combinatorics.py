"""Exact isoperimetric constants, edge counts and Birkhoff-von Neumann decomposition.

Vertex subsets are int bitmasks (bit v set <=> v in the set).  The four
constants are minimised exhaustively using lookup tables indexed by mask:

* ``E(S, S)`` for every S, built by doubling over the vertices;
* the neighbourhood mask ``N(S)`` for every S, built the same way.

A ratio ``num / (c * k)`` with ``k`` in ``1..K`` is compared exactly through the
integer key ``num * (lcm(1..K) // k)``, so no floating point is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import InternalError, InvalidDescriptor, NoMatching, NotRegular, TooLarge
from .graphs import RegularMultigraph

SUBSET_CAP = 24
TERNARY_CAP = 16
_CHUNK = 1 << 20
_LOW_BITS = 9


def to_mask(vertices: int | Iterable[int]) -> int:
    if isinstance(vertices, (int, np.integer)):
        return int(vertices)
    m = 0
    for v in vertices:
        m |= 1 << int(v)
    return m


def mask_to_list(mask: int) -> list[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


@dataclass(frozen=True)
class CutWitness:
    kind: str  # "subset" or "pair"
    value: Fraction
    subset: int = 0
    left: int = 0
    right: int = 0

    def as_lists(self) -> dict:
        if self.kind == "subset":
            return {"subset": mask_to_list(self.subset)}
        return {"left": mask_to_list(self.left), "right": mask_to_list(self.right)}


# -- counts ------------------------------------------------------------------

def edge_count(gr: RegularMultigraph, a, b) -> int:
    """<T 1_A, 1_B> = sum over u in B, v in A of adj[u][v] (ordered incidences)."""
    av = mask_to_list(to_mask(a))
    bv = mask_to_list(to_mask(b))
    if not av or not bv:
        return 0
    return int(gr.adj[np.ix_(bv, av)].sum())


def neighbourhood(gr: RegularMultigraph, s) -> int:
    """Mask of vertices v with edge_count(S, {v}) > 0."""
    sv = mask_to_list(to_mask(s))
    if not sv:
        return 0
    return to_mask(np.flatnonzero(gr.adj[:, sv].sum(axis=1) > 0))


def vol(gr: RegularMultigraph, s, power: int = 1) -> int:
    """<T^p 1_V, 1_S>; always d^p |S| for a d-regular T."""
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    m = gr.adj if power == 1 else gr.adj @ gr.adj
    sv = mask_to_list(to_mask(s))
    total = int(m[sv].sum()) if sv else 0
    if total != gr.d ** power * len(sv):
        raise InternalError("volume is not d^power * |S|")
    return total


# -- lookup tables -----------------------------------------------------------

def _popcounts(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint32)).astype(np.int64)


def _internal_table(adj: np.ndarray) -> np.ndarray:
    """E(S, S) for every mask S."""
    n = adj.shape[0]
    e = np.zeros(1, dtype=np.int64)
    for v in range(n):
        w = np.zeros(1, dtype=np.int64)  # w[S] = sum_{u in S} adj[u][v], S over vertices < v
        for u in range(v):
            w = np.concatenate((w, w + adj[u, v]))
        e = np.concatenate((e, e + 2 * w + adj[v, v]))
    return e


def _neighbour_table(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    nb = np.zeros(1, dtype=np.int64)
    for v in range(n):
        nv = to_mask(np.flatnonzero(adj[:, v]))
        nb = np.concatenate((nb, nb | nv))
    return nb


def _lcm_upto(k: int) -> int:
    return reduce(math.lcm, range(1, k + 1), 1)


def _check_cap(what: str, n: int, cap: int) -> None:
    if n > cap:
        raise TooLarge(what, n, cap)


def _minimise_subsets(n: int, numerators, scale: int, cap: int, what: str) -> tuple[Fraction, int]:
    """Minimise numerators(S) / (scale |S|) over 0 < |S| <= n/2; ties to the smallest mask."""
    _check_cap(what, n, cap)
    half = n // 2
    big = _lcm_upto(half)
    mult = np.zeros(n + 1, dtype=np.int64)
    mult[1:half + 1] = [big // k for k in range(1, half + 1)]
    best_key, best_mask = None, None
    for start in range(0, 1 << n, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, 1 << n), dtype=np.int64)
        sizes = np.bitwise_count(masks.astype(np.uint32)).astype(np.int64)
        key = numerators(masks, sizes) * mult[sizes]
        key = np.where(mult[sizes] > 0, key, np.iinfo(np.int64).max)
        i = int(np.argmin(key))
        if best_key is None or key[i] < best_key:
            best_key, best_mask = int(key[i]), int(masks[i])
    return Fraction(best_key, scale * big), best_mask


def edge_cheeger(gr: RegularMultigraph, cap: int = SUBSET_CAP) -> tuple[Fraction, CutWitness]:
    _check_cap("edge_cheeger", gr.n, cap)
    e = _internal_table(gr.adj)
    d = gr.d
    value, mask = _minimise_subsets(gr.n, lambda m, k: d * k - e[m], d, cap, "edge_cheeger")
    return value, CutWitness("subset", value, subset=mask)


def vertex_cheeger(gr: RegularMultigraph, cap: int = SUBSET_CAP) -> tuple[Fraction, CutWitness]:
    _check_cap("vertex_cheeger", gr.n, cap)
    nb = _neighbour_table(gr.adj)
    value, mask = _minimise_subsets(
        gr.n, lambda m, k: np.bitwise_count((nb[m] & ~m).astype(np.uint64)).astype(np.int64), 1, cap,
        "vertex_cheeger")
    return value, CutWitness("subset", value, subset=mask)


def _disjoint_pairs(bits: int) -> tuple[np.ndarray, np.ndarray]:
    left = np.zeros(1, dtype=np.int64)
    right = np.zeros(1, dtype=np.int64)
    for b in range(bits):
        bit = 1 << b
        left = np.concatenate((left, left | bit, left))
        right = np.concatenate((right, right, right | bit))
    return left, right


def _minimise_pairs(n: int, numerators, scale: int, cap: int, what: str) -> tuple[Fraction, int, int]:
    """Minimise numerators(L, R, U) / (scale |U|) over disjoint L, R with U = L | R nonempty.

    Ties go to the lexicographically smallest (L, R).
    """
    _check_cap(what, n, cap)
    big = _lcm_upto(n)
    mult = np.zeros(n + 1, dtype=np.int64)
    mult[1:] = [big // k for k in range(1, n + 1)]
    low = min(n, _LOW_BITS)
    low_l, low_r = _disjoint_pairs(low)
    high_l, high_r = _disjoint_pairs(n - low)
    best = None  # (key, L, R)
    for hl, hr in zip(high_l.tolist(), high_r.tolist()):
        left = low_l | (hl << low)
        right = low_r | (hr << low)
        union = left | right
        sizes = np.bitwise_count(union.astype(np.uint64)).astype(np.int64)
        key = numerators(left, right, union, sizes) * mult[sizes]
        key = np.where(sizes > 0, key, np.iinfo(np.int64).max)
        kmin = int(key.min())
        if best is not None and kmin > best[0]:
            continue
        idx = np.flatnonzero(key == kmin)
        order = np.lexsort((right[idx], left[idx]))
        j = idx[order[0]]
        cand = (kmin, int(left[j]), int(right[j]))
        if best is None or cand < best:
            best = cand
    key, lmask, rmask = best
    return Fraction(key, scale * big), lmask, rmask


def edge_bipartiteness(gr: RegularMultigraph, cap: int = TERNARY_CAP) -> tuple[Fraction, CutWitness]:
    """min over disjoint (L, R) of (E(L,L) + E(R,R) + |boundary(L u R)|) / (d |L u R|)."""
    _check_cap("edge_bipartiteness", gr.n, cap)
    e = _internal_table(gr.adj)
    d = gr.d

    def num(left, right, union, sizes):
        return e[left] + e[right] + d * sizes - e[union]

    value, lm, rm = _minimise_pairs(gr.n, num, d, cap, "edge_bipartiteness")
    return value, CutWitness("pair", value, left=lm, right=rm)


def vertex_bipartiteness(gr: RegularMultigraph, cap: int = TERNARY_CAP) -> tuple[Fraction, CutWitness]:
    """min over disjoint (L, R) of (|L n N(L)| + |R n N(R)| + |N(L u R) minus (L u R)|) / |L u R|."""
    _check_cap("vertex_bipartiteness", gr.n, cap)
    nb = _neighbour_table(gr.adj)
    masks = np.arange(1 << gr.n, dtype=np.int64)
    inner = np.bitwise_count((masks & nb).astype(np.uint64)).astype(np.int64)
    outer = np.bitwise_count((nb & ~masks).astype(np.uint64)).astype(np.int64)

    def num(left, right, union, sizes):
        return inner[left] + inner[right] + outer[union]

    value, lm, rm = _minimise_pairs(gr.n, num, 1, cap, "vertex_bipartiteness")
    return value, CutWitness("pair", value, left=lm, right=rm)


def edge_cheeger_operator(gr: RegularMultigraph, cap: int = SUBSET_CAP) -> Fraction:
    """min over F != empty, V of <T 1_F, 1_F^c> / min(vol F, vol F^c); equals edge_cheeger for regular T."""
    return edge_cheeger(gr, cap)[0]


# -- matchings and Birkhoff-von Neumann ---------------------------------------

def perfect_matching(bip) -> list[int]:
    """A permutation pi with bip[pi[v]][v] true for every column v.

    Rows are matched to columns by Hopcroft-Karp after a greedy pass in which
    each row takes its smallest free column.  Raises ``NoMatching`` carrying a
    row set R whose neighbourhood is smaller than R.
    """
    b = np.asarray(bip, dtype=bool)
    n = b.shape[0]
    nbrs = [np.flatnonzero(b[u]).tolist() for u in range(n)]
    row_to = [-1] * n
    col_to = [-1] * n
    for u in range(n):
        for v in nbrs[u]:
            if col_to[v] < 0:
                row_to[u], col_to[v] = v, u
                break

    inf = n + 1
    while True:
        dist = [inf] * n
        queue = [u for u in range(n) if row_to[u] < 0]
        for u in queue:
            dist[u] = 0
        found = False
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in nbrs[u]:
                w = col_to[v]
                if w < 0:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found:
            break

        def augment(u: int) -> bool:
            for v in nbrs[u]:
                w = col_to[v]
                if w < 0 or (dist[w] == dist[u] + 1 and augment(w)):
                    row_to[u], col_to[v] = v, u
                    return True
            dist[u] = inf
            return False

        progressed = False
        for u in range(n):
            if row_to[u] < 0 and augment(u):
                progressed = True
        if not progressed:
            break

    free = [u for u in range(n) if row_to[u] < 0]
    if free:
        reached = {free[0]}
        stack = [free[0]]
        while stack:
            u = stack.pop()
            for v in nbrs[u]:
                w = col_to[v]
                if w >= 0 and w not in reached:
                    reached.add(w)
                    stack.append(w)
        raise NoMatching(reached)
    return col_to


def birkhoff_decompose(gr) -> list[tuple[int, ...]]:
    """d permutations rho with adj[u][v] = #{i : rho_i(v) = u}.

    Accepts a ``RegularMultigraph`` or any square nonnegative integer matrix
    whose row and column sums all agree (symmetry is not needed).
    """
    if isinstance(gr, RegularMultigraph):
        residual, d = np.array(gr.adj, dtype=np.int64), gr.d
    else:
        residual = np.array(gr, dtype=np.int64)
        if residual.ndim != 2 or residual.shape[0] != residual.shape[1] or np.any(residual < 0):
            raise InvalidDescriptor("need a square nonnegative integer matrix")
        sums = set(residual.sum(axis=0).tolist()) | set(residual.sum(axis=1).tolist())
        if len(sums) != 1:
            raise NotRegular(f"row/column sums differ: {sorted(sums)}")
        d = sums.pop()
    n = residual.shape[0]
    perms = []
    for _ in range(d):
        try:
            pi = perfect_matching(residual > 0)
        except NoMatching as exc:
            raise InternalError(f"matching step failed on a regular residual: {exc}") from exc
        residual[pi, np.arange(n)] -= 1
        perms.append(tuple(pi))
    if np.any(residual):
        raise InternalError("decomposition did not exhaust the adjacency")
    return perms


def permutation_sum(perms: Sequence[Sequence[int]], n: int) -> np.ndarray:
    total = np.zeros((n, n), dtype=np.int64)
    for p in perms:
        total[list(p), np.arange(n)] += 1
    return total
