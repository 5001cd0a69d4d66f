"""Mechanical checks of the bipartiteness, lower-gap and square-graph inequalities.

Every check returns a ``CheckReport``.  Purely combinatorial comparisons use
exact ``Fraction`` arithmetic; comparisons involving eigenvalues use a fixed
slack of ``FLOAT_SLACK``.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Sequence

import numpy as np

from . import combinatorics as comb
from .errors import BipcheckError, HypothesisViolated, InapplicableBipartite, TooLarge
from .graphs import GRAPH_CLASSES, RegularMultigraph, commutes_with_action, is_bipartite, square_graph
from .groups import (GroupAction, Subgroup, index_two_subgroups,
                     is_subgroup, is_transitive, no_index_two_transitive, orbits)
from .spectral import SpectrumReport, normalized_spectrum

FLOAT_SLACK = 1e-9
PASS, FAIL, INAPPLICABLE = "pass", "fail", "inapplicable"


@dataclass
class CheckReport:
    check_id: str
    hypothesis_ok: bool
    lhs: Any = None
    rhs: Any = None
    margin: Any = None
    verdict: str = INAPPLICABLE
    witness: Any = None
    detail: str = ""
    value: Any = None  # middle term of a two-sided inequality

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def inapplicable(check_id: str, reason: str) -> CheckReport:
    return CheckReport(check_id, False, verdict=INAPPLICABLE, detail=reason)


def _exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def compare(check_id: str, lhs, rhs, *, strict: bool = False, witness=None, detail: str = "") -> CheckReport:
    """Report on ``lhs <= rhs`` (or ``lhs < rhs``)."""
    margin = rhs - lhs
    if _exact(lhs) and _exact(rhs):
        ok = margin > 0 if strict else margin >= 0
    else:
        margin = float(margin)
        ok = margin > -FLOAT_SLACK if not strict else margin > 0
    return CheckReport(check_id, True, lhs, rhs, margin, PASS if ok else FAIL, witness, detail)


def _sandwich(check_id: str, low, mid: float, high, witness=None, detail: str = "") -> CheckReport:
    margin = min(mid - float(low), float(high) - mid)
    verdict = PASS if margin >= -FLOAT_SLACK else FAIL
    return CheckReport(check_id, True, low, high, margin, verdict, witness, detail, mid)


class GraphAnalysis:
    """Lazily computed invariants of one graph, shared by all checks."""

    def __init__(self, gr: RegularMultigraph, action: GroupAction | None = None, *,
                 subset_cap: int = comb.SUBSET_CAP, ternary_cap: int = comb.TERNARY_CAP,
                 spectrum_graph: RegularMultigraph | None = None, seed: int = 0):
        self.gr = gr
        self.seed = seed
        self.action = action if action is not None else gr.action
        self.subset_cap = subset_cap
        self.ternary_cap = ternary_cap
        self._spectrum_graph = spectrum_graph or gr

    @cached_property
    def bipartite(self) -> bool:
        return is_bipartite(self.gr).bipartite

    @cached_property
    def connected(self) -> bool:
        return self.gr.is_connected()

    @cached_property
    def edge_cheeger(self):
        return comb.edge_cheeger(self.gr, self.subset_cap)

    @cached_property
    def vertex_cheeger(self):
        return comb.vertex_cheeger(self.gr, self.subset_cap)

    @cached_property
    def beta_edge(self):
        return comb.edge_bipartiteness(self.gr, self.ternary_cap)

    @cached_property
    def beta_vert(self):
        return comb.vertex_bipartiteness(self.gr, self.ternary_cap)

    @cached_property
    def square(self) -> RegularMultigraph:
        return square_graph(self.gr)

    @cached_property
    def square_cheeger(self):
        return comb.edge_cheeger(self.square, self.subset_cap)

    @cached_property
    def spectrum(self) -> SpectrumReport:
        return normalized_spectrum(self._spectrum_graph)

    @cached_property
    def graph_class(self) -> str:
        return self.gr.family

    @cached_property
    def acts_by_automorphisms(self) -> bool:
        a = self.action
        return a is not None and is_transitive(a) and commutes_with_action(self.gr, a, 1)

    @cached_property
    def commutes_with_square(self) -> bool:
        a = self.action
        return a is not None and commutes_with_action(self.gr, a, 2)


def _analysis(x) -> GraphAnalysis:
    return x if isinstance(x, GraphAnalysis) else GraphAnalysis(x)


def _require_nonbipartite(ctx: GraphAnalysis, check_id: str) -> None:
    if ctx.bipartite:
        raise InapplicableBipartite(f"{check_id}: graph is bipartite")


# -- spectral sandwiches ------------------------------------------------------

def check_cheeger_buser(x) -> CheckReport:
    """h^2 / 2 <= 1 - mu_2 <= 2 h."""
    ctx = _analysis(x)
    if not ctx.connected:
        return inapplicable("cheeger_buser", "graph is disconnected (mu_2 = 1)")
    h, wit = ctx.edge_cheeger
    return _sandwich("cheeger_buser", h * h / 2, ctx.spectrum.upper_gap, 2 * h, wit,
                     f"h={h}, 1-mu2={ctx.spectrum.upper_gap:.12g}")


def check_trevisan(x) -> CheckReport:
    """beta_edge^2 / 2 <= 1 + mu_n <= 2 beta_edge."""
    ctx = _analysis(x)
    b, wit = ctx.beta_edge
    return _sandwich("trevisan", b * b / 2, ctx.spectrum.lower_gap, 2 * b, wit,
                     f"beta_edge={b}, 1+mu_n={ctx.spectrum.lower_gap:.12g}")


# -- bipartiteness lower bounds -----------------------------------------------

def piecewise_edge_bound(beta: Fraction, d: int, c: int) -> Fraction:
    """c * beta if d * beta < 1/c, else c * d * beta."""
    return c * beta if d * beta < Fraction(1, c) else c * d * beta


def check_main_bipartiteness(x, graph_class: str | None = None) -> tuple[CheckReport, CheckReport]:
    """Edge and vertex bipartiteness lower bounds.

    When the acting group acts through graph automorphisms the sharper
    constants (40 piecewise, 60) are checked, otherwise (90 piecewise, 135).
    Both imply beta_edge >= h/(90 d) and beta_vert >= h_vert/135.
    """
    ctx = _analysis(x)
    graph_class = graph_class or ctx.graph_class
    _require_nonbipartite(ctx, "bipartiteness")
    if graph_class not in GRAPH_CLASSES:
        raise ValueError(f"graph class {graph_class!r} is not covered by the bounds")
    sharp = ctx.acts_by_automorphisms
    d = ctx.gr.d
    h, _ = ctx.edge_cheeger
    hv, _ = ctx.vertex_cheeger
    be, wit_e = ctx.beta_edge
    bv, wit_v = ctx.beta_vert
    c_edge, c_vert = (40, 60) if sharp else (90, 135)
    edge = compare("bipartiteness_edge", h, piecewise_edge_bound(be, d, c_edge), witness=wit_e,
                   detail=f"h <= piecewise {c_edge}(d)beta_edge; beta_edge={be}, h={h}, d={d}")
    vert = compare("bipartiteness_vertex", hv, c_vert * bv, witness=wit_v,
                   detail=f"h_vert <= {c_vert} beta_vert; beta_vert={bv}, h_vert={hv}")
    return edge, vert


def check_lower_gap_corollary(x) -> CheckReport:
    """1 + mu_n >= h_vert^2 / (2 * 135^2 * d^2), via Trevisan and beta_edge >= beta_vert / d."""
    ctx = _analysis(x)
    _require_nonbipartite(ctx, "lower_gap_chain")
    hv, wit = ctx.vertex_cheeger
    d = ctx.gr.d
    bound = hv * hv / (2 * 135 ** 2 * d * d)
    be, _ = ctx.beta_edge
    bv, _ = ctx.beta_vert
    chain = [be * be / 2 <= ctx.spectrum.lower_gap + FLOAT_SLACK, be >= bv / d, bv >= hv / 135]
    rep = compare("lower_gap_chain", bound, ctx.spectrum.lower_gap, witness=wit,
                  detail=f"chain links hold: {chain}")
    if not all(chain):
        rep.verdict = FAIL
    return rep


# -- square graph --------------------------------------------------------------

def check_square_cheeger(x, commuting_case: bool | None = None) -> CheckReport:
    """h(Gamma^2) > h^2 / (K d) with K = 20 when the action commutes with T, else 48."""
    ctx = _analysis(x)
    _require_nonbipartite(ctx, "square_cheeger")
    if not ctx.connected:
        return inapplicable("square_cheeger", "graph is disconnected (h = 0)")
    if commuting_case is None:
        commuting_case = ctx.acts_by_automorphisms
    k = 20 if commuting_case else 48
    h, _ = ctx.edge_cheeger
    h2, wit = ctx.square_cheeger
    return compare("square_cheeger", h * h / (k * ctx.gr.d), h2, strict=True, witness=wit,
                   detail=f"K={k}, h={h}, h_square={h2}")


def check_lemma_4_3(x, sample: Sequence[int] | None = None, *, seed: int | None = None) -> CheckReport:
    """<T 1_Y, 1_Y^c> <= <T^2 1_X, 1_X^c> with Y = X u N(X), over a family of subsets X."""
    ctx = _analysis(x)
    gr = ctx.gr
    n = gr.n
    if sample is None:
        if n <= 10:
            sample = range(1 << n)
        else:
            rng = random.Random(ctx.seed if seed is None else seed)
            sample = [rng.getrandbits(n) for _ in range(1000)]
    masks = np.array(list(sample), dtype=np.int64)
    xs = ((masks[:, None] >> np.arange(n)) & 1).astype(np.int64)
    adj = gr.adj
    adj2 = adj @ adj
    ys = xs | ((xs @ adj) > 0).astype(np.int64)
    lhs = (((1 - ys) @ adj) * ys).sum(axis=1)
    rhs = (((1 - xs) @ adj2) * xs).sum(axis=1)
    slack = rhs - lhs
    i = int(np.argmin(slack))
    rep = compare("neighbourhood_walks", int(lhs[i]), int(rhs[i]), witness=int(masks[i]),
                  detail=f"{len(masks)} subsets; tightest X={comb.mask_to_list(int(masks[i]))}")
    return rep


def dichotomy_margin(vol_a, vol_cap, c) -> Fraction:
    """Distance by which vol_cap clears the nearer branch: >= vol_a (1 - c) or <= vol_a c."""
    return max(vol_cap - vol_a * (1 - c), vol_a * c - vol_cap)


def check_dichotomy(x, action: GroupAction | None = None) -> CheckReport:
    """For the minimiser A of h(T^2) and every g: vol(A n gA) is >= vol(A)(1 - c) or <= vol(A) c."""
    ctx = _analysis(x)
    a = action or ctx.action
    if a is None:
        return inapplicable("dichotomy", "no group action")
    if ctx.bipartite:
        return inapplicable("dichotomy", "-1 is an eigenvalue (bipartite)")
    if not commutes_with_action(ctx.gr, a, 2) or not is_transitive(a):
        return inapplicable("dichotomy", "action is not transitive or does not commute with T^2")
    d = ctx.gr.d
    h, _ = ctx.edge_cheeger
    psi, wit = ctx.square_cheeger
    if not psi < h / d:
        return inapplicable("dichotomy", f"hypothesis psi < h/d fails: psi={psi}, h/d={h / d}")
    c = 2 * d * psi * (1 + h) / (h * h)
    amask = wit.subset
    members = comb.mask_to_list(amask)
    vol_a = d * len(members)
    worst = None
    for g in range(a.group.order):
        image = {int(a.act[g, v]) for v in members}
        vol_cap = d * len(image.intersection(members))
        m = dichotomy_margin(vol_a, vol_cap, c)
        if worst is None or m < worst[0]:
            worst = (m, g, vol_cap)
    margin, g, vol_cap = worst
    return CheckReport("dichotomy", True, vol_cap, vol_a, margin, PASS if margin >= 0 else FAIL, wit,
                       f"c={c}, tightest g={a.group.labels[g]}, psi={psi}, h={h}")


# -- trapping lemma ------------------------------------------------------------

@dataclass
class TrappingInstance:
    action: GroupAction
    script_v: frozenset[int]
    delta: Fraction
    xi: Fraction = Fraction(0)
    zeta: Fraction = Fraction(0)
    kappa: Fraction | None = None
    mu: Fraction | None = None

    def subgroup_constraint_failures(self) -> list[str]:
        n = self.action.degree
        ratio = Fraction(len(self.script_v), n)
        d, xi, zeta = self.delta, self.xi, self.zeta
        out = []
        if xi < 0 or zeta < 0 or d < 0:
            out.append("xi, zeta, delta must be nonnegative")
        if not (1 - xi) / 2 <= ratio:
            out.append("(1-xi)/2 <= |V|/|V| fails")
        if not ratio <= (1 + zeta) / 2:
            out.append("|V|/|V| <= (1+zeta)/2 fails")
        if not d > 0:
            out.append("delta > 0 fails")
        if not d < (1 - zeta) / 2:
            out.append("delta < (1-zeta)/2 fails")
        if not d < (1 - 3 * xi) / 4:
            out.append("delta < (1-3xi)/4 fails")
        return out

    def partition_constraint_failures(self) -> list[str]:
        mu, kappa = self.mu, self.kappa
        if mu is None or kappa is None:
            return ["mu and kappa are required"]
        out = []
        if not mu > 0:
            out.append("mu > 0 fails")
        if not kappa >= 0:
            out.append("kappa >= 0 fails")
        slack = 1 / (2 * mu) - self.xi - kappa if mu > 0 else Fraction(-1)
        if not slack > 0:
            out.append("1/(2mu) - xi - kappa > 0 fails")
        elif not self.delta < 2 / (1 + self.zeta) * slack ** 2:
            out.append("delta < 2/(1+zeta) (1/(2mu) - xi - kappa)^2 fails")
        return out


@dataclass
class TrappingReport:
    intersections: list[int]
    gap_hypothesis_ok: bool
    h_delta: list[int]
    is_subgroup: bool | None = None
    index: Fraction | None = None
    orbits: list[list[int]] = field(default_factory=list)
    defects: list[int] = field(default_factory=list)
    bound_squared: Fraction | None = None
    conclusion_ok: bool | None = None


def trapping_H_delta(inst: TrappingInstance) -> TrappingReport:
    a = inst.action
    failures = []
    if not is_transitive(a):
        failures.append("action is not transitive")
    elif not no_index_two_transitive(a):
        failures.append("an index-two subgroup acts transitively")
    failures += inst.subgroup_constraint_failures()
    if not inst.script_v:
        failures.append("the distinguished set is empty")
    if failures:
        raise HypothesisViolated(failures)
    vs = sorted(inst.script_v)
    size = len(vs)
    vset = set(vs)
    inter = [len(vset.intersection(int(a.act[g, v]) for v in vs)) for g in range(a.group.order)]
    lo, hi = inst.delta * size, (1 - inst.delta) * size
    gap_ok = not any(lo < k < hi for k in inter)
    h_delta = [g for g, k in enumerate(inter) if k >= hi]
    rep = TrappingReport(inter, gap_ok, h_delta)
    if not gap_ok:
        return rep
    rep.is_subgroup = is_subgroup(a.group, h_delta)
    rep.index = Fraction(a.group.order, len(h_delta))
    if rep.is_subgroup:
        rep.orbits = orbits(a, Subgroup(frozenset(h_delta)))
        rep.defects = [len(vset - set(o)) for o in rep.orbits]
    n = a.degree
    rep.bound_squared = inst.delta * (1 + inst.zeta) / 2 * Fraction(n * n, 4)
    rep.conclusion_ok = bool(rep.is_subgroup and rep.index == 2
                             and any(k * k <= rep.bound_squared for k in rep.defects))
    return rep


def check_partition_conclusion(x, action: GroupAction | None = None) -> CheckReport:
    """Search index-two-subgroup orbit pairs (V1, V2) of equal size with V_j n rho(V_j) empty."""
    ctx = _analysis(x)
    gr = ctx.gr
    a = action or ctx.action
    if a is None:
        return inapplicable("partition", "no group action")
    perms = comb.birkhoff_decompose(gr)
    found = None
    for h in index_two_subgroups(a.group):
        orbs = orbits(a, h)
        if len(orbs) != 2 or len(orbs[0]) != len(orbs[1]):
            continue
        if all(not set(vj).intersection(p[v] for p in perms for v in vj) for vj in orbs):
            found = orbs
            break
    if ctx.bipartite:
        if found is None:
            classes = is_bipartite(gr).classes()
            if classes and len(classes[0]) == len(classes[1]):
                found = list(classes)
        if found is None:
            return inapplicable("partition", "bipartite, but no equal-size orbit partition exists")
        return CheckReport("partition", True, verdict=PASS, witness=found, detail="partition found")
    verdict = PASS if found is None else FAIL
    return CheckReport("partition", True, verdict=verdict, witness=found,
                       detail="no partition (consistent with -1 not an eigenvalue)" if found is None
                       else "partition found on a non-bipartite graph")


# -- running everything --------------------------------------------------------

VERIFY_CHECKS = ("cheeger_buser", "trevisan", "bipartiteness_edge", "bipartiteness_vertex", "lower_gap_chain", "square_cheeger",
                 "neighbourhood_walks", "dichotomy")


def _guard(check_ids: Sequence[str], fn, *args) -> list[CheckReport]:
    try:
        out = fn(*args)
    except InapplicableBipartite:
        return [inapplicable(c, "graph is bipartite") for c in check_ids]
    except TooLarge as exc:
        return [inapplicable(c, f"enumeration cap exceeded ({exc})") for c in check_ids]
    return list(out) if isinstance(out, tuple) else [out]


def verify_graph(ctx: GraphAnalysis) -> list[CheckReport]:
    reports = []
    reports += _guard(["cheeger_buser"], check_cheeger_buser, ctx)
    reports += _guard(["trevisan"], check_trevisan, ctx)
    if ctx.graph_class in GRAPH_CLASSES:
        reports += _guard(["bipartiteness_edge", "bipartiteness_vertex"], check_main_bipartiteness, ctx)
    else:
        reports += [inapplicable(c, f"graph class {ctx.graph_class!r} not covered")
                    for c in ("bipartiteness_edge", "bipartiteness_vertex")]
    reports += _guard(["lower_gap_chain"], check_lower_gap_corollary, ctx)
    if ctx.graph_class in GRAPH_CLASSES:
        reports += _guard(["square_cheeger"], check_square_cheeger, ctx)
    else:
        reports.append(inapplicable("square_cheeger", f"graph class {ctx.graph_class!r} not covered"))
    if ctx.bipartite:
        reports.append(inapplicable("neighbourhood_walks", "-1 is an eigenvalue (bipartite)"))
    else:
        reports += _guard(["neighbourhood_walks"], check_lemma_4_3, ctx)
    reports += _guard(["dichotomy"], check_dichotomy, ctx)
    return reports


def tightness_ratios(ctx: GraphAnalysis) -> dict[str, Fraction | None]:
    """beta_edge 90d / h, beta_vert 135 / h_vert, h(Gamma^2) 48 d / h^2; each >= 1 by the bounds."""
    out: dict[str, Fraction | None] = {"edge": None, "vertex": None, "square": None}
    if ctx.bipartite:
        return out
    d = ctx.gr.d
    try:
        h = ctx.edge_cheeger[0]
        if h > 0:
            out["square"] = ctx.square_cheeger[0] * 48 * d / (h * h)
            out["edge"] = ctx.beta_edge[0] * 90 * d / h
        hv = ctx.vertex_cheeger[0]
        if hv > 0:
            out["vertex"] = ctx.beta_vert[0] * 135 / hv
    except TooLarge:
        pass
    return out


@dataclass
class InstanceResult:
    name: str
    graph: RegularMultigraph
    reports: list[CheckReport]
    ratios: dict
    analysis: GraphAnalysis | None = None
    error: str | None = None


@dataclass
class SweepResult:
    instances: list[InstanceResult]
    min_ratios: dict

    @property
    def failures(self) -> list[tuple[str, CheckReport]]:
        return [(r.name, c) for r in self.instances for c in r.reports if c.verdict == FAIL]


def run_instance(name: str, gr: RegularMultigraph, subset_cap: int = comb.SUBSET_CAP,
                 ternary_cap: int = comb.TERNARY_CAP, seed: int = 0) -> InstanceResult:
    ctx = GraphAnalysis(gr, subset_cap=subset_cap, ternary_cap=ternary_cap, seed=seed)
    try:
        reports = verify_graph(ctx)
        ratios = tightness_ratios(ctx)
    except BipcheckError as exc:
        return InstanceResult(name, gr, [], {}, None, f"{type(exc).__name__}: {exc}")
    return InstanceResult(name, gr, reports, ratios, ctx)


def _run_packed(args):
    return run_instance(*args)


def sweep(family: Iterable[tuple[str, RegularMultigraph]], *, jobs: int = 1,
          subset_cap: int = comb.SUBSET_CAP, ternary_cap: int = comb.TERNARY_CAP, seed: int = 0) -> SweepResult:
    """Run every check on each (name, graph); per-instance errors are recorded, not raised.

    Results come back in input order whatever the number of workers.
    """
    items = [(name, gr, subset_cap, ternary_cap, seed) for name, gr in family]
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_packed, items))
    else:
        results = [run_instance(*it) for it in items]
    mins: dict = {"edge": None, "vertex": None, "square": None}
    for res in results:
        for key, val in res.ratios.items():
            if val is not None and (mins[key] is None or val < mins[key]):
                mins[key] = val
    return SweepResult(results, mins)
