"""Greedy low-step flows of small total length.

Length scales h_p = (1+eps)^p are swept from short to long. At each scale
lengths are coarsened so that an h_p-length path has about t/eps units,
and approximate length-constrained maxflows are routed repeatedly until
the scale is exhausted or the requested value is reached.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from ._num import INF, as_fraction, frac_ceil, frac_floor, next_power_of_two
from .errors import InvalidInstance, PremiseViolated
from .graph import EDGE, VERTEX, Demand, EdgeFlow, Graph, PathFlow, split_vertices, to_edge_representation
from .maxflow import MaxflowConfig, lc_mc_maxflow
from .rounding import decompose_st_flow, round_flow

log = logging.getLogger(__name__)


@dataclass
class LowStepResult:
    flow: PathFlow
    buckets: list = field(default_factory=list)
    maxflow_calls: int = 0
    mu: int = 1


def _shortest_scaled(g: Graph, lengths, s, t, bound):
    """Is there an s-t path of scaled length <= bound? (Dijkstra on integers)"""
    import heapq
    dist = {s: 0}
    heap = [(0, 0, s)]
    k = 1
    while heap:
        d, _, v = heapq.heappop(heap)
        if d > dist.get(v, INF):
            continue
        if v == t:
            return True
        for x in g.successors(v):
            nd = d + lengths[(v, x)]
            if nd <= bound and nd < dist.get(x, INF):
                dist[x] = nd
                heapq.heappush(heap, (nd, k, x))
                k += 1
    return False


def _distance(g: Graph, s, t):
    import heapq
    dist = {s: 0}
    heap = [(0, 0, s)]
    k = 1
    while heap:
        d, _, v = heapq.heappop(heap)
        if v == t:
            return d
        if d > dist[v]:
            continue
        for x in g.successors(v):
            nd = d + g.length[(v, x)]
            if nd < dist.get(x, INF):
                dist[x] = nd
                heapq.heappush(heap, (nd, k, x))
                k += 1
    return INF


def _bucket_count(eps, n, big):
    p, hp = 0, Fraction(1)
    while hp < n * big:
        hp *= 1 + eps
        p += 1
    return p


def lowstep_directed(g: Graph, d: Mapping, t: int, tau, eps, *, strict: bool = False,
                     maxflow_config: MaxflowConfig | None = None) -> LowStepResult:
    """t-step flow partially routing D with value tau - 1/n and small total length.

    Guarantees Dem(F) <= D, value(F) = tau - 1/n, congestion
    O(log^2 n / eps) and totlen(F) <= (1+eps)^4 times the least total
    length of any feasible t-step flow partially routing D with value tau.
    """
    if g.mode != EDGE:
        raise InvalidInstance("lowstep_directed needs an edge-weighted digraph")
    eps, tau = as_fraction(eps), as_fraction(tau)
    d = Demand(d)
    n = g.n
    if not 0 < eps < 1:
        raise InvalidInstance("eps must lie in (0, 1)")
    if eps < Fraction(10, n):
        if strict:
            raise InvalidInstance(f"eps must be at least 10/n = {Fraction(10, n)}")
        log.info("eps=%s is below 10/n for n=%d; continuing", eps, n)
    if not isinstance(t, int) or t < 1:
        raise InvalidInstance("step bound t must be a positive integer")
    if any(x == INF for x in d.values()):
        raise InvalidInstance("lowstep needs a finite demand")
    if not 1 / Fraction(n) < tau <= d.size:
        raise InvalidInstance("need 1/n < tau <= |D|")
    mu = next_power_of_two(n ** 4)
    if any((x * mu).denominator != 1 for x in d.values()):
        raise InvalidInstance("demand must be (1/mu)-fractional")
    big = max(g.value_bound(), max((frac_ceil(x) for x in d.values()), default=1))
    target = tau - Fraction(1, n)
    rounds_per_bucket = 2 * math.ceil(math.log2(n * n * big))
    pbar = _bucket_count(eps, n, big)
    bound = frac_floor(t / eps + t)
    mcfg = maxflow_config or MaxflowConfig()
    rest = dict(d.items())
    flow = PathFlow()
    value = Fraction(0)
    buckets, calls = [], 0
    # scaled lengths dominate l * t / (eps h_p), so no pair is live while
    # eps * h_p * bound < t * (shortest distance of any pair)
    dmin = min((_distance(g, u, v) for u, v in d), default=INF)
    hp = Fraction(1)
    for p in range(pbar + 1):
        if p:
            hp *= 1 + eps
        if dmin == INF or eps * hp * bound < t * dmin:
            continue
        unit = eps * hp / t
        scaled = {e: frac_ceil(g.length[e] / unit) for e in g.edges}
        record = {"p": p, "h_p": hp, "value": Fraction(0), "totlen": Fraction(0), "calls": 0}
        for _ in range(rounds_per_bucket):
            live = [pair for pair, x in rest.items() if x > 0 and
                    _shortest_scaled(g, scaled, pair[0], pair[1], bound)]
            if not live:
                break
            approx = _route_scaled(g, scaled, live, rest, mu, bound, mcfg)
            calls += 1
            record["calls"] += 1
            if approx.value <= Fraction(1, 2 * n):
                break
            for _, path, _ in approx.items:
                ln = sum(g.length[e] for e in zip(path, path[1:]))
                if ln > (1 + eps) * hp or sum(scaled[e] for e in zip(path, path[1:])) > bound:
                    raise AssertionError("scaled-length sandwich violated")
            rounded = _round_paths(g, approx, mu)
            if rounded.value == 0:
                break
            lam = min(Fraction(1), (target - value) / rounded.value)
            part = rounded if lam == 1 else rounded.scaled(lam)
            flow = flow.plus(part)
            value += part.value
            record["value"] += part.value
            record["totlen"] += sum((v * sum(g.length[e] for e in zip(pth, pth[1:]))
                                     for _, pth, v in part.items), Fraction(0))
            for pair, x in rounded.demand().items():
                rest[pair] -= x
                if rest[pair] < 0:
                    raise AssertionError("rounded flow exceeded the residual demand")
            if value >= target:
                break
        if record["calls"]:
            buckets.append(record)
        if value >= target:
            break
    if value != target:
        raise PremiseViolated(f"reached value {value} < {target}; no feasible flow of value tau",
                              value=value)
    return LowStepResult(flow, buckets, calls, mu)


def _route_scaled(g, scaled, live, rest, mu, bound, mcfg) -> PathFlow:
    """One approximate maxflow on G' with artificial terminals, scaled back by 1/mu."""
    edges, length, cap = list(g.edges), dict(scaled), {e: mu * g.capacity[e] for e in g.edges}
    pairs = []
    for i, (u, v) in enumerate(live):
        s, t = ("__src__", i), ("__snk__", i)
        for e in ((s, u), (v, t)):
            edges.append(e)
            length[e] = 1
            cap[e] = int(rest[(u, v)] * mu)
        pairs.append(({s}, {t}))
    gg = Graph(EDGE, tuple(g.vertices) + tuple(x for i in range(len(live))
                                                 for x in (("__src__", i), ("__snk__", i))),
               tuple(edges), length, cap)
    res = lc_mc_maxflow(gg, pairs, bound + 2, Fraction(1, 3), mcfg)
    items = []
    for com, path, val in res.flow.items:
        items.append((live[com], path[1:-1], val / mu))
    return PathFlow.from_items(items)


def _round_paths(g: Graph, f: PathFlow, mu: int) -> PathFlow:
    """Cost-aware rounding to 1/mu, then a fresh path decomposition."""
    ef = to_edge_representation(f, g)
    rounded = round_flow(ef, mu, g, costs=True)
    items = []
    for com, arcs in rounded.flows.items():
        for path, val in decompose_st_flow(arcs, com[0], com[1]):
            items.append((com, path, val))
    return PathFlow.from_items(items)


def lowstep_undirected(g: Graph, d: Mapping, t: int, tau, eps, **kw) -> LowStepResult:
    """Vertex-weighted version: split vertices, route, project back, rescale to tau.

    With tau = 1 the whole flow is scaled by tau / value; with tau = |D|
    each commodity is scaled up to its full demand.
    """
    if g.mode != VERTEX:
        raise InvalidInstance("lowstep_undirected needs a vertex-weighted graph")
    d = Demand(d)
    tau = as_fraction(tau)
    if tau not in (1, d.size):
        raise InvalidInstance("the undirected wrapper supports tau = 1 or tau = |D|")
    sg, smap = split_vertices(g, max((frac_ceil(x) for x in d.values()), default=1))
    res = lowstep_directed(sg, smap.demand_forward(d), 2 * t + 1, tau, eps, **kw)
    back = smap.flow_back(res.flow, commodity=lambda c: (c[0][0], c[1][0]))
    if tau == d.size:
        per = back.commodity_values()
        scale = {c: d[c] / v for c, v in per.items()}
        back = PathFlow.from_items((c, p, v * scale[c]) for c, p, v in back.items)
    else:
        back = back.scaled(tau / back.value)
    return LowStepResult(back, res.buckets, res.maxflow_calls, res.mu)


def identity_shortcut(g: Graph):
    """The trivial shortcut: no extra edges, paths map to themselves."""
    return g, (lambda f: f)


@dataclass
class MTLResult:
    flow: EdgeFlow
    paths: PathFlow
    lowstep: LowStepResult


def approx_mtl_flow(g: Graph, d: Mapping, tau, eps, *, eps_prime=None,
                    shortcut: Callable = identity_shortcut, **kw) -> MTLResult:
    """Flow partially routing D with value tau and near-minimum total length.

    A shortcut provider maps G to (G_sc, backward); with the identity
    shortcut the step bound is n - 1, which every simple path meets.
    """
    eps = as_fraction(eps)
    ep = as_fraction(eps_prime) if eps_prime is not None else eps / 100
    gsc, backward = shortcut(g)
    res = lowstep_undirected(gsc, d, max(gsc.n - 1, 1), tau, ep, **kw)
    paths = backward(res.flow)
    return MTLResult(to_edge_representation(paths, g), paths, res)
