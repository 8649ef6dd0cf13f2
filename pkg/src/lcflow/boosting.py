"""Flow boosting by multiplicative weights, and budgeted mincost flows.

`boost` turns an oracle that returns cheap but possibly congested flows
into a feasible flow with a scaling factor. The oracle sees integral
vertex lengths and must return a flow from a fixed convex family whose
total length is within a factor s of every capacity-respecting member of
that family, with congestion at most kappa.

`solve_mincost` instantiates the family for the concurrent problem
(flows routing all of D) and the non-concurrent problem (flows of value
one between allowed pairs) and uses `approx_mtl_flow` as the oracle.
"""
from __future__ import annotations

import heapq
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from ._num import INF, as_fraction, dyadic_up, frac_ceil
from .errors import InvalidInstance, OracleContractViolation
from .graph import VERTEX, Demand, EdgeFlow, Graph, PathFlow, to_edge_representation

log = logging.getLogger(__name__)

CONCURRENT = "concurrent"
NON_CONCURRENT = "non-concurrent"
# the low-step precision used inside the mtl oracle when none is given
DEFAULT_LOWSTEP_EPS = Fraction(1, 10)


@dataclass
class BoostRun:
    """One scale guess: capacities and budget multiplied by 2**exponent."""

    exponent: int
    lam: Fraction
    iterations: int
    capped: bool
    coefficients: list
    flows: list
    flow: EdgeFlow
    through: dict
    potentials: list
    max_length: int
    upper: Fraction | None = None
    certified: bool = False


@dataclass
class BoostResult:
    flow: EdgeFlow
    lam: Fraction
    exponent: int | None
    oracle_calls: int
    runs: list = field(default_factory=list)

    @property
    def best(self) -> BoostRun | None:
        return next((r for r in self.runs if r.exponent == self.exponent), None)


def _as_edge_flow(f) -> EdgeFlow:
    return to_edge_representation(f) if isinstance(f, PathFlow) else f


def _combine(flows, coefficients) -> EdgeFlow:
    total = sum(coefficients, Fraction(0))
    acc = defaultdict(lambda: defaultdict(Fraction))
    if total == 0:
        return EdgeFlow({})
    for f, z in zip(flows, coefficients):
        for com, arcs in f.flows.items():
            for e, x in arcs.items():
                acc[com][e] += x * z / total
    return EdgeFlow({c: dict(a) for c, a in acc.items()})


def feasible_scaling(f: EdgeFlow, g: Graph, capacity: Mapping, costs: Mapping, budget) -> Fraction:
    """Largest lam with lam*f within capacities and within the budget."""
    loads = f.loads(g)
    lam = INF
    for v, x in loads.items():
        if x > 0:
            lam = min(lam, Fraction(capacity[v]) / x)
    if budget != INF:
        cost = sum((x * costs.get(v, 0) for v, x in loads.items()), Fraction(0))
        if cost > 0:
            lam = min(lam, as_fraction(budget) / cost)
    return Fraction(0) if lam == INF else lam


def _iteration_cap(eps, kappa, delta) -> int:
    logd = math.log(1 / delta) if delta > 1e-300 else float(delta.denominator.bit_length()) * math.log(2)
    return math.ceil(logd / math.log1p(eps / kappa) + 2 * kappa * logd / math.log1p(eps)) + 1


def _run_guess(g, oracle, eps, kappa, delta, capacity, costs, budget, j, big, bits, max_iterations,
               calls, alpha_bound):
    scale = Fraction(2) ** j
    cap = {v: capacity[v] * scale for v in g.vertices}
    bj = budget * scale if budget != INF else INF
    kj = kappa * max(Fraction(1), 1 / scale)
    y = {v: delta / cap[v] for v in g.vertices}
    phi = delta / bj if bj != INF else Fraction(0)
    factor = frac_ceil(Fraction(big) / (delta * eps))
    limit = max_iterations or _iteration_cap(float(eps), float(kj), delta)

    def potential():
        s = sum((cap[v] * y[v] for v in g.vertices), Fraction(0))
        return s + (bj * phi if bj != INF else 0)

    pots = [potential()]
    coefs, flows = [], []
    through = defaultdict(Fraction)
    max_len = 0
    it = 0
    upper = None
    zsum = Fraction(0)
    zcost = Fraction(0)
    certified = False
    while pots[-1] < 1 and it < limit:
        lengths = {v: max(1, frac_ceil((y[v] + phi * costs.get(v, 0)) * factor)) for v in g.vertices}
        max_len = max(max_len, max(lengths.values()))
        f = oracle(lengths)
        calls[0] += 1
        loads = f.loads(g)
        for v, x in loads.items():
            if x > kappa * capacity[v]:
                raise OracleContractViolation(
                    f"oracle congestion {x / capacity[v]} at {v!r} exceeds kappa={kappa}",
                    vertex=v, load=x)
        cost = sum((x * costs.get(v, 0) for v, x in loads.items()), Fraction(0))
        z = Fraction(1) if bj == INF or cost <= bj else bj / cost
        if alpha_bound is not None:
            # weak duality: D(y, phi) / alpha(y, phi) caps the optimum of this guess
            a = alpha_bound({v: y[v] + phi * costs.get(v, 0) for v in g.vertices})
            if a > 0:
                upper = pots[-1] / a if upper is None else min(upper, pots[-1] / a)
        for v, x in loads.items():
            if x:
                y[v] = dyadic_up(y[v] * (1 + eps / kj * z * x / cap[v]), bits)
        if bj != INF and cost:
            phi = dyadic_up(phi * (1 + eps / kj * z * cost / bj), bits)
        it += 1
        pots.append(potential())
        if pots[-1] >= 1:
            break
        coefs.append(z)
        flows.append(_as_edge_flow(f))
        zsum += z
        zcost += z * cost
        for v, x in loads.items():
            through[v] += z * x
        if upper is not None:
            lo = min(cap[v] * zsum / x for v, x in through.items() if x)
            if bj != INF and zcost:
                lo = min(lo, bj * zsum / zcost)
            if lo >= (1 - eps) * upper:
                certified = True
                break
    capped = pots[-1] < 1 and not certified
    fbar = _combine(flows, coefs)
    lam = feasible_scaling(fbar, g, cap, costs, bj) / scale if flows else Fraction(0)
    up = upper / scale if upper is not None else None
    return BoostRun(j, lam, it, capped, coefs, flows, fbar, dict(through), pots, max_len, up, certified)


def _bracket(g, oracle, eps, delta, capacity, costs, budget, big, alpha_bound, calls):
    """Bounds lo <= lam* <= hi from one oracle call and the dual at the initial lengths."""
    y = {v: delta / capacity[v] for v in g.vertices}
    phi = delta / budget if budget != INF else Fraction(0)
    factor = frac_ceil(Fraction(big) / (delta * eps))
    lengths = {v: max(1, frac_ceil((y[v] + phi * costs.get(v, 0)) * factor)) for v in g.vertices}
    f = oracle(lengths)
    calls[0] += 1
    lo = feasible_scaling(_as_edge_flow(f), g, capacity, costs, budget)
    a = alpha_bound({v: y[v] + phi * costs.get(v, 0) for v in g.vertices})
    if a <= 0:
        return lo, None
    pot = sum((capacity[v] * y[v] for v in g.vertices), Fraction(0))
    if budget != INF:
        pot += budget * phi
    return lo, pot / a


def boost(g: Graph, oracle: Callable, eps, *, capacity: Mapping | None = None,
          costs: Mapping | None = None, budget=INF, kappa=1, exponents=None,
          bits: int = 60, max_iterations: int | None = None,
          alpha_bound: Callable | None = None) -> BoostResult:
    """Boost an (s, kappa)-slack flow oracle into a feasible scaled flow.

    `oracle(lengths)` receives integral vertex lengths and returns a flow
    (path or edge form) on `g`. Returns the convex combination F of the
    oracle flows of the best scale guess together with lam such that
    lam*F respects `capacity` (default: the graph's) and costs at most
    `budget` under the vertex `costs` (default: zero).

    Without `alpha_bound` every scale guess runs until the potential
    reaches 1. `alpha_bound(lengths)` may give a lower bound on the
    lightest member of the flow family under rational vertex lengths;
    each guess then also stops as soon as its flow is within a factor
    (1 - eps) of the resulting dual bound, and the remaining guesses are
    skipped.
    """
    if g.mode != VERTEX:
        raise InvalidInstance("boosting works on vertex-weighted graphs")
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise InvalidInstance("eps must lie in (0, 1)")
    kappa = as_fraction(kappa)
    if kappa < 1:
        raise InvalidInstance("kappa must be at least 1")
    capacity = dict(capacity or g.capacity)
    costs = dict(costs or {})
    if any(as_fraction(c) < 0 for c in costs.values()):
        raise InvalidInstance("costs must be nonnegative")
    if budget != INF:
        budget = as_fraction(budget)
        if budget <= 0:
            raise InvalidInstance("budget must be positive")
    big = max([g.value_bound(), *(frac_ceil(as_fraction(c)) for c in capacity.values()),
               *(frac_ceil(as_fraction(c)) for c in costs.values())]
              + ([frac_ceil(budget)] if budget != INF else []))
    zeta = frac_ceil(1 / eps)
    delta = Fraction(1, max(g.n, 2) ** zeta)
    if exponents is None:
        top = max(1, math.ceil(math.log2(big)))
        exponents = range(-top, top + 1)
    calls = [0]
    order = list(exponents)
    if alpha_bound is not None and order:
        lo, hi = _bracket(g, oracle, eps, delta, capacity, costs, budget, big, alpha_bound, calls)
        if hi is not None and lo > 0:
            inside = [j for j in order if Fraction(2) ** j * hi >= 1 and Fraction(2) ** j * lo <= 2]
            order = inside + [j for j in order if j not in inside]
    runs = []
    for j in order:
        runs.append(_run_guess(g, oracle, eps, kappa, delta, capacity, costs, budget, j, big, bits,
                               max_iterations, calls, alpha_bound))
        if runs[-1].certified:
            break
    best = None
    for r in sorted(runs, key=lambda r: r.exponent):
        if best is None or r.lam > best.lam:
            best = r
    if best is None:
        return BoostResult(EdgeFlow({}), Fraction(0), None, 0, runs)
    return BoostResult(best.flow, best.lam, best.exponent, calls[0], runs)


# mincost drivers ------------------------------------------------------------------


@dataclass(frozen=True)
class MincostProblem:
    """Budgeted concurrent or non-concurrent flow on a vertex-weighted graph.

    For the concurrent mode `demand` is the integral demand D. For the
    non-concurrent mode only its support matters: the allowed pairs S.
    Vertex costs default to the vertex lengths.
    """

    graph: Graph
    demand: Mapping
    mode: str = CONCURRENT
    budget: object = INF
    costs: Mapping | None = None

    def __post_init__(self):
        if self.graph.mode != VERTEX:
            raise InvalidInstance("mincost problems live on vertex-weighted graphs")
        if self.mode not in (CONCURRENT, NON_CONCURRENT):
            raise InvalidInstance(f"unknown mode {self.mode!r}")
        d = Demand(self.demand)
        object.__setattr__(self, "demand", d)
        if not d:
            raise InvalidInstance("empty demand")
        for (u, v), x in d.items():
            if u not in self.graph._out or v not in self.graph._out:
                raise InvalidInstance(f"demand pair {(u, v)!r} uses an unknown vertex")
            if self.mode == CONCURRENT and (x == INF or as_fraction(x).denominator != 1):
                raise InvalidInstance("concurrent demands must be integral")
        costs = dict(self.costs) if self.costs is not None else dict(self.graph.length)
        if any(as_fraction(c) < 0 for c in costs.values()):
            raise InvalidInstance("costs must be nonnegative")
        object.__setattr__(self, "costs", costs)
        if self.budget != INF:
            b = as_fraction(self.budget)
            if b <= 0:
                raise InvalidInstance("budget must be positive")
            object.__setattr__(self, "budget", b)

    @property
    def tau(self) -> Fraction:
        return self.demand.size if self.mode == CONCURRENT else Fraction(1)

    def routed_demand(self) -> Demand:
        if self.mode == CONCURRENT:
            return self.demand
        return Demand({pair: 1 for pair in self.demand})


@dataclass
class MincostResult:
    flow: EdgeFlow
    lam: Fraction
    cost: Fraction
    boost: BoostResult | None

    @property
    def value(self) -> Fraction:
        return self.flow.value


def _connected(g: Graph, s, t) -> bool:
    seen, stack = {s}, [s]
    while stack:
        v = stack.pop()
        if v == t:
            return True
        for x in g.successors(v):
            if x not in seen:
                seen.add(x)
                stack.append(x)
    return False


def _relength(g: Graph, lengths, capacity) -> Graph:
    return Graph(VERTEX, g.vertices, g.edges, dict(lengths), dict(capacity))


def mtl_oracle(g: Graph, d: Mapping, tau, eps, eps_prime=None, capacity=None) -> Callable:
    """Oracle backed by `approx_mtl_flow` on the graph with the given lengths."""
    from .lowstep import approx_mtl_flow
    cap = capacity or g.capacity

    def call(lengths):
        return approx_mtl_flow(_relength(g, lengths, cap), d, tau, eps, eps_prime=eps_prime).paths
    return call


def exact_oracle(g: Graph, d: Mapping, tau, capacity=None) -> Callable:
    """Oracle returning an exact minimum-total-length flow (s = 1)."""
    from .oracle import exact_min_totlen
    cap = capacity or g.capacity

    def call(lengths):
        return exact_min_totlen(_relength(g, lengths, cap), d, tau, max(g.n - 1, 1)).flow
    return call


def vertex_distance(g: Graph, lengths: Mapping, s, t):
    """Least total vertex length of an s-t path, both endpoints included."""
    dist = {s: lengths[s]}
    heap = [(lengths[s], 0, s)]
    k = 1
    while heap:
        d, _, v = heapq.heappop(heap)
        if v == t:
            return d
        if d > dist[v]:
            continue
        for x in g.successors(v):
            nd = d + lengths[x]
            if nd < dist.get(x, INF):
                dist[x] = nd
                heapq.heappush(heap, (nd, k, x))
                k += 1
    return INF


def relaxed_alpha(g: Graph, d: Mapping, mode: str) -> Callable:
    """Lightest family member with capacities ignored: a lower bound on alpha.

    Concurrent: route every pair on its shortest path. Non-concurrent:
    route one unit on the closest allowed pair.
    """
    def bound(lengths):
        dists = [(x, vertex_distance(g, lengths, u, v)) for (u, v), x in d.items()]
        if mode == CONCURRENT:
            return sum((x * dv for x, dv in dists), Fraction(0))
        return min(dv for _, dv in dists)
    return bound


def solve_mincost(problem: MincostProblem, eps, *, oracle="mtl", oracle_eps=None,
                  lowstep_eps=None, kappa=1, exponents=None, certify: bool = True,
                  max_iterations: int | None = None) -> MincostResult:
    """(1+eps)-approximate budgeted concurrent / non-concurrent flow.

    The flow family is all flows partially routing D with value tau, on
    the graph with capacities multiplied by tau (so every simple-path
    member has congestion at most 1). The boosted scaling is divided by
    tau at the end. `oracle` is "mtl" (the default pipeline), "exact"
    (LP, for testing) or a factory `(graph, demand, tau, capacity) ->
    callable`. With `certify` the boosting loop stops early once the
    shortest-path dual bound proves lam >= (1 - eps) lam*.
    """
    eps = as_fraction(eps)
    g = problem.graph
    d = problem.routed_demand()
    tau = problem.tau
    live = {p: x for p, x in d.items() if _connected(g, *p)}
    if problem.mode == CONCURRENT and len(live) < len(d) or not live:
        return MincostResult(EdgeFlow({}), Fraction(0), Fraction(0), None)
    d = Demand(live)
    cap = {v: int(g.capacity[v] * tau) for v in g.vertices}
    budget = problem.budget * tau if problem.budget != INF else INF
    oeps = as_fraction(oracle_eps) if oracle_eps is not None else eps / 100
    if oracle == "mtl":
        lse = as_fraction(lowstep_eps) if lowstep_eps is not None else DEFAULT_LOWSTEP_EPS
        call = mtl_oracle(g, d, tau, oeps, lse, cap)
    elif oracle == "exact":
        call = exact_oracle(g, d, tau, cap)
    elif callable(oracle):
        call = oracle(g, d, tau, cap)
    else:
        raise InvalidInstance(f"unknown oracle {oracle!r}")
    res = boost(g, call, eps, capacity=cap, costs=problem.costs, budget=budget, kappa=kappa,
                exponents=exponents, max_iterations=max_iterations,
                alpha_bound=relaxed_alpha(g, d, problem.mode) if certify else None)
    lam = res.lam / tau
    if lam == 0:
        return MincostResult(EdgeFlow({}), Fraction(0), Fraction(0), res)
    flow = EdgeFlow({c: {e: x * lam for e, x in arcs.items()} for c, arcs in res.flow.flows.items()})
    loads = flow.loads(g)
    cost = sum((x * problem.costs.get(v, 0) for v, x in loads.items()), Fraction(0))
    if any(x > g.capacity[v] for v, x in loads.items()):
        raise AssertionError("boosted flow exceeds a capacity")
    if problem.budget != INF and cost > problem.budget:
        raise AssertionError("boosted flow exceeds the budget")
    return MincostResult(flow, lam, cost, res)


def concurrent_flow(g: Graph, d: Mapping, eps, budget=INF, costs=None, **kw) -> MincostResult:
    return solve_mincost(MincostProblem(g, d, CONCURRENT, budget, costs), eps, **kw)


def nonconcurrent_flow(g: Graph, pairs, eps, budget=INF, costs=None, **kw) -> MincostResult:
    d = {p: 1 for p in pairs} if not isinstance(pairs, Mapping) else pairs
    return solve_mincost(MincostProblem(g, d, NON_CONCURRENT, budget, costs), eps, **kw)
