"""Exact reference solvers for small instances.

Everything here enumerates simple paths and solves the resulting path LP
with the exact simplex in `lp`. The enumeration is exponential, so it is
gated on the number of vertices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import networkx as nx

from ._num import INF, as_fraction
from .errors import InvalidInstance, OracleBoundExceeded, PremiseViolated
from .graph import EDGE, VERTEX, Demand, Graph, PathFlow
from .lp import linprog

DEFAULT_GATE = 14
PATH_LIMIT = 50000


def _gate(g: Graph, gate):
    if gate is not None and g.n > gate:
        raise OracleBoundExceeded(f"exact oracle limited to n <= {gate}, got n = {g.n}")


def enumerate_paths(g: Graph, sources, targets, max_len=None, max_steps=None,
                    limit: int = PATH_LIMIT) -> list:
    """All simple paths from a source to a target within the length/step bounds."""
    targets = set(targets)
    out = []
    vertex_mode = g.mode == VERTEX

    def dfs(path, onpath, ln):
        v = path[-1]
        if v in targets and len(path) > 1:
            out.append(tuple(path))
            if len(out) > limit:
                raise OracleBoundExceeded(f"more than {limit} paths")
        if max_steps is not None and len(path) - 1 >= max_steps:
            return
        for x in g.successors(v):
            if x in onpath:
                continue
            step = g.length[x] if vertex_mode else g.length[(v, x)]
            if max_len is not None and ln + step > max_len:
                continue
            path.append(x)
            onpath.add(x)
            dfs(path, onpath, ln + step)
            onpath.discard(x)
            path.pop()

    for s in dict.fromkeys(sources):
        start = g.length[s] if vertex_mode else 0
        if max_len is not None and start > max_len:
            continue
        dfs([s], {s}, start)
    return out


def _elements(g: Graph, path):
    return g.path_elements(path)


@dataclass
class ExactFlow:
    value: Fraction
    flow: PathFlow


def exact_lc_maxflow(g: Graph, pairs, h=None, gate=DEFAULT_GATE) -> ExactFlow:
    """Exact h-length multi-commodity maxflow between source/sink sets."""
    _gate(g, gate)
    cols = []
    for i, (S, T) in enumerate(pairs):
        for p in enumerate_paths(g, S, T, max_len=h):
            cols.append((i, p))
    if not cols:
        return ExactFlow(Fraction(0), PathFlow())
    rows = {}
    for j, (_, p) in enumerate(cols):
        for x in _elements(g, p):
            rows.setdefault(x, {})[j] = rows.setdefault(x, {}).get(j, 0) + 1
    le = [(r, g.capacity[x]) for x, r in rows.items()]
    res = linprog([1] * len(cols), le=le, nvars=len(cols))
    flow = PathFlow.from_items((i, p, res.x[j]) for j, (i, p) in enumerate(cols))
    return ExactFlow(res.value, flow)


def classical_maxflow(g: Graph, s, t) -> int:
    """Unconstrained single-commodity maxflow by augmenting paths."""
    d = nx.DiGraph()
    d.add_nodes_from(range(g.n))
    idx = {v: i for i, v in enumerate(g.vertices)}
    if g.mode == EDGE:
        for e in g.edges:
            d.add_edge(idx[e[0]], idx[e[1]], capacity=g.capacity[e])
        src, snk = idx[s], idx[t]
    else:
        for v in g.vertices:
            d.add_edge(("i", idx[v]), ("o", idx[v]), capacity=g.capacity[v])
        for a, b in g.edges:
            d.add_edge(("o", idx[a]), ("i", idx[b]))
            d.add_edge(("o", idx[b]), ("i", idx[a]))
        src, snk = ("i", idx[s]), ("o", idx[t])
    return nx.maximum_flow_value(d, src, snk, flow_func=nx.algorithms.flow.edmonds_karp)


def min_normalized_path_weight(g: Graph, w: Mapping, pairs, h, gate=DEFAULT_GATE):
    """Minimum w-weight over all h-length S_i-T_i paths (inf if there are none)."""
    _gate(g, gate)
    best = INF
    for S, T in pairs:
        for p in enumerate_paths(g, S, T, max_len=h):
            wt = sum((as_fraction(w[x]) for x in _elements(g, p)), Fraction(0))
            best = min(best, wt)
    return best


def exact_min_totlen(g: Graph, d: Mapping, tau, t_step: int, gate=DEFAULT_GATE) -> ExactFlow:
    """Minimum total length of a feasible t-step flow partially routing D with value tau."""
    _gate(g, gate)
    tau = as_fraction(tau)
    cols = []
    for (u, v), dem in Demand(d).items():
        for p in enumerate_paths(g, [u], [v], max_steps=t_step):
            cols.append(((u, v), p))
    rows, pair_rows = {}, {}
    for j, (pair, p) in enumerate(cols):
        for x in _elements(g, p):
            rows.setdefault(x, {})[j] = rows.setdefault(x, {}).get(j, 0) + 1
        pair_rows.setdefault(pair, {})[j] = 1
    le = [(r, g.capacity[x]) for x, r in rows.items()]
    le += [(r, d[pair]) for pair, r in pair_rows.items() if d[pair] != INF]
    eq = [({j: 1 for j in range(len(cols))}, tau)]
    cost = [-g.path_length(p) for _, p in cols]
    res = linprog(cost, le=le, eq=eq, nvars=len(cols))
    if res.status != "optimal":
        raise PremiseViolated("no feasible t-step flow of the requested value")
    flow = PathFlow.from_items((pair, p, res.x[j]) for j, (pair, p) in enumerate(cols))
    return ExactFlow(-res.value, flow)


def exact_mincost_lambda(g: Graph, d: Mapping, costs: Mapping, budget=INF,
                         mode: str = "concurrent", gate=DEFAULT_GATE) -> ExactFlow:
    """Exact optimum of the budgeted concurrent or non-concurrent flow problem.

    Concurrent: the largest lam such that lam*D is routable within capacities
    and budget. Non-concurrent: the largest total flow between the pairs of
    `d` (their values are ignored). Loads and costs count every vertex
    (or edge) a path uses.
    """
    _gate(g, gate)
    if mode not in ("concurrent", "non-concurrent"):
        raise InvalidInstance(f"unknown mode {mode!r}")
    pairs = [k for k, v in Demand(d).items()]
    cols = []
    for pair in pairs:
        for p in enumerate_paths(g, [pair[0]], [pair[1]]):
            cols.append((pair, p))
    n = len(cols)
    rows = {}
    cost_row = {}
    for j, (_, p) in enumerate(cols):
        c = Fraction(0)
        for x in _elements(g, p):
            rows.setdefault(x, {})[j] = rows.setdefault(x, {}).get(j, 0) + 1
            c += as_fraction(costs.get(x, 0))
        if c:
            cost_row[j] = c
    le = [(r, g.capacity[x]) for x, r in rows.items()]
    if budget != INF:
        le.append((cost_row, as_fraction(budget)))
    if mode == "non-concurrent":
        res = linprog([1] * n, le=le, nvars=n)
        val = res.value if n else Fraction(0)
        flow = PathFlow.from_items((pair, p, res.x[j]) for j, (pair, p) in enumerate(cols)) if n else PathFlow()
        return ExactFlow(val, flow)
    lam = n
    eq = []
    for pair in pairs:
        row = {j: 1 for j, (q, _) in enumerate(cols) if q == pair}
        row[lam] = -as_fraction(d[pair])
        eq.append((row, 0))
    res = linprog({lam: 1}, le=le, eq=eq, nvars=n + 1)
    if res.status == "unbounded":
        return ExactFlow(INF, PathFlow())
    flow = PathFlow.from_items((pair, p, res.x[j]) for j, (pair, p) in enumerate(cols))
    return ExactFlow(res.value, flow)
