"""Flow rounding by cycle cancellation, and flow-path decompositions."""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Mapping

from ._num import as_fraction, is_power_of_two, lcm_denominators
from .errors import LCFlowError
from .graph import EDGE, EdgeFlow, Graph, PathFlow

_SRC, _SNK = ("__super__", "source"), ("__super__", "sink")


def round_circulation(arcs, nums, den, cost=None, prefer=None):
    """Round a circulation given as numerators over a common denominator.

    `arcs[i] = (a, b)` carries `nums[i] / den`. Returns integers r[i] with
    floor <= r[i] <= ceil for every arc. With `cost`, each cancelled cycle
    is pushed in its cost-nonpositive direction, so the total cost never
    goes up. Otherwise the arc `prefer` (if fractional) ends at its ceiling.
    """
    nums = list(nums)
    inc = defaultdict(set)
    for i, (a, b) in enumerate(arcs):
        if nums[i] % den:
            inc[a].add(i)
            inc[b].add(i)

    def cancel(cyc, starts):
        fwd = [arcs[i][0] == x for i, x in zip(cyc, starts)]
        if cost is not None:
            c = sum(cost[i] if f else -cost[i] for i, f in zip(cyc, fwd))
            flip = c > 0
        elif prefer is not None and prefer in cyc:
            flip = not fwd[cyc.index(prefer)]
        else:
            flip = False
        if flip:
            fwd = [not f for f in fwd]
        delta = min(den - nums[i] % den if f else nums[i] % den for i, f in zip(cyc, fwd))
        for i, f in zip(cyc, fwd):
            nums[i] += delta if f else -delta
            if nums[i] % den == 0:
                a, b = arcs[i]
                for x in (a, b):
                    s = inc.get(x)
                    if s is not None:
                        s.discard(i)
                        if not s:
                            del inc[x]

    while inc:
        start = next(iter(inc))
        verts, path, pos = [start], [], {start: 0}
        cur = start
        while cur in inc:
            prev = path[-1] if path else None
            choices = [i for i in inc[cur] if i != prev]
            if not choices:
                raise LCFlowError("flow is not conserved", code="conservation-violation")
            i = min(choices)
            a, b = arcs[i]
            nxt = b if a == cur else a
            if nxt in pos:
                k = pos[nxt]
                cancel(path[k:] + [i], verts[k:])
                for x in verts[k + 1:]:
                    del pos[x]
                del verts[k + 1:]
                del path[k:]
                cur = nxt
            else:
                pos[nxt] = len(verts)
                verts.append(nxt)
                path.append(i)
                cur = nxt
    return [x // den for x in nums]


def round_flow(f: EdgeFlow, mu: int, g: Graph | None = None, costs=False,
               terminals: Mapping | None = None) -> EdgeFlow:
    """Round every commodity of an edge flow to a (1/mu)-fractional flow.

    Per arc the result lies between floor and ceil of mu*f (divided by mu),
    and so does each commodity's value. Without costs the value rounds up.
    With `costs` (True for the graph's edge lengths, or a mapping arc ->
    cost) the total cost does not increase. `terminals` maps a commodity to
    (sources, sinks); other vertices must then conserve flow.
    """
    if not is_power_of_two(mu):
        raise LCFlowError(f"mu={mu!r} is not a power of two", code="mu-not-power-of-two")
    if costs is True:
        if g is None or g.mode != EDGE:
            raise LCFlowError("cost rounding needs an edge-weighted graph", code="bad-arguments")
        cost_of = g.length
    elif costs:
        cost_of = costs
    else:
        cost_of = None
    out = {}
    for com, fl in f.flows.items():
        net = defaultdict(Fraction)
        for (a, b), x in fl.items():
            net[a] += as_fraction(x)
            net[b] -= as_fraction(x)
        if terminals is not None and com in terminals:
            srcs, snks = terminals[com]
            for v, x in net.items():
                if x != 0 and v not in srcs and v not in snks:
                    raise LCFlowError(f"vertex {v!r} does not conserve flow",
                                      code="conservation-violation")
        arcs, vals = [], []
        for e, x in fl.items():
            arcs.append(e)
            vals.append(as_fraction(x) * mu)
        first_super = len(arcs)
        total = Fraction(0)
        for v, x in net.items():
            if x > 0:
                arcs.append((_SRC, v))
                vals.append(x * mu)
                total += x
            elif x < 0:
                arcs.append((v, _SNK))
                vals.append(-x * mu)
        ret = len(arcs)
        arcs.append((_SNK, _SRC))
        vals.append(total * mu)
        den = lcm_denominators(vals)
        nums = [int(x * den) for x in vals]
        cost = None
        if cost_of is not None:
            cost = [cost_of.get(e, 0) if i < first_super else 0 for i, e in enumerate(arcs)]
        r = round_circulation(arcs, nums, den, cost=cost, prefer=None if cost else ret)
        out[com] = {e: Fraction(r[i], mu) for i, e in enumerate(arcs[:first_super]) if r[i]}
    return EdgeFlow(out)


def _topological_order(vertices, arcs):
    indeg = {v: 0 for v in vertices}
    succ = defaultdict(list)
    for a, b in arcs:
        indeg[b] += 1
        succ[a].append(b)
    order = [v for v in vertices if indeg[v] == 0]
    i = 0
    while i < len(order):
        for b in succ[order[i]]:
            indeg[b] -= 1
            if indeg[b] == 0:
                order.append(b)
        i += 1
    if len(order) != len(indeg):
        raise LCFlowError("flow support has a directed cycle", code="cyclic-support")
    return order


def decompose_acyclic(fl: Mapping) -> list:
    """Paths (vertex tuples, value) of a flow whose support is acyclic.

    Each path starts at a vertex without incoming flow and follows positive
    arcs until it reaches a vertex without outgoing flow. Every path zeroes
    at least one arc, so there are at most as many paths as arcs.
    """
    rem = {e: as_fraction(x) for e, x in fl.items() if x != 0}
    if any(x < 0 for x in rem.values()):
        raise LCFlowError("negative arc flow", code="negative-flow")
    verts = []
    for a, b in rem:
        for v in (a, b):
            if v not in verts:
                verts.append(v)
    order = _topological_order(verts, rem)
    rank = {v: i for i, v in enumerate(order)}
    succ = defaultdict(list)
    for (a, b) in rem:
        succ[a].append(b)
    for a in succ:
        succ[a].sort(key=rank.__getitem__)
    indeg = defaultdict(int)
    for (_, b) in rem:
        indeg[b] += 1
    paths = []
    ptr = 0
    while rem:
        while ptr < len(order) and (indeg[order[ptr]] > 0 or not any((order[ptr], b) in rem for b in succ[order[ptr]])):
            ptr += 1
        v = order[ptr]
        path = [v]
        while True:
            nxt = next((b for b in succ[v] if (v, b) in rem), None)
            if nxt is None:
                break
            path.append(nxt)
            v = nxt
        arcs = list(zip(path, path[1:]))
        delta = min(rem[e] for e in arcs)
        for e in arcs:
            rem[e] -= delta
            if rem[e] == 0:
                del rem[e]
                indeg[e[1]] -= 1
        paths.append((tuple(path), delta))
    return paths


def decompose_dag_flow(f: EdgeFlow, g: Graph | None = None, h: int | None = None) -> PathFlow:
    """Path decomposition of an acyclic edge flow, at most m paths per commodity."""
    items = []
    for com, fl in f.flows.items():
        for path, val in decompose_acyclic(fl):
            if g is not None:
                g.path_elements(path)
            if h is not None and len(path) - 1 > h:
                raise LCFlowError(f"path with {len(path) - 1} edges exceeds h={h}",
                                  code="too-many-edges")
            items.append((com, path, val))
    return PathFlow.from_items(items)


def decompose_st_flow(fl: Mapping, s, t) -> list:
    """Simple s-t paths of a single-commodity flow; circulations are dropped."""
    rem = {e: as_fraction(x) for e, x in fl.items() if x > 0}
    succ = defaultdict(list)
    for (a, b) in rem:
        succ[a].append(b)
    paths = []
    while True:
        path, pos = [s], {s: 0}
        v = s
        while v != t:
            nxt = next((b for b in succ[v] if (v, b) in rem), None)
            if nxt is None:
                break
            if nxt in pos:
                k = pos[nxt]
                cyc = list(zip(path[k:], path[k + 1:] + [nxt]))
                delta = min(rem[e] for e in cyc)
                for e in cyc:
                    rem[e] -= delta
                    if rem[e] == 0:
                        del rem[e]
                for x in path[k + 1:]:
                    del pos[x]
                del path[k + 1:]
                v = nxt
                continue
            pos[nxt] = len(path)
            path.append(nxt)
            v = nxt
        if v != t:
            break
        arcs = list(zip(path, path[1:]))
        delta = min(rem[e] for e in arcs)
        for e in arcs:
            rem[e] -= delta
            if rem[e] == 0:
                del rem[e]
        paths.append((tuple(path), delta))
    return paths
