"""Moving cuts, length separation and the union-of-cuts witness machinery.

A moving cut of length h assigns every capacitated element a value that is
a multiple of 1/h; applying it raises the element's length by h times that
value. Distances in vertex mode count the lengths of both endpoints.

The second half of the module builds, from a sequence of cuts and their
witnessing demands, the demand matching graph, a greedy forest cover, the
tree matching demands and finally the matching-dispersed demand, and checks
that it certifies the sparsity of the summed cut.
"""
from __future__ import annotations

import heapq
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from typing import Mapping, Sequence

import networkx as nx

from ._num import INF, as_fraction, lcm_denominators
from .errors import InvalidInstance, OracleBoundExceeded
from .graph import VERTEX, Demand, Graph

SPARSITY_GATE = 16


@dataclass(frozen=True)
class MovingCut:
    """Values in multiples of 1/h on vertices (vertex mode) or arcs (edge mode)."""

    h: int
    values: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.h, int) or self.h < 1:
            raise InvalidInstance("cut length h must be a positive integer")
        vals = {}
        for x, v in self.values.items():
            v = as_fraction(v)
            if v < 0:
                raise InvalidInstance(f"negative cut value on {x!r}")
            if (v * self.h).denominator != 1:
                raise InvalidInstance(f"cut value {v} on {x!r} is not a multiple of 1/{self.h}")
            if v:
                vals[x] = v
        object.__setattr__(self, "values", vals)

    def __getitem__(self, x) -> Fraction:
        return self.values.get(x, Fraction(0))

    def increase(self, x) -> int:
        """Length increase h * C(x); always an integer."""
        return (self[x] * self.h).numerator

    def size(self, g: Graph) -> Fraction:
        return sum((g.capacity[x] * v for x, v in self.values.items()), Fraction(0))

    def scaled(self, c) -> "MovingCut":
        return MovingCut(self.h, {x: v * c for x, v in self.values.items()})

    def with_length(self, h: int) -> "MovingCut":
        """Same length increases, re-expressed as an h-length cut."""
        return MovingCut(h, {x: Fraction(self.increase(x), h) for x in self.values})

    @property
    def bounded(self) -> bool:
        return all(v <= 1 for v in self.values.values())


def cut_sum(cuts: Sequence[MovingCut], h: int) -> MovingCut:
    """h-length cut whose length increase is the sum of the cuts' increases."""
    inc = defaultdict(int)
    for c in cuts:
        for x in c.values:
            inc[x] += c.increase(x)
    return MovingCut(h, {x: Fraction(v, h) for x, v in inc.items()})


def apply_cut(g: Graph, c: MovingCut) -> Graph:
    """G - C: every element's length grows by h_C * C(x)."""
    elems = set(g.elements())
    for x in c.values:
        if x not in elems:
            raise InvalidInstance(f"cut value on {x!r}, which is not a capacitated element")
    length = {x: g.length[x] + c.increase(x) for x in g.elements()}
    return Graph(g.mode, g.vertices, g.edges, length, dict(g.capacity))


# distances ----------------------------------------------------------------------


def distances_from(g: Graph, s) -> dict:
    """Shortest-path lengths from s; in vertex mode both endpoints count."""
    vertex_mode = g.mode == VERTEX
    start = g.length[s] if vertex_mode else 0
    dist = {s: start}
    tie = count()
    heap = [(start, next(tie), s)]
    while heap:
        d, _, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for x in g.successors(v):
            nd = d + (g.length[x] if vertex_mode else g.length[(v, x)])
            if nd < dist.get(x, INF):
                dist[x] = nd
                heapq.heappush(heap, (nd, next(tie), x))
    return dist


def distance(g: Graph, u, v):
    return distances_from(g, u).get(v, INF)


def all_distances(g: Graph) -> dict:
    return {u: distances_from(g, u) for u in g.vertices}


def is_h_length(g: Graph, d: Mapping, h) -> bool:
    return all(distance(g, u, v) <= h for (u, v) in Demand(d))


def separated_pairs(g: Graph, c: MovingCut, d: Mapping, h) -> list:
    gc = apply_cut(g, c)
    return [(u, v) for (u, v) in Demand(d) if distance(gc, u, v) > h]


def separated_demand(g: Graph, c: MovingCut, d: Mapping, h) -> Fraction:
    """sep_h(C, D): total demand between pairs at distance > h in G - C."""
    d = Demand(d)
    if any(x == INF for x in d.values()):
        raise InvalidInstance("separated demand needs a finite demand")
    return sum((d[p] for p in separated_pairs(g, c, d, h)), Fraction(0))


def max_separated_demand(g: Graph, c: MovingCut, a: Mapping, h, s) -> tuple:
    """Largest A-respecting h-length demand that C hs-separates.

    Only pairs within distance h in G and beyond hs in G - C can help, so
    the optimum is a transportation problem: each vertex sends and receives
    at most A(v). Returns (value, demand).
    """
    dg, dc = all_distances(g), all_distances(apply_cut(g, c))
    pairs = [(u, v) for u in g.vertices for v in g.vertices
             if u != v and dg[u].get(v, INF) <= h and dc[u].get(v, INF) > h * s
             and a.get(u, 0) > 0 and a.get(v, 0) > 0]
    if not pairs:
        return Fraction(0), Demand()
    scale = lcm_denominators(a.values())
    net = nx.DiGraph()
    for v in g.vertices:
        cap = int(as_fraction(a.get(v, 0)) * scale)
        if cap:
            net.add_edge("src", ("o", v), capacity=cap)
            net.add_edge(("i", v), "snk", capacity=cap)
    for u, v in pairs:
        net.add_edge(("o", u), ("i", v))
    value, flow = nx.maximum_flow(net, "src", "snk")
    dem = Demand({(u, v): Fraction(flow[("o", u)][("i", v)], scale) for u, v in pairs})
    return Fraction(value, scale), dem


def cut_sparsity(g: Graph, c: MovingCut, a: Mapping, h, s, gate: int | None = SPARSITY_GATE):
    """spars_(h,s)(C, A): |C| over the largest separated demand (inf if none)."""
    if gate is not None and g.n > gate:
        raise OracleBoundExceeded(f"exact sparsity limited to n <= {gate}, got n = {g.n}")
    value, _ = max_separated_demand(g, c, a, h, s)
    if value == 0:
        return INF
    return c.size(g) / value


# demand matching graph ---------------------------------------------------------------


@dataclass
class DemandMatchingGraph:
    """Copies (v, j) of each vertex and one matching per demand."""

    copies: dict
    batches: list

    @property
    def edges(self) -> list:
        return [e for batch in self.batches for e in batch]

    @property
    def vertices(self) -> list:
        return [x for cs in self.copies.values() for x in cs]


def _integral(x, what):
    x = as_fraction(x)
    if x.denominator != 1:
        raise InvalidInstance(f"{what} must be integral, got {x}")
    return x.numerator


def build_demand_matching_graph(a: Mapping, ds: Sequence[Mapping], strict: bool = True) -> DemandMatchingGraph:
    """2A(v) copies per vertex; D_i(u, v) edges of matching i join u- and v-copies.

    Copies are assigned lowest free index first. With `strict` off, a
    demand that is not A-respecting gets extra copies instead of an error.
    """
    ncopies = {v: 2 * _integral(x, "node-weighting") for v, x in a.items()}
    ds = [Demand(d) for d in ds]
    for i, d in enumerate(ds):
        if not d.is_respecting(a):
            if strict:
                raise InvalidInstance(f"demand {i} is not A-respecting")
            for v in {x for p in d for x in p}:
                ncopies[v] = max(ncopies.get(v, 0), _integral(d.out_of(v) + d.into(v), "demand"))
    copies = {v: [(v, j) for j in range(k)] for v, k in ncopies.items()}
    batches = []
    for d in ds:
        used = defaultdict(int)
        batch = []
        for (u, v) in sorted(d, key=_sort_key):
            for _ in range(_integral(d[(u, v)], "demand")):
                batch.append(((u, used[u]), (v, used[v])))
                used[u] += 1
                used[v] += 1
        batches.append(batch)
    return DemandMatchingGraph(copies, batches)


def _sort_key(x):
    return (type(x).__name__, repr(x)) if not isinstance(x, (int, tuple)) else (type(x).__name__, x)


@dataclass
class SpgReport:
    ok: bool
    violation: tuple | None = None  # (batch index, edge, hop distance)


def check_spg(batches: Sequence[Sequence], s: int) -> SpgReport:
    """Is every edge of batch i more than s hops apart in the union of earlier batches?"""
    adj = defaultdict(set)
    for i, batch in enumerate(batches):
        seen = set()
        for u, v in batch:
            if u == v or u in seen or v in seen:
                raise InvalidInstance(f"batch {i} is not a matching")
            seen.update((u, v))
        for u, v in batch:
            hops = _hops(adj, u, v, s)
            if hops is not None:
                return SpgReport(False, (i, (u, v), hops))
        for u, v in batch:
            adj[u].add(v)
            adj[v].add(u)
    return SpgReport(True)


def _hops(adj, u, v, limit):
    """Hop distance from u to v if it is at most `limit`, else None."""
    if u == v:
        return 0
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if dist[x] >= limit:
            continue
        for y in adj.get(x, ()):
            if y not in dist:
                dist[y] = dist[x] + 1
                if y == v:
                    return dist[y]
                queue.append(y)
    return None


# forests and tree matchings ---------------------------------------------------------


def forest_cover(edges: Sequence) -> list:
    """Greedy peeling: repeatedly take a maximal spanning forest of what is left."""
    rest = list(edges)
    forests = []
    while rest:
        parent = {}

        def find(x):
            while parent.get(x, x) != x:
                parent[x] = parent.get(parent[x], parent[x])
                x = parent[x]
            return x
        forest, left = [], []
        for e in rest:
            ru, rv = find(e[0]), find(e[1])
            if ru == rv:
                left.append(e)
            else:
                parent[ru] = rv
                forest.append(e)
        forests.append(forest)
        rest = left
    return forests


def forest_trees(forest: Sequence) -> list:
    """Split a forest's edge list into the edge lists of its trees."""
    adj = defaultdict(list)
    for e in forest:
        adj[e[0]].append(e)
        adj[e[1]].append(e)
    seen, trees = set(), []
    for root in sorted(adj, key=_sort_key):
        if root in seen:
            continue
        seen.add(root)
        stack, tree, used = [root], [], set()
        while stack:
            x = stack.pop()
            for e in adj[x]:
                if id(e) in used:
                    continue
                used.add(id(e))
                y = e[1] if e[0] == x else e[0]
                if y in seen:
                    raise InvalidInstance("forest contains a cycle")
                seen.add(y)
                tree.append(e)
                stack.append(y)
        trees.append(tree)
    return trees


def tree_matching_demand(tree_edges: Sequence, root=None) -> Demand:
    """Sum over internal vertices v of a perfect matching on U_v, counted both ways.

    U_v is the set of v's children, plus v itself when that set is odd.
    The root defaults to the smallest vertex; U_v is sorted and its first
    half is paired with its second half.
    """
    adj = defaultdict(list)
    for u, v in tree_edges:
        adj[u].append(v)
        adj[v].append(u)
    if not adj:
        return Demand()
    if root is None:
        root = min(adj, key=_sort_key)
    children = defaultdict(list)
    seen = {root}
    order = [root]
    for x in order:
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                children[x].append(y)
                order.append(y)
    if len(seen) != len(adj) or len(tree_edges) != len(adj) - 1:
        raise InvalidInstance("edges do not form a tree")
    out = defaultdict(int)
    for v in order:
        kids = sorted(children[v], key=_sort_key)
        if not kids:
            continue
        group = kids + [v] if len(kids) % 2 else kids
        half = len(group) // 2
        for a, b in zip(group[:half], group[half:]):
            out[(a, b)] += 1
            out[(b, a)] += 1
    return Demand(out)


def matching_dispersed_demand(a: Mapping, ds: Sequence[Mapping], cover: Sequence | None = None,
                              strict: bool = True) -> tuple:
    """MD(u, v) = 1/(4 alpha) * sum over trees of D_T between u- and v-copies.

    `cover` is a list of forests over the demand matching graph's edges
    (greedy peeling when omitted); alpha is its number of forests.
    Returns (MD, matching graph, cover).
    """
    dmg = build_demand_matching_graph(a, ds, strict=strict)
    edges = dmg.edges
    if cover is None:
        cover = forest_cover(edges)
    if sorted(map(repr, edges)) != sorted(repr(e) for f in cover for e in f):
        raise InvalidInstance("cover does not cover the matching graph's edges exactly")
    alpha = len(cover)
    md = defaultdict(Fraction)
    for forest in cover:
        for tree in forest_trees(forest):
            for (x, y), val in tree_matching_demand(tree).items():
                if x[0] != y[0]:
                    md[(x[0], y[0])] += val
    if alpha:
        md = {p: v / (4 * alpha) for p, v in md.items()}
    return Demand(md), dmg, cover


# cut sequences ------------------------------------------------------------------------


@dataclass
class CutSequenceWitness:
    """Cuts C_1..C_k with witnessing demands D_i and claimed sparsities phi_i."""

    cuts: list
    demands: list
    sparsities: list

    def __post_init__(self):
        if not len(self.cuts) == len(self.demands) == len(self.sparsities):
            raise InvalidInstance("witness needs one demand and one sparsity per cut")
        self.demands = [Demand(d) for d in self.demands]
        self.sparsities = [as_fraction(x) for x in self.sparsities]


def check_witness(g: Graph, a: Mapping, w: CutSequenceWitness, h, s) -> list:
    """Problems with a witness, as (index, kind, detail) triples; empty if consistent."""
    problems = []
    current = g
    for i, (c, d, phi) in enumerate(zip(w.cuts, w.demands, w.sparsities)):
        if not d.is_respecting(a):
            problems.append((i, "not-a-respecting", None))
        far = [p for p in d if distance(current, *p) > h]
        if far:
            problems.append((i, "not-h-length", far[0]))
        after = apply_cut(current, c)
        close = [p for p in d if distance(after, *p) <= h * s]
        if close:
            problems.append((i, "not-separated", close[0]))
        if d.size == 0 or c.size(g) > phi * d.size:
            problems.append((i, "sparsity-exceeds-claim", c.size(g) / d.size if d.size else INF))
        current = after
    return problems


@dataclass
class UnionReport:
    """Outcome of the four union-of-cuts assertions plus the data behind them."""

    checks: dict
    union: MovingCut
    demand: Demand
    alpha: int
    measured: Fraction
    bound: float
    spg: SpgReport
    witness_problems: list

    @property
    def ok(self) -> bool:
        return all(passed for passed, _ in self.checks.values())


def union_bound(g: Graph, w: CutSequenceWitness, s, c=4) -> float:
    """s^3 log^3 n n^(c/s) * sum|C_i| / sum(|C_i| / phi_i)."""
    n = max(g.n, 2)
    sizes = [cut.size(g) for cut in w.cuts]
    weighted = sum((x / phi for x, phi in zip(sizes, w.sparsities) if phi), Fraction(0))
    if weighted == 0:
        return math.inf
    return s ** 3 * math.log2(n) ** 3 * n ** (c / s) * float(sum(sizes) / weighted)


def verify_union_witness(g: Graph, a: Mapping, w: CutSequenceWitness, h: int, s: int,
                         c=4) -> UnionReport:
    """Check that sum C_i is (2h, (s-2)/2)-length sparse, witnessed by MD.

    The summed cut is taken as an h(s-2)-length cut with the same length
    increase. The four checks are: MD is 2h-length in G, MD is
    A-respecting, the summed cut h(s-2)-separates all of MD, and |C|/|MD|
    is within the union bound with constant c.
    """
    if not isinstance(s, int) or s < 3:
        raise InvalidInstance("the union theorem needs an integer s >= 3")
    if not isinstance(h, int) or h < 1:
        raise InvalidInstance("h must be a positive integer")
    problems = check_witness(g, a, w, h, s)
    md, dmg, cover = matching_dispersed_demand(a, w.demands, strict=False)
    spg = check_spg(list(reversed(dmg.batches)), s)
    union = cut_sum(w.cuts, h * (s - 2))
    checks = {}
    far = [p for p in md if distance(g, *p) > 2 * h]
    checks["two-h-length"] = (not far, far[0] if far else None)
    out, inn = defaultdict(Fraction), defaultdict(Fraction)
    for (u, v), x in md.items():
        out[u] += x
        inn[v] += x
    over = [v for v in sorted(set(out) | set(inn), key=_sort_key)
            if max(out[v], inn[v]) > as_fraction(a.get(v, 0))]
    checks["a-respecting"] = (not over, over[0] if over else None)
    gu = apply_cut(g, union)
    close = [p for p in md if distance(gu, *p) <= h * (s - 2)]
    checks["separated"] = (not close, close[0] if close else None)
    measured = union.size(g) / md.size if md.size else INF
    bound = union_bound(g, w, s, c)
    checks["sparsity"] = (measured <= bound, (measured, bound))
    return UnionReport(checks, union, md, len(cover), measured, bound, spg, problems)
