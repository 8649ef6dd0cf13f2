"""Graphs, demands and multi-commodity flows.

Two graph modes are supported. A vertex-weighted graph is undirected and
carries integer lengths and capacities on its vertices; an edge-weighted
graph is directed and carries them on its edges. Flows come in a path form
(explicit paths with values) and an edge form (per-commodity edge maps).
All flow values are exact `Fraction`s.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from ._num import INF, as_fraction
from .errors import InvalidInstance, LCFlowError, PathFormRequired

VERTEX = "vertex"
EDGE = "edge"
MODES = (VERTEX, EDGE)


def _weights(spec, keys, what):
    if isinstance(spec, Mapping):
        missing = [k for k in keys if k not in spec]
        if missing:
            raise InvalidInstance(f"missing {what} for {missing[0]!r}")
        return {k: spec[k] for k in keys}
    return {k: spec for k in keys}


@dataclass(frozen=True, eq=False)
class Graph:
    mode: str
    vertices: tuple
    edges: tuple
    length: Mapping
    capacity: Mapping
    _out: dict = field(default=None, repr=False)
    _in: dict = field(default=None, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInstance(f"unknown mode {self.mode!r}")
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise InvalidInstance("duplicate vertex id")
        seen = set()
        for e in self.edges:
            u, v = e
            if u not in vset or v not in vset:
                raise InvalidInstance(f"edge {e!r} uses an undeclared vertex")
            if u == v:
                raise InvalidInstance(f"self-loop at {u!r}")
            key = e if self.mode == EDGE else frozenset(e)
            if key in seen:
                raise InvalidInstance(f"duplicate edge {e!r}")
            seen.add(key)
        elements = self.vertices if self.mode == VERTEX else self.edges
        min_len = 1 if self.mode == VERTEX else 0
        for x in elements:
            ln, cap = self.length.get(x), self.capacity.get(x)
            if not isinstance(ln, int) or isinstance(ln, bool) or ln < min_len:
                raise InvalidInstance(f"length of {x!r} must be an integer >= {min_len}")
            if not isinstance(cap, int) or isinstance(cap, bool) or cap < 1:
                raise InvalidInstance(f"capacity of {x!r} must be a positive integer")
        out, inn = {v: [] for v in self.vertices}, {v: [] for v in self.vertices}
        for u, v in self.edges:
            out[u].append(v)
            inn[v].append(u)
            if self.mode == VERTEX:
                out[v].append(u)
                inn[u].append(v)
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_in", inn)

    # construction ---------------------------------------------------------

    @classmethod
    def vertex_weighted(cls, edges, length=1, capacity=1, vertices=None) -> "Graph":
        edges = tuple(tuple(e) for e in edges)
        if vertices is None:
            vertices = []
            for e in edges:
                for x in e:
                    if x not in vertices:
                        vertices.append(x)
        vertices = tuple(vertices)
        return cls(VERTEX, vertices, edges, _weights(length, vertices, "length"),
                   _weights(capacity, vertices, "capacity"))

    @classmethod
    def edge_weighted(cls, edges, length=1, capacity=1, vertices=None) -> "Graph":
        edges = tuple(tuple(e) for e in edges)
        if vertices is None:
            vertices = []
            for e in edges:
                for x in e:
                    if x not in vertices:
                        vertices.append(x)
        vertices = tuple(vertices)
        return cls(EDGE, vertices, edges, _weights(length, edges, "length"),
                   _weights(capacity, edges, "capacity"))

    # queries ----------------------------------------------------------------

    @property
    def directed(self) -> bool:
        return self.mode == EDGE

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def elements(self) -> tuple:
        """The capacitated elements: vertices or edges depending on mode."""
        return self.vertices if self.mode == VERTEX else self.edges

    def successors(self, v) -> list:
        return self._out[v]

    def predecessors(self, v) -> list:
        return self._in[v]

    def has_arc(self, u, v) -> bool:
        return v in self._out.get(u, ())

    def value_bound(self) -> int:
        """Largest length or capacity (at least 1)."""
        return max([1, *self.length.values(), *self.capacity.values()])

    def path_elements(self, path) -> list:
        """Elements (vertices or directed edges) a path uses, with multiplicity."""
        for a, b in zip(path, path[1:]):
            if not self.has_arc(a, b):
                raise LCFlowError(f"{a!r}->{b!r} is not an edge", code="not-a-path")
        if self.mode == VERTEX:
            return list(path)
        return list(zip(path, path[1:]))

    def path_length(self, path) -> int:
        return sum(self.length[x] for x in self.path_elements(path))

    def capacity_key(self, a, b):
        """Edge-mode capacity key for the arc a->b."""
        return (a, b)


class Demand(Mapping):
    """Sparse map (u, v) -> nonnegative rational (or inf), zero pairs dropped."""

    def __init__(self, pairs: Mapping | Iterable = ()):
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        d = {}
        for (u, v), val in items:
            if val != INF:
                val = as_fraction(val)
            if val < 0:
                raise InvalidInstance(f"negative demand on {(u, v)!r}")
            if u == v and val != 0:
                raise InvalidInstance(f"demand from {u!r} to itself")
            if val != 0:
                d[(u, v)] = d.get((u, v), 0) + val
        self._d = d

    def __getitem__(self, key):
        return self._d.get(key, Fraction(0))

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __contains__(self, key):
        return key in self._d

    def __repr__(self):
        return f"Demand({self._d!r})"

    def __eq__(self, other):
        if isinstance(other, Demand):
            return self._d == other._d
        return NotImplemented

    @property
    def size(self):
        return sum(self._d.values(), Fraction(0))

    def out_of(self, v):
        return sum((x for (a, _), x in self._d.items() if a == v), Fraction(0))

    def into(self, v):
        return sum((x for (_, b), x in self._d.items() if b == v), Fraction(0))

    def is_respecting(self, weighting: Mapping) -> bool:
        """max{D(v,.), D(.,v)} <= A(v) for every vertex."""
        out, inn = defaultdict(Fraction), defaultdict(Fraction)
        for (a, b), x in self._d.items():
            out[a] += x
            inn[b] += x
        return all(max(out[v], inn[v]) <= weighting.get(v, 0) for v in set(out) | set(inn))

    def scaled(self, c) -> "Demand":
        return Demand({k: v * c for k, v in self._d.items()})

    def minus(self, other: Mapping) -> "Demand":
        out = dict(self._d)
        for k, v in other.items():
            out[k] = out.get(k, Fraction(0)) - v
            if out[k] < 0:
                raise LCFlowError(f"demand underflow on {k!r}", code="demand-underflow")
        return Demand(out)

    def leq(self, other: Mapping) -> bool:
        return all(x <= other.get(k, 0) for k, x in self._d.items())


def weighting_size(a: Mapping):
    return sum((as_fraction(x) for x in a.values()), Fraction(0))


# flows ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PathFlow:
    """Path representation: (commodity, path, value) triples, merged by key."""

    items: tuple = ()

    @classmethod
    def from_items(cls, triples: Iterable) -> "PathFlow":
        acc = {}
        for com, path, val in triples:
            val = as_fraction(val)
            if val < 0:
                raise LCFlowError("negative path value", code="negative-flow")
            if val == 0:
                continue
            key = (com, tuple(path))
            acc[key] = acc.get(key, Fraction(0)) + val
        return cls(tuple((c, p, v) for (c, p), v in acc.items()))

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    @property
    def value(self) -> Fraction:
        return sum((v for _, _, v in self.items), Fraction(0))

    def commodities(self) -> list:
        out = []
        for c, _, _ in self.items:
            if c not in out:
                out.append(c)
        return out

    def by_commodity(self) -> dict:
        out = defaultdict(list)
        for c, p, v in self.items:
            out[c].append((p, v))
        return dict(out)

    def demand(self) -> Demand:
        """Dem(F): value routed between each (start, end) pair."""
        return Demand(((p[0], p[-1]), v) for _, p, v in self.items)

    def commodity_values(self) -> dict:
        out = defaultdict(Fraction)
        for c, _, v in self.items:
            out[c] += v
        return dict(out)

    def scaled(self, c) -> "PathFlow":
        c = as_fraction(c)
        return PathFlow.from_items((k, p, v * c) for k, p, v in self.items)

    def plus(self, other: "PathFlow") -> "PathFlow":
        return PathFlow.from_items(list(self.items) + list(other.items))

    def map_commodities(self, fn) -> "PathFlow":
        return PathFlow.from_items((fn(c), p, v) for c, p, v in self.items)

    def loads(self, g: Graph) -> dict:
        out = defaultdict(Fraction)
        for _, p, v in self.items:
            for x in g.path_elements(p):
                out[x] += v
        return dict(out)


@dataclass(frozen=True, eq=False)
class EdgeFlow:
    """Edge representation: commodity -> {(a, b): value} on directed arcs."""

    flows: Mapping = field(default_factory=dict)

    def commodities(self) -> list:
        return list(self.flows)

    def net_out(self, com) -> dict:
        net = defaultdict(Fraction)
        for (a, b), x in self.flows[com].items():
            net[a] += x
            net[b] -= x
        return dict(net)

    def commodity_value(self, com) -> Fraction:
        return sum((x for x in self.net_out(com).values() if x > 0), Fraction(0))

    @property
    def value(self) -> Fraction:
        return sum((self.commodity_value(c) for c in self.flows), Fraction(0))

    def arc_totals(self) -> dict:
        out = defaultdict(Fraction)
        for fl in self.flows.values():
            for e, x in fl.items():
                out[e] += x
        return dict(out)

    def loads(self, g: Graph) -> dict:
        if g.mode == EDGE:
            return self.arc_totals()
        out = defaultdict(Fraction)
        for fl in self.flows.values():
            inn, outf = defaultdict(Fraction), defaultdict(Fraction)
            for (a, b), x in fl.items():
                outf[a] += x
                inn[b] += x
            for v in set(inn) | set(outf):
                out[v] += max(inn[v], outf[v])
        return dict(out)


MultiFlow = PathFlow | EdgeFlow


@dataclass(frozen=True)
class FlowStats:
    value: Fraction
    congestion: Fraction
    totlen: Fraction
    length: int | None = None
    step: int | None = None


def flow_stats(f: MultiFlow, g: Graph) -> FlowStats:
    """Value, congestion and total length; length and step for path flows."""
    loads = f.loads(g)
    cong = max((loads[x] / g.capacity[x] for x in loads), default=Fraction(0))
    totlen = sum((loads[x] * g.length[x] for x in loads), Fraction(0))
    if isinstance(f, EdgeFlow):
        return FlowStats(f.value, Fraction(cong), totlen)
    length = max((g.path_length(p) for _, p, _ in f.items), default=0)
    step = max((len(p) - 1 for _, p, _ in f.items), default=0)
    if g.mode == VERTEX:
        totlen = sum((v * g.path_length(p) for _, p, v in f.items), Fraction(0))
    return FlowStats(f.value, Fraction(cong), totlen, length, step)


def flow_length(f: MultiFlow, g: Graph) -> int:
    if not isinstance(f, PathFlow):
        raise PathFormRequired("length is defined on path flows only")
    return flow_stats(f, g).length


def flow_step(f: MultiFlow) -> int:
    if not isinstance(f, PathFlow):
        raise PathFormRequired("step is defined on path flows only")
    return max((len(p) - 1 for _, p, _ in f.items), default=0)


def to_edge_representation(f: PathFlow, g: Graph | None = None) -> EdgeFlow:
    out = defaultdict(lambda: defaultdict(Fraction))
    for com, p, v in f.items:
        if g is not None:
            g.path_elements(p)
        for a, b in zip(p, p[1:]):
            out[com][(a, b)] += v
    return EdgeFlow({c: dict(m) for c, m in out.items()})


def simplify_walk(path) -> tuple:
    """Drop closed sub-walks so that every vertex appears at most once."""
    out, pos = [], {}
    for v in path:
        if v in pos:
            cut = pos[v]
            for x in out[cut + 1:]:
                del pos[x]
            del out[cut + 1:]
        else:
            pos[v] = len(out)
            out.append(v)
    return tuple(out)


# vertex splitting ---------------------------------------------------------------


def v_in(v):
    return (v, "in")


def v_out(v):
    return (v, "out")


@dataclass(frozen=True, eq=False)
class SplitMap:
    """Correspondence between a vertex-weighted graph and its split digraph."""

    original: Graph
    split: Graph

    def pair(self, u, v):
        return (v_in(u), v_out(v))

    def demand_forward(self, d: Mapping) -> Demand:
        return Demand({self.pair(u, v): x for (u, v), x in d.items()})

    def path_forward(self, path) -> tuple:
        out = []
        for v in path:
            out += [v_in(v), v_out(v)]
        return tuple(out)

    def path_back(self, dpath) -> tuple:
        out = []
        for v, _side in dpath:
            if not out or out[-1] != v:
                out.append(v)
        return tuple(out)

    def flow_back(self, f: PathFlow, commodity=None) -> PathFlow:
        """Project a split-graph path flow back; commodities map via `commodity`."""
        fn = commodity or (lambda c: c)
        return PathFlow.from_items((fn(c), self.path_back(p), v) for c, p, v in f.items)

    def flow_forward(self, f: PathFlow) -> PathFlow:
        return PathFlow.from_items((c, self.path_forward(p), v) for c, p, v in f.items)


def split_vertices(g: Graph, n_bound: int | None = None) -> tuple[Graph, SplitMap]:
    """Split every vertex v into v_in -> v_out carrying l(v), U(v).

    Each undirected edge {u, v} becomes the arcs u_out -> v_in and
    v_out -> u_in with length 0 and capacity 10 m N, so they never bind.
    """
    if g.mode != VERTEX:
        raise InvalidInstance("vertex splitting needs a vertex-weighted graph")
    big = 10 * max(g.m, 1) * max(g.value_bound(), n_bound or 1)
    vertices, edges, length, cap = [], [], {}, {}
    for v in g.vertices:
        vertices += [v_in(v), v_out(v)]
        e = (v_in(v), v_out(v))
        edges.append(e)
        length[e], cap[e] = g.length[v], g.capacity[v]
    for u, v in g.edges:
        for a, b in ((u, v), (v, u)):
            e = (v_out(a), v_in(b))
            edges.append(e)
            length[e], cap[e] = 0, big
    sg = Graph(EDGE, tuple(vertices), tuple(edges), length, cap)
    return sg, SplitMap(g, sg)


Vertex = Hashable
