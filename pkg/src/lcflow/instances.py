"""Small instance generators used by the tests, demos and suite corpus."""
from __future__ import annotations

import random
from fractions import Fraction

from .cuts import CutSequenceWitness, MovingCut, apply_cut, distances_from
from .graph import Demand, Graph


def two_path_graph(length=1, capacity=1) -> Graph:
    """s -> a -> t and s -> b -> t."""
    return Graph.edge_weighted([("s", "a"), ("a", "t"), ("s", "b"), ("b", "t")], length, capacity)


def cost_split_graph() -> Graph:
    """Direct s -> t of length 3 next to s -> a -> t of length 1 + 1."""
    edges = [("s", "t"), ("s", "a"), ("a", "t")]
    return Graph.edge_weighted(edges, {("s", "t"): 3, ("s", "a"): 1, ("a", "t"): 1}, 1)


def random_digraph(rng: random.Random, n: int, m: int, max_length=3, max_capacity=4) -> Graph:
    vs = list(range(n))
    edges = set()
    m = min(m, n * (n - 1))
    while len(edges) < m:
        u, v = rng.sample(vs, 2)
        edges.add((u, v))
    edges = sorted(edges)
    return Graph.edge_weighted(edges, {e: rng.randint(1, max_length) for e in edges},
                               {e: rng.randint(1, max_capacity) for e in edges}, vertices=vs)


def random_dag(rng: random.Random, n: int, m: int, max_length=2, max_capacity=3) -> Graph:
    """Arcs only go from lower to higher ids."""
    vs = list(range(n))
    pairs = [(u, v) for u in vs for v in vs if u < v]
    edges = sorted(rng.sample(pairs, min(m, len(pairs))))
    return Graph.edge_weighted(edges, {e: rng.randint(1, max_length) for e in edges},
                               {e: rng.randint(1, max_capacity) for e in edges}, vertices=vs)


def random_layered_dag(rng: random.Random, layers: int, width: int, density=0.6, max_capacity=3) -> Graph:
    """Unit-length arcs between consecutive layers; vertices are (layer, index)."""
    vs = [(i, j) for i in range(layers) for j in range(width)]
    edges = [((i, a), (i + 1, b)) for i in range(layers - 1) for a in range(width)
             for b in range(width) if rng.random() < density]
    return Graph.edge_weighted(edges, 1, {e: rng.randint(1, max_capacity) for e in edges}, vertices=vs)


def random_connected_graph(rng: random.Random, n: int, extra: int, max_length=3, max_capacity=3) -> Graph:
    """Vertex-weighted: a random spanning tree plus `extra` further edges."""
    edges = {(rng.randrange(i), i) for i in range(1, n)}
    tries = 0
    while len(edges) < n - 1 + extra and tries < 100:
        tries += 1
        u, v = sorted(rng.sample(range(n), 2))
        edges.add((u, v))
    return Graph.vertex_weighted(sorted(edges), {v: rng.randint(1, max_length) for v in range(n)},
                                 {v: rng.randint(1, max_capacity) for v in range(n)}, vertices=range(n))


def random_vertex_graph(rng: random.Random, n: int, p: float, max_length=3, max_capacity=3) -> Graph:
    """Vertex-weighted Erdos-Renyi graph; may be disconnected."""
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.vertex_weighted(edges, {v: rng.randint(1, max_length) for v in range(n)},
                                 {v: rng.randint(1, max_capacity) for v in range(n)}, vertices=range(n))


def path_of_cliques(cliques: int, size: int) -> Graph:
    """Cliques K_size in a row, consecutive cliques joined by one edge; unit weights."""
    edges = []
    for c in range(cliques):
        base = c * size
        edges += [(base + i, base + j) for i in range(size) for j in range(i + 1, size)]
        if c:
            edges.append((base - 1, base))
    return Graph.vertex_weighted(edges, 1, 1, vertices=range(cliques * size))


def sequential_cut_witness(g: Graph, a, h: int, s: int, rng: random.Random, rounds: int = 3):
    """Cut sequence built greedily: each round cuts one vertex fully.

    A vertex x gets value 1 in an hs-length cut; the witnessing demand
    greedily collects pairs that are h-close before the cut and more than
    hs apart after it, respecting A. Rounds without such pairs are skipped.
    """
    cuts, demands, sparsities = [], [], []
    current = g
    for _ in range(rounds):
        order = list(g.vertices)
        rng.shuffle(order)
        for x in order:
            c = MovingCut(h * s, {x: 1})
            after = apply_cut(current, c)
            before_d = {u: distances_from(current, u) for u in g.vertices}
            after_d = {u: distances_from(after, u) for u in g.vertices}
            cand = [(u, v) for u in g.vertices for v in g.vertices if u != v
                    and before_d[u].get(v, float("inf")) <= h and after_d[u].get(v, float("inf")) > h * s]
            rng.shuffle(cand)
            out, inn, d = {}, {}, {}
            for u, v in cand:
                if out.get(u, 0) < a.get(u, 0) and inn.get(v, 0) < a.get(v, 0):
                    d[(u, v)] = 1
                    out[u] = out.get(u, 0) + 1
                    inn[v] = inn.get(v, 0) + 1
            if d:
                cuts.append(c)
                demands.append(Demand(d))
                sparsities.append(Fraction(c.size(g), len(d)))
                current = after
                break
    return CutSequenceWitness(cuts, demands, sparsities)
