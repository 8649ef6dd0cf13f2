import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lcflow import Graph, InvalidInstance
from lcflow.covers import ball, build_cover, verify_cover
from lcflow.cuts import all_distances
from lcflow.instances import random_connected_graph, random_vertex_graph


def bfs_balls(g, r):
    """Balls by brute force over every simple path (independent of the Dijkstra code)."""
    adj = {v: set() for v in g.vertices}
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    out = {}
    for s in g.vertices:
        reach = {s}
        stack = [(s, g.length[s], {s})]
        while stack:
            x, d, seen = stack.pop()
            for y in adj[x]:
                if y not in seen and d + g.length[y] <= r:
                    reach.add(y)
                    stack.append((y, d + g.length[y], seen | {y}))
        out[s] = frozenset(reach)
    return out


def test_path_is_one_cluster():
    g = Graph.vertex_weighted([(i, i + 1) for i in range(4)])
    cover = build_cover(g, 5, 2)
    assert cover.width == 1 and cover.clusters == [frozenset(range(5))]
    assert not verify_cover(g, cover)


def test_components_stay_apart():
    g = Graph.vertex_weighted([(0, 1), (2, 3)])
    cover = build_cover(g, 4, 2)
    assert all(c <= {0, 1} or c <= {2, 3} for c in cover.clusters)
    assert not verify_cover(g, cover)


def test_random_twelve_vertices():
    g = random_connected_graph(random.Random(12), 12, 6, max_length=1)
    cover = build_cover(g, 2, 4)
    assert not verify_cover(g, cover)
    balls = bfs_balls(g, 2)
    assert all(any(balls[v] <= c for c in cover.clusters) for v in g.vertices)


def test_rejects_small_beta():
    with pytest.raises(InvalidInstance):
        build_cover(Graph.vertex_weighted([(0, 1)]), 1, Fraction(3, 2))


def test_verifier_catches_problems():
    g = Graph.vertex_weighted([(i, i + 1) for i in range(4)])
    cover = build_cover(g, 2, 2)
    cover.clusterings.append([frozenset({0, 1}), frozenset({1, 2})])
    cover.clusterings.append([frozenset(range(5))])
    kinds = {p[0] for p in verify_cover(g, cover)}
    assert kinds == {"overlap", "diameter"}
    lonely = type(cover)([[frozenset({v}) for v in range(5)]], Fraction(2), Fraction(4))
    assert {p[0] for p in verify_cover(g, lonely)} == {"uncovered"}


def test_same_seed_same_cover():
    g = random_connected_graph(random.Random(3), 10, 5)
    assert build_cover(g, 3, 4, seed=7) == build_cover(g, 3, 4, seed=7)


@given(st.integers(0, 10_000), st.sampled_from([2, 3, 4, 8]))
def test_cover_invariants_property(seed, beta):
    rng = random.Random(seed)
    g = random_vertex_graph(rng, rng.randint(1, 10), rng.random() * 0.6)
    h_cov = rng.randint(1, 6)
    cover = build_cover(g, h_cov, beta, seed=seed)
    assert not verify_cover(g, cover)
    balls = bfs_balls(g, h_cov)
    dist = all_distances(g)
    assert all(balls[v] == ball(dist, v, h_cov) for v in g.vertices)
