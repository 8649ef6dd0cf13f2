"""Neighborhood covers by seeded ball carving.

Each clustering carves balls around centers taken in random order, with
radii h_cov plus a truncated exponential, so every cluster has weak
diameter at most beta * h_cov. A vertex is covered once its h_cov-ball
lies inside one cluster. The first center of every clustering is an
uncovered vertex, so at most n clusterings are ever needed.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from ._num import INF, as_fraction
from .cuts import all_distances
from .errors import InvalidInstance
from .graph import VERTEX, Graph

COVER_GATE = 10_000


@dataclass
class NeighborhoodCover:
    clusterings: list  # list of lists of frozensets
    h_cov: Fraction
    h_diam: Fraction

    @property
    def width(self) -> int:
        return len(self.clusterings)

    @property
    def clusters(self) -> list:
        return [c for cl in self.clusterings for c in cl]


def ball(dist: dict, v, r) -> frozenset:
    """Vertices within distance r of v (v itself always included)."""
    return frozenset([v, *(u for u, d in dist[v].items() if d <= r)])


def build_cover(g: Graph, h_cov, beta, seed: int = 0) -> NeighborhoodCover:
    """Cover with covering radius h_cov and diameter at most beta * h_cov."""
    if g.mode != VERTEX:
        raise InvalidInstance("covers are built on vertex-weighted graphs")
    h_cov, beta = as_fraction(h_cov), as_fraction(beta)
    if beta < 2:
        raise InvalidInstance("beta must be at least 2")
    if h_cov <= 0:
        raise InvalidInstance("h_cov must be positive")
    rng = random.Random(seed)
    dist = all_distances(g)
    slack = beta * h_cov / 2 - h_cov  # radii stay within [h_cov, beta h_cov / 2]
    mean = float(slack) / max(1.0, math.log(max(g.n, 2)))
    balls = {v: ball(dist, v, h_cov) for v in g.vertices}
    uncovered = list(g.vertices)
    clusterings = []
    while uncovered:
        rest = set(g.vertices)
        first = uncovered[rng.randrange(len(uncovered))]
        others = [v for v in g.vertices if v != first]
        rng.shuffle(others)
        clustering = []
        for center in [first, *others]:
            if center not in rest:
                continue
            extra = Fraction(rng.expovariate(1 / mean)) if mean > 0 else Fraction(0)
            radius = h_cov + min(extra, slack)
            cluster = frozenset(u for u in ball(dist, center, radius) if u in rest)
            rest -= cluster
            clustering.append(cluster)
        clusterings.append(clustering)
        uncovered = [v for v in uncovered if not any(balls[v] <= c for c in clustering)]
    return NeighborhoodCover(clusterings, h_cov, beta * h_cov)


def weak_diameter(dist: dict, cluster) -> Fraction:
    return max((dist[u].get(v, INF) for u in cluster for v in cluster if u != v), default=0)


def verify_cover(g: Graph, cover: NeighborhoodCover) -> list:
    """Violations of the three cover invariants (empty when valid)."""
    if g.n > COVER_GATE:
        raise InvalidInstance(f"cover verification limited to n <= {COVER_GATE}")
    dist = all_distances(g)
    problems = []
    for i, clustering in enumerate(cover.clusterings):
        seen = set()
        for c in clustering:
            if seen & c:
                problems.append(("overlap", i, sorted(seen & c, key=repr)[0]))
            seen |= c
            diam = weak_diameter(dist, c)
            if diam > cover.h_diam:
                problems.append(("diameter", i, diam))
    for v in g.vertices:
        b = ball(dist, v, cover.h_cov)
        if not any(b <= c for c in cover.clusters):
            problems.append(("uncovered", v, None))
    return problems
