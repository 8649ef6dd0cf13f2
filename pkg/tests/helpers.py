"""Random instance generators and contract checkers shared by the tests."""
import math
import random
from fractions import Fraction

from lcflow.graph import EdgeFlow, Graph, flow_stats
from lcflow.oracle import enumerate_paths, min_normalized_path_weight


def random_maxflow_instance(rng: random.Random, n_max=10, m_max=20, k_max=3, h_max=6):
    """Random digraph with n <= 10, m <= 20, k <= 3 single-vertex pairs."""
    n = rng.randint(4, n_max)
    m = rng.randint(n, min(m_max, n * (n - 1)))
    vs = list(range(n))
    edges = set()
    while len(edges) < m:
        edges.add(tuple(rng.sample(vs, 2)))
    edges = sorted(edges)
    g = Graph.edge_weighted(edges, {e: rng.randint(1, 3) for e in edges},
                            {e: rng.randint(1, 4) for e in edges}, vertices=vs)
    pairs = []
    for _ in range(rng.randint(1, k_max)):
        s, t = rng.sample(vs, 2)
        pairs.append(({s}, {t}))
    return g, pairs, rng.randint(1, h_max), rng.choice([Fraction(1, 4), Fraction(1, 10)])


def random_blocking_instance(rng: random.Random, max_layers=4, max_width=3):
    """Layered DAG with 1-2 commodities from first-layer to last-layer vertex sets."""
    from lcflow.instances import random_layered_dag
    g = random_layered_dag(rng, rng.randint(2, max_layers), rng.randint(1, max_width))
    last = max(v[0] for v in g.vertices)
    width = max(v[1] for v in g.vertices) + 1
    pairs = []
    for _ in range(rng.randint(1, 2)):
        pairs.append(({(0, rng.randrange(width)) for _ in range(2)},
                      {(last, rng.randrange(width)) for _ in range(2)}))
    return g, pairs


def random_fractional_flow(rng: random.Random, k_max=2):
    """A conserved fractional edge flow on a random DAG, built from random paths.

    Returns (graph, flow, terminals) where terminals maps each commodity to
    its (sources, sinks).
    """
    n = rng.randint(3, 8)
    vs = list(range(n))
    chain = {(v, v + 1) for v in range(n - 1)}
    edges = sorted({(u, v) for u in vs for v in vs if u < v and rng.random() < 0.5} | chain)
    g = Graph.edge_weighted(edges, {e: rng.randint(1, 5) for e in edges}, 1, vertices=vs)
    succ = {v: [b for a, b in edges if a == v] for v in vs}
    flows, terminals = {}, {}
    for com in range(rng.randint(1, k_max)):
        fl = {}
        for _ in range(rng.randint(1, 4)):
            path = [0]
            while path[-1] != n - 1:
                path.append(rng.choice(succ[path[-1]]))
            val = Fraction(rng.randint(1, 30), rng.choice([3, 5, 7, 12, 16]))
            for e in zip(path, path[1:]):
                fl[e] = fl.get(e, Fraction(0)) + val
        flows[com] = fl
        terminals[com] = ({0}, {n - 1})
    return g, EdgeFlow(flows), terminals


def simple_dag(g: Graph, pairs):
    """An ExpandedDAG whose states are the vertices of the acyclic digraph g itself.

    Arcs are ordered by the depth of their tail, which is what the path
    count sweeps expect. States are (vertex, depth, 0).
    """
    import networkx as nx

    from lcflow.maxflow import ExpandedDAG

    d = nx.DiGraph(list(g.edges))
    d.add_nodes_from(g.vertices)
    depth = {}
    for v in nx.topological_sort(d):
        depth[v] = max((depth[u] + 1 for u in d.predecessors(v)), default=0)
    idx = {v: i for i, v in enumerate(g.vertices)}
    arcs = sorted(g.edges, key=lambda e: (depth[e[0]], idx[e[0]], idx[e[1]]))
    dag = ExpandedDAG(
        states=[(v, depth[v], 0) for v in g.vertices],
        tail=[idx[a] for a, _ in arcs], head=[idx[b] for _, b in arcs], base=list(arcs),
        sources=[[idx[s] for s in S] for S, _ in pairs],
        sinks=[{idx[t] for t in T} for _, T in pairs],
        q=Fraction(1), xmax=0, kappa=1,
    )
    dag.depth = max(depth.values(), default=0)
    return dag


def blocking_problems(g: Graph, dag, flows, two_mu, alpha, pairs) -> list:
    """Check feasibility, per-commodity conservation and alpha-blocking by path enumeration."""
    from collections import defaultdict

    problems = []
    total = defaultdict(Fraction)
    for i, fi in enumerate(flows):
        net = defaultdict(int)
        for a, x in enumerate(fi):
            if x < 0:
                problems.append(("negative", i, a))
            total[dag.base[a]] += Fraction(x, two_mu)
            net[dag.tail[a]] += x
            net[dag.head[a]] -= x
        srcs, snks = set(dag.sources[i]), dag.sinks[i]
        for v, x in net.items():
            if x and v not in srcs and v not in snks:
                problems.append(("conservation", i, v))
    for e, x in total.items():
        if x > g.capacity[e]:
            problems.append(("capacity", e, x))
    for i, (S, T) in enumerate(pairs):
        for p in enumerate_paths(g, S, T):
            arcs = list(zip(p, p[1:]))
            if not any(total[e] >= alpha * g.capacity[e] for e in arcs):
                problems.append(("unblocked", i, p))
    return problems


def blocker_problems(g, w, lam, eps, h, pairs, blk):
    problems = []
    for _, walk, _ in blk.flow:
        arcs = list(zip(walk, walk[1:]))
        if sum(w[e] for e in arcs) > (1 + 2 * eps) * lam:
            problems.append(("heavy", walk))
        if sum(g.length[e] for e in arcs) > h:
            problems.append(("long", walk))
    for e, x in blk.loads.items():
        if x > g.capacity[e]:
            problems.append(("capacity", e))
    for S, T in pairs:
        for p in enumerate_paths(g, S, T, max_len=h):
            arcs = list(zip(p, p[1:]))
            if sum(w[e] for e in arcs) <= (1 + eps) * lam:
                if not any(blk.loads.get(e, 0) >= Fraction(g.capacity[e], 2 * blk.kappa) for e in arcs):
                    problems.append(("unblocked", p))
    return problems


def maxflow_problems(g, pairs, h, eps, res, opt):
    """Sandwich, certificate, dual feasibility and primal feasibility."""
    problems = []
    if not opt / (1 + eps) <= res.value <= opt:
        problems.append(("sandwich", res.value, opt))
    if not res.dual_value <= (1 + eps) * res.value and opt:
        problems.append(("certificate", res.dual_value, res.value))
    if opt and min_normalized_path_weight(g, res.dual, pairs, h) < 1:
        problems.append(("dual-infeasible",))
    if sum((res.dual[e] * g.capacity[e] for e in g.edges), Fraction(0)) != res.dual_value:
        problems.append(("dual-value",))
    stats = flow_stats(res.flow, g)
    if stats.congestion > 1 or stats.length > h:
        problems.append(("primal", stats))
    for com, p, _ in res.flow:
        if len(set(p)) != len(p) or p[0] not in pairs[com][0] or p[-1] not in pairs[com][1]:
            problems.append(("path", com, p))
    return problems


def lowstep_problems(g, d, t, tau, eps, res, opt, directed=True):
    """Value, Dem <= D, congestion, step and totlen contracts; totlen ledger."""
    st_ = flow_stats(res.flow, g)
    problems = []
    want = tau - Fraction(1, g.n) if directed else tau
    if st_.value != want:
        problems.append(("value", st_.value, want))
    if not res.flow.demand().leq(d):
        problems.append(("demand", res.flow.demand()))
    bound = 8 * math.ceil(math.log2(g.n)) ** 2 / eps
    if st_.congestion > bound:
        problems.append(("congestion", st_.congestion))
    # steps are only bounded through the scaled lengths: at most t / eps + t
    # (twice that plus one in the split graph of the undirected wrapper)
    if directed and st_.step > t / eps + t:
        problems.append(("step", st_.step))
    factor = (1 + eps) ** (4 if directed else 5)
    if st_.totlen > factor * opt:
        problems.append(("totlen", st_.totlen, opt))
    if directed and sum(b["totlen"] for b in res.buckets) != st_.totlen:
        problems.append(("ledger",))
    return problems
