"""Length-constrained multi-commodity maxflow.

The solver is a multiplicative-weights loop whose inner step is a "path
blocker": a blocking flow computed in an expanded DAG whose copies of a
vertex record the weight and length accumulated so far. Every returned
answer comes with an exactly verified primal/dual certificate.
"""
from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from typing import Sequence

from ._num import INF, as_fraction, dyadic_down, dyadic_up, frac_ceil, frac_floor, next_power_of_two
from .errors import InvalidInstance
from .graph import EDGE, Graph, PathFlow, simplify_walk
from .rounding import decompose_acyclic, round_circulation


def _check_pairs(g: Graph, pairs):
    out = []
    vs = set(g.vertices)
    for S, T in pairs:
        S, T = tuple(dict.fromkeys(S)), tuple(dict.fromkeys(T))
        if not S or not T:
            raise InvalidInstance("empty source or sink set")
        if set(S) & set(T):
            raise InvalidInstance("source and sink sets intersect")
        if not (set(S) | set(T)) <= vs:
            raise InvalidInstance("terminal is not a vertex")
        out.append((S, T))
    return out


def lightest_path_weight(g: Graph, w, h: int, sources, targets):
    """min over h-length paths from `sources` to `targets` of their weight."""
    targets = set(targets)
    tie = count()
    heap = [(Fraction(0), next(tie), s, 0) for s in sources]
    heapq.heapify(heap)
    best_len = {}
    while heap:
        d, _, v, ln = heapq.heappop(heap)
        if ln >= best_len.get(v, h + 1):
            continue
        best_len[v] = ln
        if v in targets:
            return d
        for x in g.successors(v):
            e = (v, x)
            l2 = ln + g.length[e]
            if l2 <= h and l2 < best_len.get(x, h + 1):
                heapq.heappush(heap, (d + w[e], next(tie), x, l2))
    return INF


# expanded DAG -------------------------------------------------------------------


@dataclass
class ExpandedDAG:
    """Copies v(x, h') of each vertex; x is the rounded weight in units of q."""

    states: list
    tail: list
    head: list
    base: list
    sources: list
    sinks: list
    q: Fraction
    xmax: int
    kappa: int
    depth: int = 0

    @property
    def size(self):
        return len(self.states), len(self.tail)


def discretize_weights(w, lam, h: int, eps) -> dict:
    """Round each weight up to a multiple of (eps/h) * lam."""
    lam, eps = as_fraction(lam), as_fraction(eps)
    if lam <= 0:
        raise InvalidInstance("lambda must be positive")
    q = eps * lam / h
    return {e: q * frac_ceil(as_fraction(x) / q) for e, x in w.items()}


def build_expanded_dag(g: Graph, w, lam, eps, h: int, pairs) -> ExpandedDAG:
    lam, eps = as_fraction(lam), as_fraction(eps)
    if lam <= 0:
        raise InvalidInstance("lambda must be positive")
    q = eps * lam / h
    xmax = frac_floor((1 + 2 * eps) * lam / q)
    kappa = (h + 1) * (frac_floor((1 + 2 * eps) / (eps / h)) + 1)
    step = {e: frac_ceil(as_fraction(w[e]) / q) for e in g.edges}
    ids, states = {}, []
    buckets = defaultdict(list)

    def state(key):
        i = ids.get(key)
        if i is None:
            i = ids[key] = len(states)
            states.append(key)
            buckets[key[1]].append(i)
        return i

    for S, _ in pairs:
        for s in S:
            state((s, 0, 0))
    tail, head, base = [], [], []
    for x in range(xmax + 1):
        bucket = buckets.get(x, [])
        i = 0
        while i < len(bucket):
            sid = bucket[i]
            v, _, ln = states[sid]
            for y in g.successors(v):
                e = (v, y)
                x2, l2 = x + step[e], ln + g.length[e]
                if x2 <= xmax and l2 <= h:
                    tail.append(sid)
                    head.append(state((y, x2, l2)))
                    base.append(e)
            i += 1
    # keep what can still reach some sink copy
    all_sinks = set().union(*(set(T) for _, T in pairs))
    alive = [states[i][0] in all_sinks for i in range(len(states))]
    order = sorted(range(len(tail)), key=lambda a: -states[tail[a]][1])
    for a in order:
        if alive[head[a]]:
            alive[tail[a]] = True
    keep = [i for i in range(len(states)) if alive[i]]
    remap = {old: new for new, old in enumerate(keep)}
    arcs = sorted((a for a in range(len(tail)) if alive[tail[a]] and alive[head[a]]),
                  key=lambda a: (states[tail[a]][1], a))
    new_states = [states[i] for i in keep]
    dag = ExpandedDAG(
        states=new_states,
        tail=[remap[tail[a]] for a in arcs],
        head=[remap[head[a]] for a in arcs],
        base=[base[a] for a in arcs],
        sources=[[remap[ids[(s, 0, 0)]] for s in S if alive[ids[(s, 0, 0)]]] for S, _ in pairs],
        sinks=[{i for i, st in enumerate(new_states) if st[0] in set(T)} for _, T in pairs],
        q=q, xmax=xmax, kappa=kappa,
    )
    depth = [0] * len(new_states)
    for t, hd in zip(dag.tail, dag.head):
        if depth[t] + 1 > depth[hd]:
            depth[hd] = depth[t] + 1
    dag.depth = max(depth, default=0)
    return dag


# path counts and blocking flows ------------------------------------------------------


def path_counts(dag: ExpandedDAG, cap, unit: int, shift: int, com: int):
    """Fixed-point path counts for one commodity.

    Capacities are integers in units of 1/unit. Returns (cin, cout) with
    cin[v] = 2^shift * sum over source-v paths of the product of
    capacities, and cout likewise for v-sink paths. `shift` must cover
    unit^(depth+1) so that all divisions are exact.
    """
    one = 1 << shift
    nst = len(dag.states)
    cin, cout = [0] * nst, [0] * nst
    for s in dag.sources[com]:
        cin[s] = one
    tail, head = dag.tail, dag.head
    for a in range(len(tail)):
        c = cin[tail[a]]
        if c and cap[a]:
            cin[head[a]] += c * cap[a] // unit
    sinks = dag.sinks[com]
    for v in sinks:
        cout[v] = one
    for a in range(len(tail) - 1, -1, -1):
        c = cout[head[a]]
        if c and cap[a]:
            cout[tail[a]] += c * cap[a] // unit
    return cin, cout


def path_count_flow(dag: ExpandedDAG, cap, unit: int):
    """Conserved path-count flow, as numerators over a common denominator.

    Each source-sink path P gets weight prod U'(e), and the flow is
    F_i(e) = U'(e) c_in(u, i) c_out(v, i) / max_e sum_i c_in c_out, which
    is feasible and puts at least U'(e)/2 on every arc whose normalized
    count is at least half the maximum. Returns (nums, den) with
    F_i(a) = nums[i][a] / den, or None when no path with positive
    capacity remains.
    """
    k = len(dag.sources)
    shift = (unit.bit_length() - 1) * (dag.depth + 1)
    counts = [path_counts(dag, cap, unit, shift, i) for i in range(k)]
    tail, head = dag.tail, dag.head
    best = 0
    for a in range(len(tail)):
        if cap[a]:
            r = sum(cin[tail[a]] * cout[head[a]] for cin, cout in counts)
            if r > best:
                best = r
    if best == 0:
        return None
    nums = [[cap[a] * cin[tail[a]] * cout[head[a]] for a in range(len(tail))] for cin, cout in counts]
    return nums, best * unit


def blocking_flow(dag: ExpandedDAG, capacity, alpha=Fraction(1, 2)):
    """alpha-blocking flow in the DAG, as integers in units of 1/(2 mu).

    Returns (flows, two_mu): flows[i][a] is commodity i's flow on arc a.
    Each round routes the path-count flow rounded to 1/mu and halved;
    arcs whose residual capacity drops to 1 - alpha are removed.
    """
    alpha = as_fraction(alpha)
    k = len(dag.sources)
    mu = next_power_of_two(Fraction(4 * k) / (1 - alpha))
    two_mu = 2 * mu
    narcs = len(dag.tail)
    cap = [two_mu * capacity[dag.base[a]] for a in range(narcs)]
    limit = (1 - alpha) * two_mu
    flows = [[0] * narcs for _ in range(k)]
    rounds = 0
    while True:
        pc = path_count_flow(dag, cap, two_mu)
        if pc is None:
            break
        rounds += 1
        nums, den = pc
        # mu * F~ has numerators nums over den / mu
        den_mu = den // mu
        used = [0] * narcs
        for i in range(k):
            r = _round_commodity(dag, i, nums[i], den_mu)
            fi = flows[i]
            for a, x in r.items():
                fi[a] += x
                used[a] += x
        for a in range(narcs):
            if used[a]:
                if used[a] > cap[a]:
                    raise AssertionError("blocking round exceeded residual capacity")
                cap[a] -= used[a]
            if cap[a] and cap[a] <= limit:
                cap[a] = 0
    return flows, two_mu, rounds


def _round_commodity(dag: ExpandedDAG, i: int, nums, den):
    arcs, vals, idx = [], [], []
    net = defaultdict(int)
    for a, x in enumerate(nums):
        if x:
            t, h = dag.tail[a], dag.head[a]
            arcs.append((t, h))
            vals.append(x)
            idx.append(a)
            net[t] += x
            net[h] -= x
    if not arcs:
        return {}
    total = 0
    for v, x in net.items():
        if x > 0:
            arcs.append((-1, v))
            vals.append(x)
            total += x
        elif x < 0:
            arcs.append((v, -2))
            vals.append(-x)
    ret = len(arcs)
    arcs.append((-2, -1))
    vals.append(total)
    r = round_circulation(arcs, vals, den, prefer=ret)
    return {a: r[j] for j, a in enumerate(idx) if r[j]}


@dataclass
class BlockerResult:
    flow: PathFlow
    loads: dict
    kappa: int
    rho: Fraction
    rounds: int
    dag_size: tuple


def path_blocker(g: Graph, w, lam, eps, h: int, pairs, scale: str = "measured") -> BlockerResult:
    """Flow on h-length, (1+2eps)lam-light walks blocking the (1+eps)lam-light paths.

    The DAG blocking flow is projected back to G. Dividing it by the
    number of copies kappa makes it feasible; by default it is divided by
    the measured copy load instead, which is never larger than kappa.
    """
    pairs = _check_pairs(g, pairs)
    dag = build_expanded_dag(g, w, lam, eps, h, pairs)
    flows, two_mu, rounds = blocking_flow(dag, g.capacity)
    load = defaultdict(int)
    for fi in flows:
        for a, x in enumerate(fi):
            if x:
                load[dag.base[a]] += x
    if not load:
        return BlockerResult(PathFlow(), {}, dag.kappa, Fraction(0), rounds, dag.size)
    rho = max(Fraction(x, two_mu * g.capacity[e]) for e, x in load.items())
    if scale == "kappa":
        div = Fraction(dag.kappa)
    elif scale == "measured":
        div = rho
    else:
        raise ValueError(f"unknown blocker scale {scale!r}")
    items = []
    for i, fi in enumerate(flows):
        arcmap = {(dag.tail[a], dag.head[a]): x for a, x in enumerate(fi) if x}
        for path, val in decompose_acyclic(arcmap):
            walk = tuple(dag.states[s][0] for s in path)
            items.append((i, walk, val / (two_mu * div)))
    loads = {e: Fraction(x, two_mu) / div for e, x in load.items()}
    return BlockerResult(PathFlow.from_items(items), loads, dag.kappa, rho, rounds, dag.size)


# dual certificates ---------------------------------------------------------------------


def _length_table(g: Graph, w, h: int, starts, forward: bool):
    """tab[v][L]: least weight of a walk between `starts` and v of length <= L."""
    tab = {v: [INF] * (h + 1) for v in g.vertices}
    for s in starts:
        tab[s] = [0] * (h + 1)
    arcs = [(e, e[0], e[1]) if forward else (e, e[1], e[0]) for e in g.edges]
    zero_arcs = [t for t in arcs if g.length[t[0]] == 0]
    for L in range(h + 1):
        for e, a, b in arcs:
            ln = g.length[e]
            if ln and ln <= L:
                c = tab[a][L - ln] + w[e]
                if c < tab[b][L]:
                    tab[b][L] = c
        if L:
            for v in g.vertices:
                if tab[v][L - 1] < tab[v][L]:
                    tab[v][L] = tab[v][L - 1]
        changed = bool(zero_arcs)
        while changed:
            changed = False
            for e, a, b in zero_arcs:
                c = tab[a][L] + w[e]
                if c < tab[b][L]:
                    tab[b][L] = c
                    changed = True
    return tab


def _through(g, e, h, tables, w):
    """Least weight of an h-length terminal walk through arc e."""
    u, v = e
    ln = g.length[e]
    best = INF
    for fwd, bwd in tables:
        fu, bv = fwd[u], bwd[v]
        for l1 in range(h - ln + 1):
            c = fu[l1] + bv[h - ln - l1]
            if c < best:
                best = c
    return best if best == INF else best + w[e]


def _hop_lengths(g: Graph, starts, forward: bool):
    """Least length of a walk between `starts` and each vertex."""
    adj = defaultdict(list)
    for e in g.edges:
        a, b = e if forward else (e[1], e[0])
        adj[a].append((b, g.length[e]))
    dist = {s: 0 for s in starts}
    tie = count()
    heap = [(0, next(tie), s) for s in dist]
    while heap:
        d, _, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for x, ln in adj[v]:
            if d + ln < dist.get(x, INF):
                dist[x] = d + ln
                heapq.heappush(heap, (d + ln, next(tie), x))
    return dist


def useful_edges(g: Graph, h: int, pairs) -> set:
    """Arcs that lie on some h-length walk from S_i to T_i."""
    out = set()
    for S, T in pairs:
        fwd, bwd = _hop_lengths(g, S, True), _hop_lengths(g, T, False)
        for e in g.edges:
            if fwd.get(e[0], INF) + g.length[e] + bwd.get(e[1], INF) <= h:
                out.add(e)
    return out


def tighten_dual(g: Graph, w, h: int, pairs, threshold=1, useful=None) -> dict:
    """Lower arc weights one at a time while every h-length path keeps weight >= threshold.

    `w` must already be feasible. Arcs are visited by decreasing w(e)U(e);
    each drops by the slack of the lightest h-length path through it.
    Returns the tightened weights divided by `threshold`.
    """
    threshold = as_fraction(threshold)
    if useful is None:
        useful = useful_edges(g, h, pairs)
    den = math.lcm(threshold.denominator, *(as_fraction(w[e]).denominator for e in useful))
    iw = {e: int(as_fraction(w[e]) * den) if e in useful else 0 for e in g.edges}
    bound = int(threshold * den)
    index = {e: i for i, e in enumerate(g.edges)}
    order = sorted(useful, key=lambda e: (-iw[e] * g.capacity[e], index[e]))
    tables = None
    for e in order:
        if iw[e] == 0:
            continue
        if tables is None:
            tables = [(_length_table(g, iw, h, S, True), _length_table(g, iw, h, T, False))
                      for S, T in pairs]
        through = _through(g, e, h, tables, iw)
        if through == INF:
            iw[e] = 0
        elif through > bound:
            iw[e] -= min(iw[e], through - bound)
            tables = None
    return {e: Fraction(x, bound) for e, x in iw.items()}


# multiplicative weights --------------------------------------------------------------


@dataclass
class MaxflowConfig:
    eps_start: Fraction | None = None  # first internal precision (default eps/2)
    eps_floor_divisor: int = 100       # internal precision never below eps/100
    bits: int = 60                     # dyadic precision of weights
    early_stop: bool = True
    iteration_factor: int = 4          # cap = factor * h^3 log n / eps^3 per phase
    blocker_scale: str = "measured"
    tighten_ratio: Fraction = Fraction(2)  # try exact dual tightening below this gap


@dataclass
class MaxflowResult:
    flow: PathFlow
    value: Fraction
    dual: dict
    dual_value: Fraction
    certified: bool
    eps: Fraction
    stats: dict = field(default_factory=dict)

    @property
    def gap(self):
        if self.value == 0:
            return Fraction(1) if self.dual_value == 0 else INF
        return self.dual_value / self.value


def _scaled_to_capacity(g: Graph, paths: dict):
    loads = defaultdict(Fraction)
    for (_, p), v in paths.items():
        for e in zip(p, p[1:]):
            loads[e] += v
    cong = max((x / g.capacity[e] for e, x in loads.items()), default=Fraction(0))
    return cong


def lc_mc_maxflow(g: Graph, pairs: Sequence, h: int, eps, config: MaxflowConfig | None = None) -> MaxflowResult:
    """(1+eps)-approximate h-length multi-commodity maxflow between (S_i, T_i).

    Returns a feasible path flow on simple h-length paths together with
    normalized edge weights (every h-length S_i-T_i path weighs at least 1)
    whose capacity-weighted sum is at most (1+eps) times the flow value
    when `certified` is set.
    """
    cfg = config or MaxflowConfig()
    eps = as_fraction(eps)
    if g.mode != EDGE:
        raise InvalidInstance("lc_mc_maxflow needs an edge-weighted digraph")
    if not 0 < eps < 1:
        raise InvalidInstance("eps must lie in (0, 1)")
    if not isinstance(h, int) or h < 1:
        raise InvalidInstance("h must be a positive integer")
    pairs = _check_pairs(g, pairs)
    unit = {e: Fraction(1) for e in g.edges}
    if all(lightest_path_weight(g, unit, h, S, T) == INF for S, T in pairs):
        return MaxflowResult(PathFlow(), Fraction(0), {e: Fraction(0) for e in g.edges},
                             Fraction(0), True, eps, {"iterations": 0, "reason": "no-h-length-path"})
    start = cfg.eps_start if cfg.eps_start is not None else eps / 2
    zeta = max(2, math.ceil(1 / as_fraction(start)))
    floor_zeta = math.ceil(cfg.eps_floor_divisor / eps)
    best = None
    attempts = []
    while True:
        res = _mwu(g, pairs, h, Fraction(1, zeta), eps, cfg)
        attempts.append({"eps_internal": f"1/{zeta}", "certified": res.certified,
                         "iterations": res.stats["iterations"]})
        if best is None or res.gap < best.gap:
            best = res
        if res.certified or zeta >= floor_zeta or not cfg.early_stop:
            break
        zeta = min(2 * zeta, floor_zeta)
    best.stats["attempts"] = attempts
    return best


def _mwu(g, pairs, h, eps_i, eps_target, cfg: MaxflowConfig) -> MaxflowResult:
    m = max(g.m, 2)
    zeta = int(1 / eps_i)
    scale = Fraction(m) ** zeta
    w = {e: dyadic_up(1 / (scale * g.capacity[e]), cfg.bits) for e in g.edges}
    lam = dyadic_down(1 / scale, cfg.bits)
    grow = 1 + eps_i
    acc = defaultdict(Fraction)
    n = max(g.n, 2)
    cap_iter = max(1, math.ceil(cfg.iteration_factor * h ** 3 * math.log(n) * zeta ** 3))
    best_dual, best_w = INF, None
    primal = Fraction(0)
    useful = useful_edges(g, h, pairs)
    iters = phases = 0
    certified = False
    tries = [0]

    def lightest():
        return min(lightest_path_weight(g, w, h, S, T) for S, T in pairs)

    def certificate(d, tighten=False):
        nonlocal best_dual, best_w, primal
        if d == INF:
            return False
        dv = sum((w[e] * g.capacity[e] for e in useful), Fraction(0)) / d
        cand = None
        if dv < best_dual:
            cand = {e: (w[e] / d if e in useful else Fraction(0)) for e in g.edges}
            best_dual, best_w = dv, cand
        merged = _simplified(acc)
        cong = _scaled_to_capacity(g, merged)
        if cong > 0:
            primal = sum(merged.values(), Fraction(0)) / cong
        if best_dual <= (1 + eps_target) * primal:
            return True
        if tighten or dv <= cfg.tighten_ratio * (1 + eps_target) * primal:
            tries[0] += 1
            if not tighten and tries[0] & (tries[0] - 1):
                # exact tightening is costly; attempt it on a doubling schedule
                return False
            tw = tighten_dual(g, w, h, pairs, d, useful)
            tv = sum((tw[e] * g.capacity[e] for e in g.edges), Fraction(0))
            if tv < best_dual:
                best_dual, best_w = tv, tw
        return best_dual <= (1 + eps_target) * primal

    d = lightest()
    if d < lam:
        # with capacities above 1 the initial weights can sit below 1/m^zeta
        lam = dyadic_down(d, cfg.bits)
    certificate(d)
    while lam < 1 and not certified:
        while d > grow * lam and lam < 1:
            lam = dyadic_down(lam * grow, cfg.bits)
            phases += 1
        if lam >= 1:
            break
        if d < lam:
            raise AssertionError("lightest path dropped below the phase threshold")
        inner = 0
        while True:
            blk = path_blocker(g, w, lam, eps_i, h, pairs, cfg.blocker_scale)
            if not blk.flow.items:
                break
            iters += 1
            inner += 1
            for com, p, v in blk.flow:
                acc[(com, p)] += v
            for e, x in blk.loads.items():
                w[e] = dyadic_up(w[e] * (1 + eps_i * x / g.capacity[e]), cfg.bits)
            d = lightest()
            if cfg.early_stop and certificate(d):
                certified = True
                break
            if d > grow * lam:
                break
            if inner >= cap_iter:
                cap_iter *= 2
        if certified:
            break
        lam = dyadic_down(lam * grow, cfg.bits)
        phases += 1
    if not certified:
        certificate(d, tighten=True)
    flow = _finalize(g, acc)
    value = flow.value
    certified = value > 0 and best_dual <= (1 + eps_target) * value
    return MaxflowResult(flow, value, best_w, best_dual, certified, eps_target,
                         {"iterations": iters, "phases": phases, "eps_internal": eps_i})


def _simplified(acc):
    merged = defaultdict(Fraction)
    for (com, p), v in acc.items():
        merged[(com, simplify_walk(p))] += v
    return merged


def _finalize(g: Graph, acc) -> PathFlow:
    """Turn accumulated walks into a feasible flow on simple paths."""
    merged = _simplified(acc)
    cong = _scaled_to_capacity(g, merged)
    if cong == 0:
        return PathFlow()
    return PathFlow.from_items((c, p, v / cong) for (c, p), v in merged.items())


def lc_st_maxflow(g: Graph, s, t, h: int, eps=Fraction(1, 3), config=None) -> MaxflowResult:
    return lc_mc_maxflow(g, [({s}, {t})], h, eps, config)
