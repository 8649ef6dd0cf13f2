"""Text formats and JSON reports.

Graph files::

    p lcf <n> <m> <vertex|edge>
    v <id> <length> <capacity>        vertex mode, one per vertex
    a <u> <v> [<length> <capacity>]   lengths and capacities in edge mode

Demand files hold lines ``d <commodity> <u> <v> <value|inf>`` and cut files
lines ``c <vertex-id> <numerator>/<h>``. Lines starting with ``#`` are
comments, as are ``c`` lines in graph and demand files. Vertex ids are
integers. Every rational is written as ``p/q`` text.
"""
from __future__ import annotations

import json
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

from ._num import INF, fmt, parse_value
from .cuts import CutSequenceWitness, MovingCut
from .errors import ParseError
from .graph import EDGE, VERTEX, Demand, FlowStats, Graph, PathFlow


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _int(tok, no, what, positive=False):
    try:
        x = int(tok)
    except ValueError:
        raise ParseError(f"line {no}: {what} must be an integer, got {tok!r}", line=no) from None
    if positive and x < 1:
        raise ParseError(f"line {no}: {what} must be a positive integer, got {x}", line=no)
    return x


def parse_graph(text: str) -> Graph:
    header = None
    vlines, alines = {}, []
    for no, tok in _lines(text):
        kind = tok[0]
        if kind == "c":
            continue
        if kind == "p":
            if header is not None:
                raise ParseError(f"line {no}: second problem line", line=no)
            if len(tok) != 5 or tok[1] != "lcf" or tok[4] not in (VERTEX, EDGE):
                raise ParseError(f"line {no}: expected 'p lcf <n> <m> <vertex|edge>'", line=no)
            header = (_int(tok[2], no, "n"), _int(tok[3], no, "m"), tok[4])
        elif header is None:
            raise ParseError(f"line {no}: problem line must come first", line=no)
        elif kind == "v":
            if header[2] != VERTEX or len(tok) != 4:
                raise ParseError(f"line {no}: 'v <id> <length> <capacity>' is only valid in vertex mode", line=no)
            v = _int(tok[1], no, "vertex id")
            if v in vlines:
                raise ParseError(f"line {no}: duplicate vertex {v}", line=no)
            vlines[v] = (_int(tok[2], no, "length", True), _int(tok[3], no, "capacity", True))
        elif kind == "a":
            want = 3 if header[2] == VERTEX else 5
            if len(tok) != want:
                raise ParseError(f"line {no}: expected {want} fields on an edge line", line=no)
            u, v = _int(tok[1], no, "vertex id"), _int(tok[2], no, "vertex id")
            extra = ()
            if header[2] == EDGE:
                extra = (_int(tok[3], no, "length", True), _int(tok[4], no, "capacity", True))
            alines.append((no, u, v, extra))
        else:
            raise ParseError(f"line {no}: unknown line type {kind!r}", line=no)
    if header is None:
        raise ParseError("missing problem line")
    n, m, mode = header
    if len(alines) != m:
        raise ParseError(f"header announces {m} edges, found {len(alines)}")
    seen = set()
    for no, u, v, _ in alines:
        if u == v:
            raise ParseError(f"line {no}: self-loop at {u}", line=no)
        key = (u, v) if mode == EDGE else frozenset((u, v))
        if key in seen:
            raise ParseError(f"line {no}: duplicate edge {u} {v}", line=no)
        seen.add(key)
    if mode == VERTEX:
        if len(vlines) != n:
            raise ParseError(f"header announces {n} vertices, found {len(vlines)}")
        vs = tuple(sorted(vlines))
        for no, u, v, _ in alines:
            if u not in vlines or v not in vlines:
                raise ParseError(f"line {no}: edge uses an undeclared vertex", line=no)
        return Graph.vertex_weighted([(u, v) for _, u, v, _ in alines],
                                     {v: vlines[v][0] for v in vs}, {v: vlines[v][1] for v in vs}, vertices=vs)
    vs = set(range(1, n + 1))
    for no, u, v, _ in alines:
        if u not in vs or v not in vs:
            raise ParseError(f"line {no}: vertex ids must lie in 1..{n}", line=no)
    edges = [(u, v) for _, u, v, _ in alines]
    return Graph.edge_weighted(edges, {(u, v): x[0] for _, u, v, x in alines},
                               {(u, v): x[1] for _, u, v, x in alines}, vertices=tuple(range(1, n + 1)))


def write_graph(g: Graph) -> str:
    out = [f"p lcf {g.n} {g.m} {g.mode}"]
    if g.mode == VERTEX:
        out += [f"v {v} {g.length[v]} {g.capacity[v]}" for v in g.vertices]
        out += [f"a {u} {v}" for u, v in g.edges]
    else:
        out += [f"a {u} {v} {g.length[(u, v)]} {g.capacity[(u, v)]}" for u, v in g.edges]
    return "\n".join(out) + "\n"


def parse_commodities(text: str) -> dict:
    """commodity -> {(u, v): value}, in file order."""
    out = defaultdict(dict)
    for no, tok in _lines(text):
        if tok[0] == "c":
            continue
        if tok[0] != "d" or len(tok) != 5:
            raise ParseError(f"line {no}: expected 'd <commodity> <u> <v> <value|inf>'", line=no)
        com = _int(tok[1], no, "commodity")
        u, v = _int(tok[2], no, "vertex id"), _int(tok[3], no, "vertex id")
        try:
            val = parse_value(tok[4])
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"line {no}: bad demand value {tok[4]!r}", line=no) from None
        if val != INF and val < 0:
            raise ParseError(f"line {no}: negative demand", line=no)
        if u == v and val != 0:
            raise ParseError(f"line {no}: D({u},{u}) must be zero", line=no)
        if (u, v) in out[com]:
            raise ParseError(f"line {no}: duplicate pair in commodity {com}", line=no)
        out[com][(u, v)] = val
    return dict(out)


def parse_demand(text: str) -> Demand:
    merged = defaultdict(Fraction)
    for pairs in parse_commodities(text).values():
        for p, x in pairs.items():
            merged[p] = INF if INF in (x, merged[p]) else merged[p] + x
    return Demand(merged)


def parse_pairs(text: str) -> list:
    """Source/sink sets per commodity: S_i collects the u's, T_i the v's."""
    out = []
    for com, pairs in sorted(parse_commodities(text).items()):
        S = tuple(dict.fromkeys(u for u, _ in pairs))
        T = tuple(dict.fromkeys(v for _, v in pairs))
        out.append((S, T))
    return out


def write_demand(d) -> str:
    return "".join(f"d {i + 1} {u} {v} {fmt(x)}\n" for i, ((u, v), x) in enumerate(sorted(Demand(d).items())))


def parse_cut(text: str) -> MovingCut:
    vals, h = {}, None
    for no, tok in _lines(text):
        if tok[0] != "c" or len(tok) != 3 or "/" not in tok[2]:
            raise ParseError(f"line {no}: expected 'c <vertex-id> <numerator>/<h>'", line=no)
        num, den = tok[2].split("/", 1)
        num, den = _int(num, no, "numerator"), _int(den, no, "h", True)
        if h is not None and den != h:
            raise ParseError(f"line {no}: all cut lines must share h = {h}", line=no)
        h = den
        vals[_int(tok[1], no, "vertex id")] = Fraction(num, den)
    return MovingCut(h or 1, vals)


def write_cut(c: MovingCut) -> str:
    return "".join(f"c {x} {c.increase(x)}/{c.h}\n" for x in sorted(c.values))


# JSON ----------------------------------------------------------------------------------


def jsonable(x):
    """Recursively turn rationals into 'p/q' strings and tuples into lists."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) or x == INF:
        return fmt(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, dict):
        return {_key(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in x]
        return sorted(items, key=json.dumps) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, FlowStats):
        return {k: jsonable(getattr(x, k)) for k in ("value", "congestion", "totlen", "length", "step")}
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _key(k):
    if isinstance(k, tuple):
        return "->".join(_key(x) for x in k) if len(k) == 2 else ",".join(map(str, k))
    return str(k)


def flow_json(f, names=None) -> dict:
    """Per-commodity edge maps; commodities are named by their pair or index.

    `names` maps internal commodity indices to the ids used in the input file.
    """
    names = names or {}
    if isinstance(f, PathFlow):
        return {"paths": [{"commodity": _key(c) if isinstance(c, tuple) else str(names.get(c, c)),
                           "path": jsonable(list(p)), "value": fmt(v)} for c, p, v in f.items]}
    flows = {}
    for c in sorted(f.flows, key=repr):
        flows[_key(c) if isinstance(c, tuple) else str(c)] = {
            f"{a}->{b}": fmt(x) for (a, b), x in sorted(f.flows[c].items(), key=repr) if x}
    return flows


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def witness_from_json(data: dict) -> tuple:
    """(witness, A, h, s) from a bundle with cuts, demands, sparsities, weighting."""
    def vid(x):
        return int(x)
    cuts = [MovingCut(int(c["h"]), {vid(k): Fraction(v) for k, v in c["values"].items()})
            for c in data["cuts"]]
    demands = [{(vid(u), vid(v)): Fraction(x) for u, v, x in d} for d in data["demands"]]
    w = CutSequenceWitness(cuts, demands, [Fraction(x) for x in data["sparsities"]])
    a = {vid(k): Fraction(v) for k, v in data["weighting"].items()}
    return w, a, int(data["h"]), int(data["s"])


def witness_to_json(w: CutSequenceWitness, a, h, s) -> dict:
    return {
        "h": h, "s": s,
        "weighting": {str(k): fmt(v) for k, v in sorted(a.items())},
        "cuts": [{"h": c.h, "values": {str(k): fmt(v) for k, v in sorted(c.values.items())}}
                 for c in w.cuts],
        "demands": [[[u, v, fmt(x)] for (u, v), x in sorted(d.items())] for d in w.demands],
        "sparsities": [fmt(x) for x in w.sparsities],
    }


def read(path) -> str:
    return Path(path).read_text()
