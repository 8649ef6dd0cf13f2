"""Command-line front end. Every command prints one JSON document."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from . import io
from ._num import INF, fmt, parse_value
from .errors import LCFlowError
from .graph import EDGE, VERTEX, Demand, flow_stats

log = logging.getLogger(__name__)


def _rat(s):
    try:
        return parse_value(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {s!r}") from None


def _seed(args) -> int:
    env = os.environ.get("LCFLOW_SEED")
    return int(env) if env else args.seed


def _tau(mode, d: Demand):
    return Fraction(1) if mode == "one" else d.size


# commands ----------------------------------------------------------------------------


def _pairs(path):
    """Source/sink sets plus the file's commodity id for each index."""
    text = io.read(path)
    return io.parse_pairs(text), dict(enumerate(sorted(io.parse_commodities(text))))


def cmd_lcmaxflow(g, args) -> dict:
    from .maxflow import lc_mc_maxflow
    pairs, names = _pairs(args.pairs)
    res = lc_mc_maxflow(g, pairs, args.h, args.eps)
    return {
        "flow": io.flow_json(res.flow, names),
        "cut": {f"{a}->{b}": fmt(x) for (a, b), x in sorted(res.dual.items()) if x},
        "certificate": {"value": res.value, "dual_value": res.dual_value, "gap": res.gap,
                        "certified": res.certified, "iterations": res.stats.get("iterations", 0)},
        "stats": flow_stats(res.flow, g),
    }


def cmd_lowstep(g, args) -> dict:
    from .lowstep import lowstep_directed, lowstep_undirected
    d = io.parse_demand(io.read(args.demand))
    tau = _tau(args.tau, d)
    if g.mode == VERTEX:
        res = lowstep_undirected(g, d, args.t, tau, args.eps, strict=args.strict)
    else:
        res = lowstep_directed(g, d, args.t, tau, args.eps, strict=args.strict)
    return {
        "flow": io.flow_json(res.flow),
        "stats": flow_stats(res.flow, g),
        "buckets": [{k: r[k] for k in ("p", "h_p", "value", "totlen", "calls")} for r in res.buckets],
        "maxflow_calls": res.maxflow_calls,
        "mu": res.mu,
    }


def cmd_mtl(g, args) -> dict:
    from .lowstep import approx_mtl_flow
    d = io.parse_demand(io.read(args.demand))
    res = approx_mtl_flow(g, d, _tau(args.tau, d), args.eps, eps_prime=args.eps_prime)
    return {"flow": io.flow_json(res.flow), "stats": flow_stats(res.paths, g)}


def _mincost(g, args, mode) -> dict:
    from .boosting import MincostProblem, solve_mincost
    d = io.parse_demand(io.read(args.demand))
    if mode == "non-concurrent":
        d = Demand({p: 1 for p in d})
    res = solve_mincost(MincostProblem(g, d, mode, args.budget), args.eps, oracle=args.oracle,
                        lowstep_eps=args.lowstep_eps)
    boost = res.boost
    return {
        "lambda": res.lam,
        "value": res.value,
        "cost": res.cost,
        "flow": io.flow_json(res.flow),
        "oracle_calls": boost.oracle_calls if boost else 0,
        "iterations": sum(r.iterations for r in boost.runs) if boost else 0,
        "exponent": boost.exponent if boost else None,
    }


def cmd_mincost_concurrent(g, args) -> dict:
    return _mincost(g, args, "concurrent")


def cmd_mincost_nonconcurrent(g, args) -> dict:
    return _mincost(g, args, "non-concurrent")


def cmd_cover(g, args) -> dict:
    from .covers import build_cover, verify_cover
    cover = build_cover(g, args.h_cov, args.beta, seed=_seed(args))
    problems = verify_cover(g, cover)
    return {
        "h_cov": cover.h_cov, "h_diam": cover.h_diam, "width": cover.width,
        "clusterings": [sorted(sorted(c) for c in cl) for cl in cover.clusterings],
        "valid": not problems,
    }


def cmd_cuts(g, args) -> dict:
    from .cuts import verify_union_witness
    w, a, h, s = io.witness_from_json(json.loads(io.read(args.witness)))
    rep = verify_union_witness(g, a, w, h, s, c=args.c)
    return {
        "checks": {k: {"passed": ok, "detail": repr(detail)} for k, (ok, detail) in rep.checks.items()},
        "ok": rep.ok,
        "alpha": rep.alpha,
        "measured": rep.measured,
        "bound": rep.bound,
        "spg": rep.spg.ok,
        "witness_problems": [repr(p) for p in rep.witness_problems],
        "matching_dispersed_demand": {f"{u}->{v}": fmt(x) for (u, v), x in sorted(rep.demand.items())},
    }


def cmd_oracle(g, args) -> dict:
    from . import oracle
    if args.problem == "lcmaxflow":
        pairs, names = _pairs(args.pairs)
        ex = oracle.exact_lc_maxflow(g, pairs, args.h)
        return {"value": ex.value, "flow": io.flow_json(ex.flow, names)}
    d = io.parse_demand(io.read(args.demand))
    if args.problem in ("lowstep", "mtl"):
        t = args.t if args.problem == "lowstep" else max(g.n - 1, 1)
        ex = oracle.exact_min_totlen(g, d, _tau(args.tau, d), t)
        return {"totlen": ex.value, "flow": io.flow_json(ex.flow)}
    mode = "concurrent" if args.problem == "mincost-concurrent" else "non-concurrent"
    costs = dict(g.length)
    ex = oracle.exact_mincost_lambda(g, d, costs, args.budget, mode)
    return {"lambda": ex.value, "flow": io.flow_json(ex.flow)}


def cmd_suite(args) -> tuple:
    from .suite import run_suite
    report = run_suite(args.corpus, seed=_seed(args))
    return report, 0 if report["summary"]["failed"] == 0 else 1


# parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lcflow", description="Length-constrained flow solvers.")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized parts (LCFLOW_SEED wins)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("graph", help="graph file")
        return sp

    sp = graph_cmd("lcmaxflow", "approximate h-length multi-commodity maxflow")
    sp.add_argument("--pairs", required=True)
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--eps", type=_rat, default=Fraction(1, 4))

    sp = graph_cmd("lowstep", "greedy low-step flow of small total length")
    sp.add_argument("--demand", required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--tau", choices=("one", "full"), default="one")
    sp.add_argument("--eps", type=_rat, default=Fraction(1, 4))
    sp.add_argument("--strict", action="store_true", help="enforce eps >= 10/n")

    sp = graph_cmd("mtl", "near-minimum total length flow")
    sp.add_argument("--demand", required=True)
    sp.add_argument("--tau", choices=("one", "full"), default="one")
    sp.add_argument("--eps", type=_rat, default=Fraction(1, 4))
    sp.add_argument("--eps-prime", type=_rat, default=None)

    for name in ("mincost-concurrent", "mincost-nonconcurrent"):
        sp = graph_cmd(name, f"{name.split('-')[1]} flow under a cost budget")
        sp.add_argument("--demand", required=True)
        sp.add_argument("--budget", type=_rat, default=INF)
        sp.add_argument("--eps", type=_rat, default=Fraction(1, 20))
        sp.add_argument("--oracle", choices=("mtl", "exact"), default="mtl")
        sp.add_argument("--lowstep-eps", type=_rat, default=None)

    sp = graph_cmd("cover", "neighborhood cover by ball carving")
    sp.add_argument("--h-cov", type=_rat, required=True)
    sp.add_argument("--beta", type=_rat, default=Fraction(4))

    sp = sub.add_parser("cuts", help="moving cut tools")
    csub = sp.add_subparsers(dest="cuts_command", required=True)
    vp = csub.add_parser("verify-union", help="check a union-of-cuts witness bundle")
    vp.add_argument("graph")
    vp.add_argument("--witness", required=True)
    vp.add_argument("--c", type=float, default=4.0)

    sp = graph_cmd("oracle", "exact reference solution for small instances")
    sp.add_argument("--problem", required=True, choices=("lcmaxflow", "lowstep", "mtl",
                                                         "mincost-concurrent", "mincost-nonconcurrent"))
    sp.add_argument("--pairs")
    sp.add_argument("--demand")
    sp.add_argument("--h", type=int)
    sp.add_argument("--t", type=int)
    sp.add_argument("--tau", choices=("one", "full"), default="one")
    sp.add_argument("--budget", type=_rat, default=INF)

    sp = sub.add_parser("suite", help="run a corpus of instances with expected results")
    sp.add_argument("corpus")
    return p


COMMANDS = {
    "lcmaxflow": (cmd_lcmaxflow, EDGE),
    "lowstep": (cmd_lowstep, None),
    "mtl": (cmd_mtl, VERTEX),
    "mincost-concurrent": (cmd_mincost_concurrent, VERTEX),
    "mincost-nonconcurrent": (cmd_mincost_nonconcurrent, VERTEX),
    "cover": (cmd_cover, VERTEX),
    "cuts": (cmd_cuts, None),
    "oracle": (cmd_oracle, None),
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "suite":
            report, code = cmd_suite(args)
        else:
            fn, mode = COMMANDS[args.command]
            g = io.parse_graph(io.read(args.graph))
            if mode is not None and g.mode != mode:
                raise LCFlowError(f"{args.command} needs a {mode}-weighted graph", code="wrong-mode")
            report, code = fn(g, args), 0
    except LCFlowError as exc:
        print(io.dumps({"error": exc.code, "message": str(exc)}), end="", file=sys.stderr)
        return 2
    except OSError as exc:
        print(io.dumps({"error": "io", "message": str(exc)}), end="", file=sys.stderr)
        return 2
    sys.stdout.write(io.dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
