"""Corpus runner: solve each instance and compare it with its expected optimum.

A corpus directory holds `<name>.lcf` graphs, optional `<name>.dem`
demand/pair files and `<name>.expect.json` sidecars of the form::

    {"command": "lcmaxflow", "args": {"h": 2, "eps": "1/4"}, "opt": "2"}

Instances without a sidecar are skipped with a warning.
"""
from __future__ import annotations

import json
import logging
from fractions import Fraction
from pathlib import Path

from . import io
from ._num import INF, parse_value
from .errors import LCFlowError
from .graph import Demand, flow_stats

log = logging.getLogger(__name__)


def _arg(args, key, default=None):
    x = args.get(key, default)
    return parse_value(x) if isinstance(x, str) else x


def check_instance(g, dem_text, spec, seed=0) -> dict:
    """Run one instance; return {'passed': bool, ...measured values}."""
    cmd, args = spec["command"], spec.get("args", {})
    opt = parse_value(spec["opt"]) if "opt" in spec else None
    eps = Fraction(_arg(args, "eps", Fraction(1, 4)))
    if cmd == "lcmaxflow":
        from .maxflow import lc_mc_maxflow
        res = lc_mc_maxflow(g, io.parse_pairs(dem_text), int(args["h"]), eps)
        ok = opt / (1 + eps) <= res.value <= opt and res.dual_value <= (1 + eps) * res.value \
            if opt else res.value == 0
        return {"passed": ok, "value": res.value, "dual": res.dual_value, "opt": opt}
    if cmd in ("mincost-concurrent", "mincost-nonconcurrent"):
        from .boosting import MincostProblem, solve_mincost
        mode = "concurrent" if cmd == "mincost-concurrent" else "non-concurrent"
        d = io.parse_demand(dem_text)
        if mode == "non-concurrent":
            d = Demand({p: 1 for p in d})
        res = solve_mincost(MincostProblem(g, d, mode, _arg(args, "budget", INF)), eps,
                            oracle=args.get("oracle", "mtl"), lowstep_eps=_arg(args, "lowstep_eps"))
        got = res.lam if mode == "concurrent" else res.value
        ok = (1 - 10 * eps) / (1 + eps / 100) * opt <= got <= opt
        return {"passed": ok, "lambda": got, "opt": opt}
    if cmd in ("lowstep", "mtl"):
        from .lowstep import approx_mtl_flow, lowstep_directed, lowstep_undirected
        d = io.parse_demand(dem_text)
        tau = Fraction(1) if args.get("tau", "one") == "one" else d.size
        if cmd == "mtl":
            res = approx_mtl_flow(g, d, tau, eps, eps_prime=_arg(args, "eps_prime"))
            totlen, bound = flow_stats(res.paths, g).totlen, (1 + eps) * opt
        elif g.mode == "vertex":
            res = lowstep_undirected(g, d, int(args["t"]), tau, eps)
            totlen, bound = flow_stats(res.flow, g).totlen, (1 + eps) ** 5 * opt
        else:
            res = lowstep_directed(g, d, int(args["t"]), tau, eps)
            totlen, bound = flow_stats(res.flow, g).totlen, (1 + eps) ** 4 * opt
        return {"passed": totlen <= bound, "totlen": totlen, "opt": opt}
    if cmd == "cover":
        from .covers import build_cover, verify_cover
        cover = build_cover(g, _arg(args, "h_cov"), _arg(args, "beta", 4), seed=seed)
        problems = verify_cover(g, cover)
        return {"passed": not problems, "width": cover.width}
    raise LCFlowError(f"unknown suite command {cmd!r}", code="bad-sidecar")


def run_suite(corpus, seed: int = 0) -> dict:
    corpus = Path(corpus)
    results, skipped = [], []
    for gpath in sorted(corpus.glob("*.lcf")):
        name = gpath.stem
        side = corpus / f"{name}.expect.json"
        if not side.exists():
            log.warning("no sidecar for %s; skipped", name)
            skipped.append(name)
            continue
        spec = json.loads(side.read_text())
        dpath = corpus / f"{name}.dem"
        try:
            g = io.parse_graph(gpath.read_text())
            out = check_instance(g, dpath.read_text() if dpath.exists() else "", spec, seed)
        except LCFlowError as exc:
            out = {"passed": False, "error": str(exc)}
        results.append({"instance": name, "command": spec.get("command"), **out})
    failed = sum(not r["passed"] for r in results)
    return {"instances": results, "skipped": skipped,
            "summary": {"total": len(results), "passed": len(results) - failed, "failed": failed}}
