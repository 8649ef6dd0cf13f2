"""How much flow fits on short paths?

A directed graph offers s two routes to t: a short one (s->a->t, length 2)
and a long one (s->t directly, length 3). With a length budget h = 2 only
the short route counts, with h = 3 both do. The approximate solver returns
a flow together with a dual certificate: edge weights under which every
h-length path weighs at least 1. Their capacity-weighted sum bounds the
optimum from above, so the printed gap is a guarantee, not an estimate.
"""
from fractions import Fraction

from lcflow import Graph, lc_mc_maxflow
from lcflow.oracle import exact_lc_maxflow

g = Graph.edge_weighted(
    [("s", "t"), ("s", "a"), ("a", "t")],
    length={("s", "t"): 3, ("s", "a"): 1, ("a", "t"): 1},
    capacity={("s", "t"): 2, ("s", "a"): 1, ("a", "t"): 1},
)
pairs = [(["s"], ["t"])]
eps = Fraction(1, 10)

for h in (2, 3):
    res = lc_mc_maxflow(g, pairs, h, eps)
    opt = exact_lc_maxflow(g, pairs, h).value
    print(f"h = {h}")
    print(f"  exact optimum      {opt}")
    print(f"  approximate value  {res.value} ({float(res.value):.4f})")
    print(f"  dual bound         {res.dual_value} ({float(res.dual_value):.4f})")
    print(f"  certified gap      {float(res.gap):.4f} <= 1 + eps = {float(1 + eps)}")
    for pair, path, x in res.flow.items:
        print(f"  path {'->'.join(map(str, path))}: {float(x):.4f}")
