"""Concurrent flow under a cost budget.

One unit of demand from s to t can go through a (capacity 1, cost 1 per
unit) or through b (capacity 9, cost 5 per unit). With budget 4 the best
uniform scaling is lam* = 8/5: a full unit through a, then 3/5 through b
at cost 3. The solver reaches this with multiplicative weights over an
approximate min-total-length oracle and never exceeds capacity or budget.
"""
from fractions import Fraction

from lcflow import Graph, concurrent_flow
from lcflow.oracle import exact_mincost_lambda

g = Graph.vertex_weighted(
    [("s", "a"), ("a", "t"), ("s", "b"), ("b", "t")],
    capacity={"s": 9, "a": 1, "b": 9, "t": 9},
)
demand = {("s", "t"): 1}
costs = {"a": 1, "b": 5}
eps = Fraction(1, 10)

exact = exact_mincost_lambda(g, demand, costs, budget=4).value
for budget in (2, 4, 100):
    res = concurrent_flow(g, demand, eps, budget=budget, costs=costs)
    best = exact_mincost_lambda(g, demand, costs, budget=budget).value
    loads = res.flow.loads(g)
    print(f"budget {budget:>3}: lam = {float(res.lam):.4f} (exact {best}), cost {float(res.cost):.4f}, "
          f"oracle calls {res.boost.oracle_calls}")
    print("           loads " + ", ".join(f"{v}: {float(x):.3f}/{g.capacity[v]}" for v, x in sorted(loads.items())))
print(f"exact lam* at budget 4 is {exact}")
