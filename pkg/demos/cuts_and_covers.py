"""Moving cuts, a union of cuts, and a neighborhood cover on a path of cliques.

A moving cut raises vertex lengths. It separates a pair if the pair was
within distance h before and is more than h*s apart afterwards. The graph
is three triangles joined by bridge vertices. Cutting the two bridges one
after the other gives a cut sequence, each cut witnessed by a demand it
separates. A greedy random sequence on the same graph follows. The union check then sums the cuts
and confirms one combined demand that they jointly separate, at a
sparsity within the stated bound. Finally the same graph gets a seeded
neighborhood cover: clusterings whose clusters have bounded diameter and
together contain every small ball.
"""
import random

from lcflow import CutSequenceWitness, MovingCut, build_cover, verify_cover, verify_union_witness
from lcflow.instances import path_of_cliques, sequential_cut_witness


def show(g, a, witness, h, s):
    for i, (cut, d, phi) in enumerate(zip(witness.cuts, witness.demands, witness.sparsities)):
        pairs = ", ".join(f"{u}-{v}" for u, v in d)
        raised = ", ".join(f"{v} by {x}" for v, x in cut.values.items())
        print(f"  cut {i}: raises vertex {raised}, separates {pairs}, sparsity {phi}")
    report = verify_union_witness(g, a, witness, h, s)
    print(f"  union: {len(report.demand)} pairs in the combined demand, {report.alpha} forests")
    for name, (passed, detail) in report.checks.items():
        print(f"    {name:<14} {'ok' if passed else 'FAILED'}" + ("" if passed else f" ({detail})"))
    print(f"    measured sparsity {float(report.measured):.3f} vs bound {report.bound:.1f}")


g = path_of_cliques(3, 3)  # triangles {0,1,2}, {3,4,5}, {6,7,8}
h, s = 3, 3

print("bridge cuts")
bridges = CutSequenceWitness([MovingCut(h * s, {2: 1}), MovingCut(h * s, {5: 1})],
                             [{(1, 3): 1, (3, 1): 1}, {(4, 6): 1, (6, 4): 1}], [1, 1])
show(g, {v: 1 for v in g.vertices}, bridges, h, s)

print("greedy cuts")
a = {v: 2 for v in g.vertices}
show(g, a, sequential_cut_witness(g, a, h, s, random.Random(7)), h, s)

cover = build_cover(g, 3, 3, seed=1)
print(f"cover: width {cover.width}, {len(cover.clusters)} clusters, diameter bound {cover.h_diam}")
print("  problems:", verify_cover(g, cover) or "none")
