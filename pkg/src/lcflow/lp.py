"""Exact rational linear programming (two-phase simplex on sparse rows).

Used as an independent oracle for small instances. Entering columns are
chosen by largest reduced cost; after a run of degenerate pivots the
method falls back to Bland's rule, which cannot cycle.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._num import as_fraction


@dataclass
class LPResult:
    status: str          # "optimal", "infeasible" or "unbounded"
    value: Fraction | None
    x: list | None


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols):
        self.rows, self.rhs, self.basis, self.ncols = rows, rhs, basis, ncols

    def pivot(self, r, j, obj):
        row = self.rows[r]
        piv = row[j]
        if piv != 1:
            inv = 1 / piv
            for k in row:
                row[k] *= inv
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            coef = other.get(j)
            if coef:
                for k, v in row.items():
                    nv = other.get(k, 0) - coef * v
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
                self.rhs[i] -= coef * self.rhs[r]
        coef = obj[0].get(j)
        if coef:
            for k, v in row.items():
                nv = obj[0].get(k, 0) - coef * v
                if nv:
                    obj[0][k] = nv
                else:
                    obj[0].pop(k, None)
            obj[1] += coef * self.rhs[r]
        self.basis[r] = j

    def run(self, obj, allowed):
        degenerate = 0
        while True:
            cand = [(v, k) for k, v in obj[0].items() if v > 0 and allowed(k)]
            if not cand:
                return "optimal"
            if degenerate > 50:
                j = min(k for _, k in cand)
            else:
                j = max(cand, key=lambda t: (t[0], -t[1]))[1]
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(j)
                if a and a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded"
            degenerate = degenerate + 1 if best[0][0] == 0 else 0
            self.pivot(best[1], j, obj)


def linprog(c, le=(), ge=(), eq=(), nvars=None) -> LPResult:
    """Maximize c.x subject to row constraints and x >= 0.

    `c` is a dict or list over variables 0..n-1; `le`, `ge`, `eq` are lists
    of (row_dict, rhs) pairs.
    """
    if not isinstance(c, dict):
        c = {i: v for i, v in enumerate(c) if v}
    c = {k: as_fraction(v) for k, v in c.items()}
    cons = [(dict(r), as_fraction(b), "le") for r, b in le]
    cons += [(dict(r), as_fraction(b), "ge") for r, b in ge]
    cons += [(dict(r), as_fraction(b), "eq") for r, b in eq]
    n = nvars if nvars is not None else 1 + max(
        [*c.keys(), *(k for r, _, _ in cons for k in r)], default=-1)
    rows, rhs, basis, art = [], [], [], []
    col = n
    for r, b, kind in cons:
        r = {k: as_fraction(v) for k, v in r.items() if v}
        if b < 0:
            r = {k: -v for k, v in r.items()}
            b = -b
            kind = {"le": "ge", "ge": "le", "eq": "eq"}[kind]
        if kind == "le":
            r[col] = Fraction(1)
            basis.append(col)
            col += 1
        else:
            if kind == "ge":
                r[col] = Fraction(-1)
                col += 1
            r[col] = Fraction(1)
            basis.append(col)
            art.append(col)
            col += 1
        rows.append(r)
        rhs.append(b)
    tab = _Tableau(rows, rhs, basis, col)
    artset = set(art)
    if art:
        obj = [{}, Fraction(0)]
        for i, r in enumerate(rows):
            if basis[i] in artset:
                for k, v in r.items():
                    if k not in artset:
                        obj[0][k] = obj[0].get(k, 0) + v
                obj[1] -= rhs[i]
        obj[0] = {k: v for k, v in obj[0].items() if v}
        tab.run(obj, lambda k: k not in artset)
        if obj[1] != 0:
            return LPResult("infeasible", None, None)
        for i in range(len(rows) - 1, -1, -1):
            if basis[i] in artset:
                j = next((k for k, v in rows[i].items() if v and k not in artset), None)
                if j is None:
                    del rows[i], rhs[i], basis[i]
                else:
                    tab.pivot(i, j, [{}, Fraction(0)])
        for r in rows:
            for a in art:
                r.pop(a, None)
    obj = [dict(c), Fraction(0)]
    for i, r in enumerate(rows):
        cb = c.get(basis[i])
        if cb:
            for k, v in r.items():
                nv = obj[0].get(k, 0) - cb * v
                if nv:
                    obj[0][k] = nv
                else:
                    obj[0].pop(k, None)
            obj[1] += cb * rhs[i]
    status = tab.run(obj, lambda k: k not in artset)
    if status == "unbounded":
        return LPResult("unbounded", None, None)
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = rhs[i]
    value = sum((c.get(k, 0) * x[k] for k in range(n)), Fraction(0))
    return LPResult("optimal", value, x)
