"""Exact two-phase simplex over the rationals (Bland's rule).

Solves ``max c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``,
``x >= 0``.  The tableau is kept in integers: every entry is the true value
times a common positive denominator ``D``, and each pivot divides exactly
by the previous ``D`` (integer-preserving Gauss-Jordan).  This avoids the
gcd work of :class:`~fractions.Fraction` arithmetic in the inner loop.
Bland's rule guarantees termination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Literal, Sequence

from .errors import Infeasible, Unbounded
from .graph import as_fraction

Status = Literal["optimal", "infeasible", "unbounded"]


@dataclass
class LinearProgram:
    c: Sequence
    A_ub: Sequence[Sequence] = field(default_factory=list)
    b_ub: Sequence = field(default_factory=list)
    A_eq: Sequence[Sequence] = field(default_factory=list)
    b_eq: Sequence = field(default_factory=list)


@dataclass
class LPResult:
    status: Status
    value: Fraction | None = None
    x: list[Fraction] | None = None
    # duals: y_ub >= 0 and free y_eq with c - y.A <= 0 at the optimum
    y_ub: list[Fraction] | None = None
    y_eq: list[Fraction] | None = None


def _integral(values: Sequence[Fraction]) -> tuple[list[int], int]:
    scale = lcm(1, *(x.denominator for x in values))
    return [int(x * scale) for x in values], scale


class _Tableau:
    def __init__(self, rows: list[list[int]], basis: list[int]):
        self.T = rows              # last entry of each row is the rhs
        self.basis = basis
        self.D = 1
        self.z: list[int] = []     # D * reduced costs; z[-1] unused

    def set_costs(self, cost: Sequence[int]) -> None:
        T, D = self.T, self.D
        ncol = len(T[0]) if T else len(cost) + 1
        z = [D * cost[j] for j in range(ncol - 1)] + [0]
        for r, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb:
                row = T[r]
                z = [a - cb * x for a, x in zip(z, row)]
        # z[j] = D*c_j - sum_r c_B[r] T[r][j] = D * reduced cost
        self.z = z

    def pivot(self, r: int, j: int) -> None:
        T, D = self.T, self.D
        prow = T[r]
        p = prow[j]
        for i, row in enumerate(T):
            if i != r:
                f = row[j]
                T[i] = [(p * a - f * x) // D for a, x in zip(row, prow)] if f else \
                    [(p * a) // D for a in row]
        f = self.z[j]
        self.z = [(p * a - f * x) // D for a, x in zip(self.z, prow)]
        self.D = p
        self.basis[r] = j
        if p < 0:
            self.T = [[-a for a in row] for row in self.T]
            self.z = [-a for a in self.z]
            self.D = -p

    def optimise(self, allowed: int) -> bool:
        """Bland's rule on columns ``< allowed``; False if unbounded."""
        while True:
            z = self.z
            enter = next((j for j in range(allowed) if z[j] > 0), None)
            if enter is None:
                return True
            best = None
            for r, row in enumerate(self.T):
                a = row[enter]
                if a > 0:
                    if best is None:
                        best = r
                        continue
                    br = self.T[best]
                    lhs, rhs = row[-1] * br[enter], br[-1] * a
                    if lhs < rhs or (lhs == rhs and self.basis[r] < self.basis[best]):
                        best = r
            if best is None:
                return False
            self.pivot(best, enter)


def solve(lp: LinearProgram) -> LPResult:
    """Optimal value, a basic optimal point and duals, or a status."""
    c = [as_fraction(x) for x in lp.c]
    nv = len(c)
    raw = [([as_fraction(a) for a in r], as_fraction(b), True)
           for r, b in zip(lp.A_ub, lp.b_ub)]
    raw += [([as_fraction(a) for a in r], as_fraction(b), False)
            for r, b in zip(lp.A_eq, lp.b_eq)]
    m = len(raw)
    for i, (a, _, _) in enumerate(raw):
        if len(a) != nv:
            raise ValueError(f"row {i} has {len(a)} coefficients, expected {nv}")
    n_slack = sum(1 for *_, ub in raw if ub)
    needs_art = [not ub or b < 0 for _, b, ub in raw]
    art_of: dict[int, int] = {}
    col = nv + n_slack
    for i in range(m):
        if needs_art[i]:
            art_of[i] = col
            col += 1
    ncol = col
    art0 = nv + n_slack

    rows: list[list[int]] = []
    mult: list[Fraction] = []          # original dual = mult * tableau dual
    ident: list[int] = []               # column holding e_i initially
    basis: list[int] = []
    s = 0
    for i, (a, b, ub) in enumerate(raw):
        ints, scale = _integral(a + [b])
        sg = -1 if b < 0 else 1
        row = [sg * x for x in ints[:-1]] + [0] * (ncol - nv) + [sg * ints[-1]]
        if ub:
            row[nv + s] = sg
            slack = nv + s
            s += 1
        if i in art_of:
            row[art_of[i]] = 1
            ident.append(art_of[i])
        else:
            ident.append(slack)
        basis.append(ident[-1])
        rows.append(row)
        mult.append(Fraction(sg * scale))
    tab = _Tableau(rows, basis)

    if art_of:
        tab.set_costs([0] * art0 + [-1] * (ncol - art0))
        tab.optimise(ncol)
        if any(tab.T[r][-1] != 0 for r in range(m) if tab.basis[r] >= art0):
            return LPResult("infeasible")
        for r in range(m):
            if tab.basis[r] >= art0:
                j = next((j for j in range(art0) if tab.T[r][j] != 0), None)
                if j is not None:
                    tab.pivot(r, j)

    cint, cscale = _integral(c)
    tab.set_costs(cint + [0] * (ncol - nv))
    if not tab.optimise(art0):
        return LPResult("unbounded")
    D = tab.D
    x = [Fraction(0)] * ncol
    for r, bv in enumerate(tab.basis):
        x[bv] = Fraction(tab.T[r][-1], D)
    # the identity column of row i has cost 0, so its reduced cost is -y_i
    y = [mult[i] * Fraction(-tab.z[ident[i]], D * cscale) for i in range(m)]
    n_ub = len(lp.b_ub)
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult("optimal", value, x[:nv], y[:n_ub], y[n_ub:])


def solve_or_raise(lp: LinearProgram) -> LPResult:
    res = solve(lp)
    if res.status == "infeasible":
        raise Infeasible("linear program is infeasible")
    if res.status == "unbounded":
        raise Unbounded("linear program is unbounded")
    return res
