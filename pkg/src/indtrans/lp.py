"""LP relaxations of the weighted IT problem and their rounding.

``P(G, delta)`` has a variable ``gamma_v in [0, 1]`` per vertex, total
``gamma`` at most ``delta`` on every neighbourhood and exactly 1 on every
block; the PIT version only asks for at most 1 per block.  Rounding goes
through a blow-up of ``G`` in which vertex ``v`` gets about ``b*gamma_v``
copies, so that the blow-up has large blocks and small degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Sequence

from .errors import (BlocksizeTooSmall, Infeasible, InternalInvariantViolated,
                     NegativeWeight, PreconditionViolated)
from .graph import (BlowUp, PartitionedGraph, Transversal, as_fraction,
                    check_weights, is_it, is_pit, max_degree, regular_blocksize)
from .lll import sparsify_and_solve
from .simplex import LinearProgram, solve

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class LpResult:
    gamma: tuple[Fraction, ...]
    tau: Fraction
    status: str = "optimal"


def lp_feasible(g: PartitionedGraph, gamma: Sequence, delta, *, pit: bool = False) -> bool:
    """Direct substitution check of ``gamma`` against P (or P*)."""
    gamma = [as_fraction(x) for x in gamma]
    delta = as_fraction(delta)
    if len(gamma) != g.n or any(not 0 <= x <= 1 for x in gamma):
        return False
    if any(sum((gamma[u] for u in g.nbrs[v]), Fraction(0)) > delta for v in range(g.n)):
        return False
    for U in g.blocks:
        s = sum((gamma[v] for v in U), Fraction(0))
        if s > 1 or (not pit and s != 1):
            return False
    return True


def _solve(g: PartitionedGraph, w: Sequence, delta, pit: bool) -> LpResult:
    g.require_valid()
    w = check_weights(g, w)
    delta = as_fraction(delta)
    if delta < 0:
        raise PreconditionViolated("delta must be non-negative")
    rows = []
    for v in range(g.n):
        if g.nbrs[v]:
            row = [0] * g.n
            for u in g.nbrs[v]:
                row[u] = 1
            rows.append(tuple(row))
    rows = sorted(set(rows))
    A_ub, b_ub = list(rows), [delta] * len(rows)
    blocks = [[1 if v in set(U) else 0 for v in range(g.n)] for U in g.blocks]
    if pit:
        A_ub += blocks
        b_ub += [1] * len(blocks)
        lp = LinearProgram(w, A_ub, b_ub)
    else:
        lp = LinearProgram(w, A_ub, b_ub, blocks, [1] * len(blocks))
    res = solve(lp)
    if res.status == "infeasible":
        raise Infeasible(f"P(G, {delta}) is empty")
    if res.status != "optimal":
        raise InternalInvariantViolated(f"bounded LP reported {res.status}")
    gamma = tuple(res.x)
    if not lp_feasible(g, gamma, delta, pit=pit):
        raise InternalInvariantViolated("simplex returned an infeasible point")
    return LpResult(gamma, res.value)


def solve_it_lp(g: PartitionedGraph, w: Sequence, delta) -> LpResult:
    """Maximise ``sum gamma_v w(v)`` over P(G, delta); raises Infeasible."""
    return _solve(g, w, delta, pit=False)


def solve_pit_lp(g: PartitionedGraph, w: Sequence, delta) -> LpResult:
    """Same over the PIT polytope, which always contains 0."""
    return _solve(g, w, delta, pit=True)


def _check_delta(delta) -> Fraction:
    delta = as_fraction(delta)
    if not 0 < delta < HALF:
        raise PreconditionViolated("delta must lie strictly between 0 and 1/2")
    return delta


def blowup_round(g: PartitionedGraph, gamma: Sequence, w: Sequence, delta, lam,
                 seed: int) -> Transversal:
    """IT of weight at least ``(1 - lam) * sum gamma_v w(v)``, gamma in P(G, delta)."""
    g.require_valid()
    delta = _check_delta(delta)
    lam = as_fraction(lam)
    if not 0 < lam < HALF:
        raise PreconditionViolated("lambda must lie strictly between 0 and 1/2")
    w = check_weights(g, w)
    if any(x < 0 for x in w):
        raise NegativeWeight("blow-up rounding needs non-negative weights")
    gamma = [as_fraction(x) for x in gamma]
    if not lp_feasible(g, gamma, delta):
        raise PreconditionViolated("gamma is not in P(G, delta)")
    eps = HALF - delta
    b = ceil(2 * g.n / (eps * lam))
    copies = [ceil(b * x) for x in gamma]
    counts = [0] * g.n
    for U in g.blocks:
        size = sum(copies[v] for v in U)
        if not b <= size <= g.n + b:
            raise InternalInvariantViolated(f"blow-up block size {size} outside [b, n+b]")
        left = b
        for v in sorted(U, key=lambda v: (-w[v], v)):
            counts[v] = min(copies[v], left)
            left -= counts[v]
    trimmed = BlowUp(g, tuple(counts))
    eps2 = eps / (1 - eps)
    if not b >= 2 * (1 + eps2) * trimmed.max_degree():
        raise InternalInvariantViolated("trimmed blow-up has too large a degree")
    target = (1 - lam) * sum((x * y for x, y in zip(gamma, w)), Fraction(0))
    M = sparsify_and_solve(trimmed, w, eps2, lam / 2, seed)
    if not is_it(g, M) or M.weight(w) < target:
        raise InternalInvariantViolated("blow-up rounding missed its weight bound")
    return M


def round_it_lp(g: PartitionedGraph, w: Sequence, delta, seed: int) -> Transversal:
    """IT of weight at least the optimum of the IT LP at ``delta``."""
    g.require_valid()
    delta = _check_delta(delta)
    w = check_weights(g, w)
    lp = solve_it_lp(g, w, delta)
    eps = HALF - delta
    keep: list[int] = []
    gamma2: dict[int, Fraction] = {}
    shift: dict[int, Fraction] = {}
    for U in g.blocks:
        order = sorted(U, key=lambda v: (-w[v], v))
        acc = Fraction(0)
        for s, v in enumerate(order):
            acc += lp.gamma[v]
            if acc >= 1 - eps:
                break
        kept = order[:s + 1]
        scaled = [lp.gamma[v] / (1 - eps) for v in kept[:-1]]
        scaled.append(1 - sum(scaled, Fraction(0)))
        for v, x in zip(kept, scaled):
            if not 0 <= x <= lp.gamma[v] / (1 - eps):
                raise InternalInvariantViolated("truncated gamma exceeds gamma/(1-eps)")
            gamma2[v] = x
            shift[v] = w[kept[-1]]
        keep += kept
    sub, old = g.induced(keep)
    g2 = [gamma2[v] for v in old]
    w2 = [w[v] - shift[v] for v in old]
    delta2 = (HALF - eps) / (1 - eps)
    if not lp_feasible(sub, g2, delta2):
        raise InternalInvariantViolated("truncated gamma left P(G', delta')")
    M2 = blowup_round(sub, g2, w2, delta2, eps, seed)
    M = Transversal(tuple(old[v] for v in M2), "IT")
    if not is_it(g, M) or M.weight(w) < lp.tau:
        raise InternalInvariantViolated("LP rounding returned less than tau")
    return M


def add_dummies(g: PartitionedGraph) -> PartitionedGraph:
    """Append one isolated vertex ``n + i`` to block ``i``."""
    blocks = [tuple(U) + (g.n + i,) for i, U in enumerate(g.blocks)]
    return PartitionedGraph(g.n + len(g.blocks), g.edges, blocks)


def round_pit_lp(g: PartitionedGraph, w: Sequence, delta, seed: int) -> Transversal:
    """PIT of weight at least the optimum of the PIT LP at ``delta``."""
    g.require_valid()
    delta = _check_delta(delta)
    w = check_weights(g, w)
    tau = solve_pit_lp(g, w, delta).tau
    big = add_dummies(g)
    M = round_it_lp(big, list(w) + [0] * len(g.blocks), delta, seed)
    P = Transversal(tuple(v for v in M if v < g.n), "PIT")
    if not is_pit(g, P) or P.weight(w) < tau:
        raise InternalInvariantViolated("PIT rounding returned less than tau*")
    return P


def find_weighted_it(g: PartitionedGraph, w: Sequence, epsilon, seed: int) -> Transversal:
    """IT with ``b * w(M) >= w(G)`` when blocks have size ``b >= (2+eps)*Delta``."""
    g.require_valid()
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise PreconditionViolated("epsilon must be positive")
    b = regular_blocksize(g)
    d = max_degree(g)
    if b < (2 + eps) * d:
        raise BlocksizeTooSmall(f"need b >= (2+eps)*Delta, got b={b}, Delta={d}")
    w = check_weights(g, w)
    M = round_it_lp(g, w, 1 / (2 + eps), seed)
    if not b * M.weight(w) >= sum(w, Fraction(0)):
        raise InternalInvariantViolated("weighted IT below w(G)/b")
    return M
