"""Restricted ITs, strong colouring and fractional strong colouring.

Fractional colourings come from column generation over ITs.  The coverage
is exact, not just at least 1: every IT meets a block in exactly one
vertex, so the ``b`` vertices of a block have total coverage
``sum(f) = b``, and since each has coverage at least 1, each has exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import (AvoidSetTooLarge, BlocksizeTooSmall, BudgetExceeded,
                     InternalInvariantViolated, NotSameBlock, OracleContractViolated,
                     PreconditionViolated)
from .graph import (PartitionedGraph, Transversal, as_fraction, is_it,
                    max_degree, min_block_size, regular_blocksize)
from .lp import find_weighted_it, round_it_lp
from .simplex import LinearProgram, solve

Oracle = Callable[[Sequence[Fraction]], Transversal]


@dataclass(frozen=True)
class StrongColouring:
    colour: tuple[int | None, ...]
    b: int
    # coloured-vertex count after each augmentation round
    history: tuple[int, ...] = ()


@dataclass(frozen=True)
class FractionalColouring:
    parts: tuple[tuple[Transversal, Fraction], ...]
    b: int


def _require_sparse(g: PartitionedGraph, eps: Fraction, extra: int = 2) -> None:
    if eps <= 0:
        raise PreconditionViolated("epsilon must be positive")
    bmin, d = min_block_size(g), max_degree(g)
    if bmin < (extra + eps) * d:
        raise BlocksizeTooSmall(
            f"need smallest block >= ({extra}+eps)*Delta, got {bmin} and Delta={d}")


def it_avoiding(g: PartitionedGraph, L: Iterable[int], epsilon, seed: int) -> Transversal:
    """IT disjoint from ``L``, for ``|L|`` below the smallest block size."""
    g.require_valid()
    eps = as_fraction(epsilon)
    L = set(L)
    _require_sparse(g, eps)
    if len(L) >= min_block_size(g):
        raise AvoidSetTooLarge(f"|L| = {len(L)} is not below the smallest block size")
    # gamma_v = 1/|block| is feasible at this delta and scores > -1
    w = [-1 if v in L else 0 for v in range(g.n)]
    M = round_it_lp(g, w, 1 / (2 + eps), seed)
    if M.weight(w) != 0:
        raise InternalInvariantViolated("IT meets the avoided set")
    return M


def it_pair_through(g: PartitionedGraph, v1: int, v2: int, epsilon, seed: int
                    ) -> tuple[Transversal, Transversal]:
    """ITs through ``v1`` and ``v2`` that agree outside their common block."""
    g.require_valid()
    eps = as_fraction(epsilon)
    if g.block_of[v1] != g.block_of[v2]:
        raise NotSameBlock(f"vertices {v1} and {v2} lie in different blocks")
    _require_sparse(g, eps)
    U = set(g.blocks[g.block_of[v1]])
    rest, old = g.induced([v for v in range(g.n) if v not in U], drop_empty_blocks=True)
    if rest.num_blocks:
        new_of = {v: i for i, v in enumerate(old)}
        L = {new_of[u] for u in g.nbr_sets[v1] | g.nbr_sets[v2] if u in new_of}
        common = [old[v] for v in it_avoiding(rest, L, eps, seed)]
    else:
        common = []
    M1 = Transversal(tuple(common) + (v1,), "IT")
    M2 = Transversal(tuple(common) + (v2,), "IT")
    if not (is_it(g, M1) and is_it(g, M2)):
        raise InternalInvariantViolated("pair of ITs through a block is invalid")
    return M1, M2


def it_through(g: PartitionedGraph, v: int, epsilon, seed: int) -> Transversal:
    return it_pair_through(g, v, v, epsilon, seed)[0]


def _partial_ok(g: PartitionedGraph, c: Sequence[int | None]) -> bool:
    if any(c[u] is not None and c[u] == c[v] for u, v in g.edges):
        return False
    for U in g.blocks:
        used = [c[v] for v in U if c[v] is not None]
        if len(used) != len(set(used)):
            return False
    return True


def strong_colouring(g: PartitionedGraph, epsilon, seed: int) -> StrongColouring:
    """Proper colouring with ``b`` colours that is rainbow on every block."""
    g.require_valid()
    eps = as_fraction(epsilon)
    b = regular_blocksize(g)
    _require_sparse(g, eps, extra=3)
    c: list[int | None] = [None] * g.n
    history = []
    while None in c:
        v = c.index(None)
        used = {c[u] for u in g.blocks[g.block_of[v]]}
        alpha = next(a for a in range(b) if a not in used)
        holder = {g.block_of[u]: u for u in range(g.n) if c[u] == alpha}
        keep = []
        for i, U in enumerate(g.blocks):
            if i in holder:
                banned = {c[u] for u in g.nbrs[holder[i]]} - {None}
                keep += [u for u in U if c[u] not in banned]
            else:
                keep += U
        sub, old = g.induced(keep)
        new_of = {u: i for i, u in enumerate(old)}
        Y = [old[y] for y in it_through(sub, new_of[v], eps, seed)]
        before = sum(x is not None for x in c)
        nxt = list(c)
        for y in Y:
            wU = holder.get(g.block_of[y])
            if wU is not None and wU != y:
                nxt[wU] = c[y]
            nxt[y] = alpha
        after = sum(x is not None for x in nxt)
        if after <= before or not _partial_ok(g, nxt):
            raise InternalInvariantViolated("recolouring round did not improve validly")
        c = nxt
        history.append(after)
        if len(history) > g.n:
            raise InternalInvariantViolated("more augmentation rounds than vertices")
    out = StrongColouring(tuple(c), b, tuple(history))
    problems = check_strong_colouring(g, out)
    if problems:
        raise InternalInvariantViolated(f"invalid strong colouring: {problems}")
    return out


def carr_vempala_decompose(g: PartitionedGraph, coverage: Sequence, oracle: Oracle,
                           max_columns: int | None = None
                           ) -> list[tuple[Transversal, Fraction]]:
    """Convex combination of ITs covering each ``v`` at least ``coverage[v]``.

    ``oracle(y)`` must return an IT ``S`` with ``y(S) >= sum_v y_v * coverage[v]``
    for non-negative ``y``.  Columns are generated until the master LP
    reaches value 1; the basic optimum then has at most ``n`` ITs.
    """
    cov = [as_fraction(x) for x in coverage]
    n = g.n
    if len(cov) != n:
        raise PreconditionViolated("coverage vector has the wrong length")

    def ask(y: Sequence[Fraction]) -> Transversal:
        S = oracle(y)
        if not is_it(g, S):
            raise OracleContractViolated("oracle returned a non-IT")
        if sum((y[v] for v in S), Fraction(0)) < sum((a * b for a, b in zip(y, cov)), Fraction(0)):
            raise OracleContractViolated("oracle IT falls short of its weight bound")
        return S

    if all(x == 0 for x in cov):
        return [(ask([Fraction(0)] * n), Fraction(1))]

    pool: list[Transversal] = [ask(cov)]
    z_prev = Fraction(-1)
    while True:
        k = len(pool)
        # variables: z, lambda_1..lambda_k
        A_ub = [[cov[u]] + [-1 if u in S else 0 for S in pool] for u in range(n)]
        res = solve(LinearProgram([1] + [0] * k, A_ub, [0] * n,
                                  [[0] + [1] * k], [1]))
        if res.status != "optimal":
            raise InternalInvariantViolated(f"master LP {res.status}")
        z = res.value
        if z < z_prev:
            raise InternalInvariantViolated("master LP value decreased")
        z_prev = z
        if z >= 1:
            break
        y, mu = res.y_ub, res.y_eq[0]
        S = ask(y)
        if not sum((y[v] for v in S), Fraction(0)) - mu > 0:
            raise InternalInvariantViolated("new column has no positive reduced cost")
        if S in pool:
            raise InternalInvariantViolated("column generation repeated an IT")
        if max_columns is not None and len(pool) >= max_columns:
            raise BudgetExceeded(f"column budget {max_columns} exhausted")
        pool.append(S)
    parts = [(S, lam) for S, lam in zip(pool, res.x[1:]) if lam > 0]
    if len(parts) > n:
        raise InternalInvariantViolated("decomposition support exceeds n")
    for u in range(n):
        if sum((lam for S, lam in parts if u in S), Fraction(0)) < cov[u]:
            raise InternalInvariantViolated(f"vertex {u} under-covered")
    return parts


def fractional_strong_colouring(g: PartitionedGraph, epsilon, seed: int,
                                max_columns: int | None = None) -> FractionalColouring:
    """ITs with positive masses summing to ``b``, covering each vertex exactly once."""
    g.require_valid()
    eps = as_fraction(epsilon)
    b = regular_blocksize(g)
    _require_sparse(g, eps)
    parts = carr_vempala_decompose(
        g, [Fraction(1, b)] * g.n, lambda y: find_weighted_it(g, y, eps, seed), max_columns)
    out = FractionalColouring(tuple((S, b * lam) for S, lam in parts), b)
    problems = check_fractional_colouring(g, out)
    if problems:
        raise InternalInvariantViolated(f"invalid fractional colouring: {problems}")
    return out


def check_strong_colouring(g: PartitionedGraph, sc: StrongColouring) -> list[str]:
    c = sc.colour
    if len(c) != g.n:
        return [f"colouring has {len(c)} entries for {g.n} vertices"]
    out = [f"vertex {v} uncoloured" for v in range(g.n) if c[v] is None]
    out += [f"vertex {v} has colour {c[v]} outside 0..{sc.b - 1}"
            for v in range(g.n) if c[v] is not None and not 0 <= c[v] < sc.b]
    out += [f"monochromatic edge {u}-{v}" for u, v in sorted(g.edges)
            if c[u] is not None and c[u] == c[v]]
    for i, U in enumerate(g.blocks):
        used = [c[v] for v in U if c[v] is not None]
        if len(used) != len(set(used)):
            out.append(f"block {i} repeats a colour")
    return out


def check_fractional_colouring(g: PartitionedGraph, fc: FractionalColouring) -> list[str]:
    out = []
    for i, (S, f) in enumerate(fc.parts):
        if not is_it(g, S):
            out.append(f"part {i} is not an IT")
        if not f > 0:
            out.append(f"part {i} has non-positive mass {f}")
    total = sum((f for _, f in fc.parts), Fraction(0))
    if total != fc.b:
        out.append(f"sum f = {total} != b = {fc.b}")
    for v in range(g.n):
        cov = sum((f for S, f in fc.parts if v in S), Fraction(0))
        if cov != 1:
            out.append(f"coverage of {v} = {cov} != 1")
    if len(fc.parts) > g.n:
        out.append(f"{len(fc.parts)} parts for {g.n} vertices")
    return out
