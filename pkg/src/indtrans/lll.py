"""Moser-Tardos resampling and randomized degree splitting.

Randomness comes from numpy's PCG64, one independent stream per
(seed, tag, indices) triple, so every stage is reproducible on its own.
Graphs are handled as :class:`~indtrans.graph.BlowUp` objects: a random
``b'``-subset of a block only needs to know how many copies of each base
vertex it keeps.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, Decimal, localcontext
from fractions import Fraction
from math import ceil, floor
from typing import Any, Callable, Sequence

import numpy as np

from .errors import (BlocksizeTooSmall, BudgetExceeded, InternalInvariantViolated,
                     NegativeWeight, PreconditionViolated)
from .fwpit import find_weight_it_quantized
from .graph import (BlowUp, GraphLike, Transversal, as_fraction, check_weights,
                    regular_blocksize)

MIN_SPLIT_BLOCKSIZE = 15000
_PREC = 80


def rng_stream(seed: int, tag: str, *indices: int) -> np.random.Generator:
    """Independent generator for ``(seed, tag, indices)``."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(zlib.crc32(tag.encode()), *indices))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class BadEvent:
    variables: tuple[int, ...]
    # called with the full assignment; must read only ``variables``
    holds: Callable[[Sequence[Any]], bool]


@dataclass
class VariableSpace:
    samplers: list[Callable[[np.random.Generator], Any]]
    bad_events: list[BadEvent] = field(default_factory=list)


@dataclass
class ResampleResult:
    assignment: list[Any]
    resamples: int


def moser_tardos(space: VariableSpace, seed: int, budget: int | None = None,
                 tag: str = "moser-tardos") -> ResampleResult:
    """Resample the lowest-index violated event until none holds."""
    k = len(space.samplers)
    draws = [0] * k

    def draw(i: int) -> Any:
        draws[i] += 1
        return space.samplers[i](rng_stream(seed, tag, i, draws[i]))

    x = [draw(i) for i in range(k)]
    touching: list[list[int]] = [[] for _ in range(k)]
    for j, ev in enumerate(space.bad_events):
        for i in ev.variables:
            touching[i].append(j)
    violated = {j for j, ev in enumerate(space.bad_events) if ev.holds(x)}
    count = 0
    while violated:
        if budget is not None and count >= budget:
            raise BudgetExceeded(f"resample budget {budget} exhausted")
        j = min(violated)
        for i in space.bad_events[j].variables:
            x[i] = draw(i)
        count += 1
        for i in space.bad_events[j].variables:
            for e in touching[i]:
                if space.bad_events[e].holds(x):
                    violated.add(e)
                else:
                    violated.discard(e)
    if any(ev.holds(x) for ev in space.bad_events):
        raise InternalInvariantViolated("resampler stopped with a violated event")
    return ResampleResult(x, count)


def _dec(x: Fraction) -> Decimal:
    return Decimal(x.numerator) / Decimal(x.denominator)


def split_threshold(d: Fraction) -> Fraction:
    """Rational upper bound on ``d/2 + 10*sqrt(d * ln d)``, tight to ~1e-60."""
    d = as_fraction(d)
    if d < 1:
        raise PreconditionViolated("threshold needs d >= 1")
    with localcontext() as ctx:
        ctx.prec = _PREC
        val = _dec(d) / 2 + 10 * (_dec(d) * _dec(d).ln()).sqrt()
        slack = abs(val).scaleb(-_PREC + 10) + Decimal(10) ** (-_PREC + 10)
        ctx.rounding = ROUND_CEILING
        return Fraction(+(val + slack))


def split_threshold_floor(d: Fraction) -> int:
    """Largest selected-neighbour count that is not a bad event."""
    return floor(split_threshold(d))


@dataclass(frozen=True)
class SplitSchedule:
    rows: tuple[tuple[int, int, Fraction], ...]    # (i, b_i, delta_i)
    t: int
    C: int


def build_schedule(b: int, epsilon, lam, C: int = MIN_SPLIT_BLOCKSIZE) -> SplitSchedule:
    eps, lam = as_fraction(epsilon), as_fraction(lam)
    if not (0 < eps < 1 and 0 < lam < 1):
        raise PreconditionViolated("epsilon and lambda must lie in (0, 1)")
    if C < MIN_SPLIT_BLOCKSIZE:
        raise PreconditionViolated(f"C must be at least {MIN_SPLIT_BLOCKSIZE}")
    ratio = b * eps ** 3 * lam ** 3 / C
    # floor(log2(ratio)) for a rational ratio >= 1
    t = 0
    if ratio >= 1:
        t = ratio.numerator.bit_length() - ratio.denominator.bit_length()
        if Fraction(2) ** t > ratio:
            t -= 1
        elif Fraction(2) ** (t + 1) <= ratio:
            t += 1
    rows = []
    bi, di = b, Fraction(b) / (2 + eps)
    for i in range(t + 1):
        if i > 0:
            bi, di = ceil(Fraction(bi, 2)), split_threshold(di)
        if not (2 * di < bi <= 3 * di and di >= Fraction(b) / (2 + eps) / 2 ** i):
            raise InternalInvariantViolated(
                f"schedule row {i}: b_i={bi}, delta_i~{float(di):.3f} out of range")
        rows.append((i, bi, di))
    return SplitSchedule(tuple(rows), t, C)


def _check_nonneg(w: Sequence[Fraction]) -> None:
    if any(x < 0 for x in w):
        raise NegativeWeight("weights must be non-negative")


def sparsify_once(g: GraphLike, w: Sequence, seed: int, *, round_index: int = 0,
                  max_retries: int = 10 ** 6, budget: int | None = None) -> BlowUp:
    """Keep a random ``ceil(b/2)`` vertices per block, bounding degrees.

    Returns the induced subgraph as a blow-up over the same base graph.
    """
    bu = BlowUp.of(g)
    bu.base.require_valid()
    b = regular_blocksize(bu)
    w = check_weights(bu, w)
    _check_nonneg(w)
    delta = bu.max_degree()
    if b < MIN_SPLIT_BLOCKSIZE:
        raise BlocksizeTooSmall(f"degree splitting needs b >= {MIN_SPLIT_BLOCKSIZE}, got {b}")
    if b < 2 * delta:
        raise BlocksizeTooSmall(f"need b >= 2*Delta, got b={b}, Delta={delta}")

    half = ceil(Fraction(b, 2))
    dhat = max(Fraction(b, 3), Fraction(delta))
    limit = split_threshold_floor(dhat)
    base = bu.base
    members = [[v for v in U if bu.counts[v]] for U in base.blocks]
    edges_of = [np.cumsum([bu.counts[v] for v in m]) for m in members]

    def sampler(U: int) -> Callable[[np.random.Generator], tuple[int, ...]]:
        def draw(gen: np.random.Generator) -> tuple[int, ...]:
            picked = gen.permutation(b)[:half]
            idx = np.searchsorted(edges_of[U], picked, side="right")
            kept = np.bincount(idx, minlength=len(members[U]))
            return tuple(int(c) for c in kept)
        return draw

    where = {v: (U, j) for U, m in enumerate(members) for j, v in enumerate(m)}

    def event(v: int) -> BadEvent:
        nb = [where[u] for u in base.nbrs[v] if u in where]
        def holds(x: Sequence[tuple[int, ...]]) -> bool:
            return sum(x[U][j] for U, j in nb) > limit
        return BadEvent(tuple(sorted({U for U, _ in nb})), holds)

    space = VariableSpace([sampler(U) for U in range(len(members))],
                          [event(v) for v in bu.active])
    total = bu.weight_total(w)
    allowed = total * (1 - Fraction(half, b)) * (1 + Fraction(1, b ** 11))
    for attempt in range(max_retries):
        res = moser_tardos(space, seed, budget, tag=f"split/{round_index}/{attempt}")
        counts = [0] * base.n
        for U, kept in enumerate(res.assignment):
            for v, c in zip(members[U], kept):
                counts[v] = c
        out = BlowUp(base, tuple(counts))
        lost = total - out.weight_total(w)
        if lost <= allowed:
            break
    else:
        raise BudgetExceeded(f"weight retention failed {max_retries} times")

    if set(out.block_sizes) != {half}:
        raise InternalInvariantViolated("split blocks do not all have ceil(b/2) vertices")
    if out.max_degree() > limit:
        raise InternalInvariantViolated("split graph exceeds the degree threshold")
    if not out.weight_total(w) / half >= total / b * (1 - Fraction(1, b ** 10)):
        raise InternalInvariantViolated("split graph lost too much weight")
    return out


def split_rounds(g: GraphLike, w: Sequence, epsilon, lam, seed: int,
                 C: int = MIN_SPLIT_BLOCKSIZE) -> tuple[SplitSchedule, list[BlowUp]]:
    """The schedule and the graphs ``G_0, ..., G_t`` it produces."""
    eps, lam = as_fraction(epsilon), as_fraction(lam)
    bu = BlowUp.of(g)
    bu.base.require_valid()
    b = regular_blocksize(bu)
    w = check_weights(bu, w)
    _check_nonneg(w)
    if not (0 < eps < 1 and 0 < lam < 1):
        raise PreconditionViolated("epsilon and lambda must lie in (0, 1)")
    if b < (2 + eps) * bu.max_degree():
        raise BlocksizeTooSmall(f"need b >= (2+eps)*Delta, got b={b}, Delta={bu.max_degree()}")
    sched = build_schedule(b, eps, lam, C)
    graphs = [bu]
    for i, bi, di in sched.rows:
        cur = graphs[-1]
        if regular_blocksize(cur) != bi or cur.max_degree() > di:
            raise InternalInvariantViolated(f"round {i}: graph misses its schedule row")
        if i < sched.t:
            graphs.append(sparsify_once(cur, w, seed, round_index=i))
    return sched, graphs


def sparsify_and_solve(g: GraphLike, w: Sequence, epsilon, lam, seed: int,
                       C: int = MIN_SPLIT_BLOCKSIZE) -> Transversal:
    """An IT with ``b * w(M) >= (1 - lam) * w(G)`` when ``b >= (2+eps)*Delta``."""
    lam = as_fraction(lam)
    sched, graphs = split_rounds(g, w, epsilon, lam, seed, C)
    w = check_weights(graphs[0], w)
    M = find_weight_it_quantized(graphs[-1], w, lam / 2)
    if not sched.rows[0][1] * M.weight(w) >= (1 - lam) * graphs[0].weight_total(w):
        raise InternalInvariantViolated("multi-round weight guarantee failed")
    return M
