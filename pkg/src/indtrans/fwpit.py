"""Recursive search for an IT of weight at least w(G)/b (integer weights).

The recursion runs on *twin classes*: vertices in the same block with the
same neighbourhood and the same weight are interchangeable for every step
(the weight update subtracts the same amount from each), so a class is
handled as one vertex with a multiplicity.  This is what lets blow-ups with
thousands of copies per vertex go through the recursion without being
materialised.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Callable, Sequence

from .blocker import find_it_or_blocker
from .errors import (BlocksizeTooSmall, InternalInvariantViolated,
                     NegativeWeight, PreconditionViolated)
from .graph import (Blocker, BlowUp, GraphLike, PartitionedGraph, Transversal,
                    as_fraction, check_weights, is_it, regular_blocksize,
                    validate_blocker)

BlockerFinder = Callable[[PartitionedGraph, Fraction], "Transversal | Blocker"]


@dataclass
class FwpitTrace:
    """Per-level record of one weighted-IT run (level 0 is the input)."""

    b: int
    recursion_depth: int = 0
    phi_values: list[int] = field(default_factory=list)
    blocker_sizes: list[int] = field(default_factory=list)
    swap_iterations: list[int] = field(default_factory=list)
    # sum over v in M of |N(v) & D| at each blocker level, after its swap loop
    dominator_hits: list[int] = field(default_factory=list)


@dataclass
class _Classes:
    graph: PartitionedGraph      # one vertex per twin class
    mult: list[int]
    weight: list[int]
    rep: list[int]               # lowest base vertex of each class
    b: int

    def phi(self, w: Sequence[int]) -> int:
        total = sum(m * x for m, x in zip(self.mult, w))
        return -total + self.b * sum(max(w[c] for c in U) for U in self.graph.blocks)

    def total(self, w: Sequence[int]) -> int:
        return sum(m * x for m, x in zip(self.mult, w))

    def max_degree(self) -> int:
        return max((sum(self.mult[u] for u in self.graph.nbrs[c])
                    for c in range(self.graph.n)), default=0)


def _integer_weights(w: Sequence) -> list[int]:
    out = []
    for x in w:
        x = as_fraction(x)
        if x.denominator != 1:
            raise PreconditionViolated(f"weight {x} is not an integer")
        out.append(int(x))
    return out


def _compress(bu: BlowUp, w: Sequence[int]) -> _Classes:
    base = bu.base
    active = set(bu.active)
    key_of: dict[tuple, int] = {}
    cls_of: dict[int, int] = {}
    members: list[list[int]] = []
    for i, U in enumerate(base.blocks):
        for v in U:
            if v not in active:
                continue
            key = (i, base.nbr_sets[v] & active, w[v])
            if key not in key_of:
                key_of[key] = len(members)
                members.append([])
            cls_of[v] = key_of[key]
            members[key_of[key]].append(v)
    rep = [min(m) for m in members]
    edges = {(cls_of[u], cls_of[v]) for u, v in base.edges
             if u in cls_of and v in cls_of}
    blocks = [sorted({cls_of[v] for v in U if v in cls_of}) for U in base.blocks]
    graph = PartitionedGraph(len(members), edges, blocks)
    mult = [sum(bu.counts[v] for v in m) for m in members]
    return _Classes(graph, mult, [w[r] for r in rep], rep, regular_blocksize(bu))


def _check_regular_sparse(g: GraphLike) -> tuple[BlowUp, int]:
    bu = BlowUp.of(g)
    bu.base.require_valid()
    b = regular_blocksize(bu)
    delta = bu.max_degree()
    if not b > 2 * delta:
        raise BlocksizeTooSmall(f"need b > 2*Delta, got b={b}, Delta={delta}")
    return bu, b


def potential(g: GraphLike, w: Sequence) -> int | Fraction:
    """Sum over vertices of (max weight in its block - its weight)."""
    bu = BlowUp.of(g)
    b = regular_blocksize(bu)
    w = check_weights(bu, w)
    total = bu.weight_total(w)
    tops = sum(max(w[v] for v in U if bu.counts[v]) for U in bu.base.blocks)
    phi = -total + b * tops
    return int(phi) if phi.denominator == 1 else phi


def find_weight_it_integer(g: GraphLike, w: Sequence, *,
                           blocker_finder: BlockerFinder | None = None
                           ) -> tuple[Transversal, FwpitTrace]:
    """An IT with ``b * w(M) >= w(G)`` for a b-regular partition, b > 2*Delta.

    ``g`` may be a :class:`BlowUp`; the IT is then reported in base
    vertices.  ``blocker_finder`` replaces the IT-or-blocker subroutine
    (tests use it to inject weaker certificates).
    """
    bu, b = _check_regular_sparse(g)
    w = _integer_weights(check_weights(bu, w))
    finder = blocker_finder or find_it_or_blocker
    cl = _compress(bu, w)
    H = cl.graph
    eps = Fraction(1, 8 * b * b)
    trace = FwpitTrace(b=b)

    frames = []
    cur = list(cl.weight)
    phi = cl.phi(cur)
    trace.phi_values.append(phi)
    phi0 = phi
    while True:
        tops = [max(cur[c] for c in U) for U in H.blocks]
        W = [c for c in range(H.n) if cur[c] == tops[H.block_of[c]]]
        sub, old = H.induced(W)
        res = finder(sub, eps)
        if isinstance(res, Transversal):
            if not is_it(sub, res):
                raise InternalInvariantViolated("subroutine returned a non-IT")
            M = {H.block_of[old[v]]: old[v] for v in res}
            break
        problems = validate_blocker(sub, res)
        if problems:
            raise InternalInvariantViolated(f"invalid blocker: {problems}")
        D = {old[v] for v in res.dominator}
        leaves = {old[v] for v in res.constellation.leaves}
        B = set(res.blocks)       # induced() keeps block order: indices agree
        hits = [len(H.nbr_sets[c] & D) for c in range(H.n)]
        nxt = [cur[c] - hits[c] for c in range(H.n)]
        nphi = cl.phi(nxt)
        if not nphi <= phi - b:
            raise InternalInvariantViolated(
                f"potential dropped from {phi} to {nphi}, less than b={b}")
        frames.append((B, D, leaves, set(W), hits, cur, nxt))
        trace.blocker_sizes.append(len(B))
        trace.phi_values.append(nphi)
        cur, phi = nxt, nphi

    depth = len(frames)
    trace.recursion_depth = depth
    norm = sum(m * abs(x) for m, x in zip(cl.mult, cl.weight))
    if not (depth * b <= phi0 <= 2 * b * norm):
        raise InternalInvariantViolated("recursion deeper than potential allows")

    for B, D, leaves, Wset, hits, w_here, w_next in reversed(frames):
        in_M = set(M.values())
        Y = sorted(v for v in leaves
                   if v in Wset and H.block_of[v] in B and hits[v] == 1)
        steps = 0
        while True:
            cand = next((v for v in Y if v not in in_M
                         and not H.nbr_sets[v] & in_M), None)
            if cand is None:
                break
            before = sum(w_next[v] for v in in_M)
            U = H.block_of[cand]
            in_M.discard(M[U])
            M[U] = cand
            in_M.add(cand)
            steps += 1
            if sum(w_next[v] for v in in_M) < before:
                raise InternalInvariantViolated("swap decreased the reduced weight")
            if steps > H.n:
                raise InternalInvariantViolated("swap loop failed to terminate")
        got = sum(hits[v] for v in in_M)
        if not got > (1 - Fraction(1, 16 * b)) * (len(B) - 1):
            raise InternalInvariantViolated(
                f"dominator hits {got} too small for |B|={len(B)}")
        if not b * sum(w_here[v] for v in in_M) >= cl.total(w_here):
            raise InternalInvariantViolated("level weight bound failed")
        trace.swap_iterations.append(steps)
        trace.dominator_hits.append(got)
    trace.swap_iterations.reverse()
    trace.dominator_hits.reverse()

    if not is_it(H, M.values()):
        raise InternalInvariantViolated("weighted-IT output is not an IT")
    result = Transversal(tuple(cl.rep[c] for c in M.values()), "IT")
    if not b * sum(w[v] for v in result) >= cl.total(cl.weight):
        raise InternalInvariantViolated("weight guarantee b*w(M) >= w(G) failed")
    return result, trace


def quantize(g: GraphLike, w: Sequence, eta) -> list[int]:
    """``floor(alpha * w(v))`` with ``alpha = n / (eta * w(G))``."""
    bu = BlowUp.of(g)
    w = check_weights(bu, w)
    total = bu.weight_total(w)
    if total == 0:
        return [0] * len(w)
    alpha = Fraction(bu.n) / (as_fraction(eta) * total)
    return [floor(alpha * x) for x in w]


def find_weight_it_quantized(g: GraphLike, w: Sequence, eta, *,
                             blocker_finder: BlockerFinder | None = None
                             ) -> Transversal:
    """An IT with ``b * w(M) >= (1 - eta) * w(G)`` for non-negative weights."""
    eta = as_fraction(eta)
    if eta <= 0:
        raise PreconditionViolated("eta must be positive")
    bu, b = _check_regular_sparse(g)
    w = check_weights(bu, w)
    if any(x < 0 for x in w):
        raise NegativeWeight("weights must be non-negative")
    M, _ = find_weight_it_integer(bu, quantize(bu, w, eta),
                                  blocker_finder=blocker_finder)
    if not b * M.weight(w) >= (1 - eta) * bu.weight_total(w):
        raise InternalInvariantViolated("quantized weight guarantee failed")
    return M
