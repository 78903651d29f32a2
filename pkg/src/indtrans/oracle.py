"""Brute-force ground truth for small instances.

Deliberately naive and independent of the solvers: plain Cartesian
products and subset enumeration with their own adjacency checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

from .errors import TooLarge
from .graph import PartitionedGraph, as_fraction

PRODUCT_LIMIT = 10 ** 7
DOMINATION_LIMIT = 20


@dataclass(frozen=True)
class OracleReport:
    all_its: tuple[frozenset[int], ...]
    max_weight: Fraction | None
    optimum_witness: frozenset[int] | None


def _adjacency(g: PartitionedGraph) -> set[tuple[int, int]]:
    adj = set()
    for u, v in g.edges:
        adj.add((u, v))
        adj.add((v, u))
    return adj


def enumerate_its(g: PartitionedGraph) -> list[frozenset[int]]:
    """Every independent transversal, in lexicographic block order."""
    size = math.prod(len(U) for U in g.blocks)
    if size > PRODUCT_LIMIT:
        raise TooLarge(f"{size} transversals exceed the limit {PRODUCT_LIMIT}")
    adj = _adjacency(g)
    out = []
    for pick in product(*g.blocks):
        if all((u, v) not in adj for u, v in combinations(pick, 2)):
            out.append(frozenset(pick))
    return out


def brute_max_weight_it(g: PartitionedGraph, w: Sequence
                        ) -> tuple[Fraction, frozenset[int]] | None:
    """Heaviest IT (first found on ties), or None if there is no IT."""
    w = [as_fraction(x) for x in w]
    best = None
    for S in enumerate_its(g):
        val = sum((w[v] for v in S), Fraction(0))
        if best is None or val > best[0]:
            best = (val, S)
    return best


def report(g: PartitionedGraph, w: Sequence) -> OracleReport:
    its = enumerate_its(g)
    best = brute_max_weight_it(g, w)
    return OracleReport(tuple(its), best and best[0], best and best[1])


def min_dominating_size(g: PartitionedGraph, W: Iterable[int]) -> int | float:
    """Fewest vertices whose neighbourhoods cover ``W``; ``inf`` if impossible."""
    if g.n > DOMINATION_LIMIT:
        raise TooLarge(f"domination oracle is limited to {DOMINATION_LIMIT} vertices")
    W = sorted(set(W))
    nbr = [0] * g.n
    for u, v in g.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    target = sum(1 << v for v in W)
    cover_any = 0
    for m in nbr:
        cover_any |= m
    if target & ~cover_any:
        return math.inf
    for k in range(g.n + 1):
        for D in combinations(range(g.n), k):
            seen = 0
            for u in D:
                seen |= nbr[u]
            if target & ~seen == 0:
                return k
    return math.inf
