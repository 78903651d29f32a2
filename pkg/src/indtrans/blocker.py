"""Find an independent transversal, or certify that none exists.

:func:`find_it_or_blocker` returns either an IT or a
:class:`~indtrans.graph.Blocker` whose dominating set is small.
Internally it is an exact search:

1. backtracking over blocks (fewest remaining candidates first) with
   forward checking; interchangeable vertices are tried once;
2. if no IT exists, greedily shrink to an inclusion-minimal IT-free family;
3. grow an alternating tree of stars against an IT of the family minus its
   last block.  Stuck growth means the stars dominate every vertex of the
   blocks they touch, which is the certificate.

The search is exponential in the worst case.  Certificates are always of
the strong form ``D = V(K)``, ``B0 = B``, ``|D| <= 2(|B|-1)``.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

from .errors import InternalInvariantViolated, PreconditionViolated
from .graph import (Blocker, Constellation, PartitionedGraph, Transversal,
                    as_fraction, is_it, validate_blocker)

ItOrBlocker = Union[Transversal, Blocker]


def _dedupe(g: PartitionedGraph, vertices: Sequence[int], scope: set[int]) -> list[int]:
    # twins within a block (same neighbourhood inside the scope) behave identically
    seen: set[frozenset[int]] = set()
    out = []
    for v in vertices:
        key = g.nbr_sets[v] & scope
        if key not in seen:
            seen.add(key)
            out.append(v)
    return out


def search_it(g: PartitionedGraph, family: Iterable[int]) -> dict[int, int] | None:
    """An IT of the blocks in ``family`` (block -> vertex), or None."""
    family = sorted(set(family))
    scope = {v for i in family for v in g.blocks[i]}
    domains = {i: _dedupe(g, g.blocks[i], scope) for i in family}
    return _extend(g, domains)


def _extend(g: PartitionedGraph, domains: dict[int, list[int]]) -> dict[int, int] | None:
    if not domains:
        return {}
    i = min(domains, key=lambda j: (len(domains[j]), j))
    rest = [j for j in domains if j != i]
    for v in domains[i]:
        nv = g.nbr_sets[v]
        reduced = {}
        for j in rest:
            dom = [u for u in domains[j] if u not in nv]
            if not dom:
                break
            reduced[j] = dom
        else:
            found = _extend(g, reduced)
            if found is not None:
                found[i] = v
                return found
    return None


def minimal_it_free_family(g: PartitionedGraph, family: Iterable[int]) -> list[int]:
    """Shrink an IT-free family until dropping any block creates an IT."""
    family = sorted(set(family))
    for i in list(family):
        trial = [j for j in family if j != i]
        if search_it(g, trial) is None:
            family = trial
    return family


def _alternating_tree(g: PartitionedGraph, family: list[int]
                      ) -> tuple[list[int], list[tuple[int, list[int]]]] | dict[int, int]:
    """Grow stars against a PIT missing only the root block.

    Returns ``(tree_blocks, stars)`` once the stars dominate the tree's
    blocks, or a full IT (block -> vertex) if the root block gets covered.
    """
    root = family[-1]
    M = search_it(g, family[:-1])
    if M is None:
        raise InternalInvariantViolated("family is not minimal IT-free")
    stars: list[tuple[int, list[int]]] = []

    while True:
        centres = {x for x, _ in stars}
        leaves = {y for _, ls in stars for y in ls}
        dom = centres | leaves
        tree_blocks = [root] + sorted(g.block_of[y] for y in leaves)
        undominated = sorted(v for i in tree_blocks for v in g.blocks[i]
                             if not g.nbr_sets[v] & dom)
        if not undominated:
            return tree_blocks, stars
        x = undominated[0]
        m_nbrs = sorted(M[i] for i in M if M[i] in g.nbr_sets[x])
        if m_nbrs:
            stars.append((x, m_nbrs))
            continue
        # x sees nothing of M: swap it in, truncating the tree behind it
        while True:
            U = g.block_of[x]
            if U == root:
                M[root] = x
                return M
            y = M[U]
            j = next(k for k, (_, ls) in enumerate(stars) if y in ls)
            M[U] = x
            del stars[j + 1:]
            stars[j][1].remove(y)
            if stars[j][1]:
                break
            x = stars.pop()[0]


def find_it_or_blocker(g: PartitionedGraph, epsilon) -> Transversal | Blocker:
    """An IT of ``g``, or a blocker certificate valid for ``epsilon``.

    The returned branch agrees with true IT existence.  Blockers satisfy
    ``D = V(K)`` and ``|D| <= 2(|B|-1)``, valid for every ``epsilon > 0``.
    """
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise PreconditionViolated("epsilon must be positive")
    g.require_valid()
    everything = range(g.num_blocks)
    sol = search_it(g, everything)
    if sol is not None:
        M = Transversal(tuple(sol.values()), "IT")
        if not is_it(g, M):
            raise InternalInvariantViolated("search returned a non-IT")
        return M

    family = minimal_it_free_family(g, everything)
    out = _alternating_tree(g, family)
    if isinstance(out, dict):
        raise InternalInvariantViolated("alternating tree covered an IT-free family")
    tree_blocks, stars = out
    centres = frozenset(x for x, _ in stars)
    leaves = frozenset(y for _, ls in stars for y in ls)
    B = frozenset(tree_blocks)
    blk = Blocker(blocks=B, blocks0=B, dominator=centres | leaves,
                  constellation=Constellation(centres, leaves), epsilon=eps)
    problems = validate_blocker(g, blk)
    if problems or len(blk.dominator) > 2 * (len(B) - 1):
        raise InternalInvariantViolated(f"invalid blocker produced: {problems}")
    return blk
