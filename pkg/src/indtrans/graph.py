"""Partitioned graphs, exact weights and certificate validators.

Vertices are the integers ``0..n-1``.  A partition is an ordered list of
blocks; block indices are positions in that list.  Every certified quantity
is a :class:`fractions.Fraction` (or a Python ``int``), never a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

from .errors import InvalidGraph, NotRegular

Rational = Fraction
Number = Union[int, Fraction]


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: they would silently smuggle rounding error into
    quantities that are supposed to be exact.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not weights")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def fmt_rational(x: Number) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class PartitionedGraph:
    """A simple undirected graph together with an ordered vertex partition.

    The constructor normalises but does not reject malformed input, so that
    :func:`validate_graph` can report every problem at once.  Solvers call
    :meth:`require_valid` on entry.
    """

    __slots__ = ("n", "edges", "blocks", "__dict__")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]],
                 blocks: Iterable[Iterable[int]]):
        self.n = int(n)
        self.edges = frozenset(
            (min(u, v), max(u, v)) for u, v in edges)
        self.blocks = tuple(tuple(sorted(set(U))) for U in blocks)

    def __repr__(self) -> str:
        return (f"PartitionedGraph(n={self.n}, edges={sorted(self.edges)}, "
                f"blocks={[list(U) for U in self.blocks]})")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartitionedGraph):
            return NotImplemented
        return (self.n == other.n and self.edges == other.edges
                and self.blocks == other.blocks)

    def __hash__(self) -> int:
        return hash((self.n, self.edges, self.blocks))

    @cached_property
    def nbr_sets(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            if u != v and 0 <= u < self.n and 0 <= v < self.n:
                adj[u].add(v)
                adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def nbrs(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(a)) for a in self.nbr_sets)

    @cached_property
    def block_of(self) -> tuple[int, ...]:
        """Index of the block containing each vertex (-1 when uncovered)."""
        owner = [-1] * self.n
        for i, U in enumerate(self.blocks):
            for v in U:
                if 0 <= v < self.n and owner[v] < 0:
                    owner[v] = i
        return tuple(owner)

    def adjacent(self, u: int, v: int) -> bool:
        return v in self.nbr_sets[u]

    def degree(self, v: int) -> int:
        return len(self.nbr_sets[v])

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def require_valid(self) -> None:
        problems = validate_graph(self)
        if problems:
            raise InvalidGraph("; ".join(problems))

    def induced(self, keep: Iterable[int], *, drop_empty_blocks: bool = False
                ) -> tuple["PartitionedGraph", list[int]]:
        """Induced subgraph on ``keep``, relabelled to ``0..len(keep)-1``.

        Returns the subgraph and the list mapping new labels to old ones.
        Block order is preserved.  A block left empty raises unless
        ``drop_empty_blocks`` is set.
        """
        old = sorted(set(keep))
        new_of = {v: i for i, v in enumerate(old)}
        edges = [(new_of[u], new_of[v]) for u, v in self.edges
                 if u in new_of and v in new_of]
        blocks = []
        for U in self.blocks:
            part = [new_of[v] for v in U if v in new_of]
            if part:
                blocks.append(part)
            elif not drop_empty_blocks:
                raise InvalidGraph("induced subgraph leaves a block empty")
        return PartitionedGraph(len(old), edges, blocks), old


@dataclass(frozen=True)
class BlowUp:
    """Blow-up of ``base`` by independent sets.

    Base vertex ``v`` stands for ``counts[v]`` pairwise non-adjacent copies
    with identical neighbourhoods; copies of adjacent base vertices are
    adjacent.  Counts of zero remove the vertex.  An ordinary graph is the
    blow-up with all counts equal to one, and an induced subgraph of a
    blow-up is again a blow-up of the same base, so degree splitting and the
    weighted-IT recursion work on counts instead of materialised copies.
    """

    base: PartitionedGraph
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.base.n:
            raise ValueError("one count per base vertex required")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")

    @classmethod
    def of(cls, g: "GraphLike") -> "BlowUp":
        if isinstance(g, BlowUp):
            return g
        return cls(g, (1,) * g.n)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def active(self) -> list[int]:
        return [v for v in range(self.base.n) if self.counts[v] > 0]

    @cached_property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(sum(self.counts[v] for v in U) for U in self.base.blocks)

    def degree(self, v: int) -> int:
        return sum(self.counts[u] for u in self.base.nbrs[v])

    def max_degree(self) -> int:
        return max((self.degree(v) for v in self.active), default=0)

    def weight_total(self, w: Sequence[Number]) -> Fraction:
        return sum((Fraction(w[v]) * c for v, c in enumerate(self.counts)
                    if c), Fraction(0))

    def materialize(self) -> tuple[PartitionedGraph, list[int]]:
        """Explicit graph plus the map from copies to base vertices."""
        origin: list[int] = []
        first: list[int] = []
        for v, c in enumerate(self.counts):
            first.append(len(origin))
            origin.extend([v] * c)
        edges = []
        for u, v in self.base.edges:
            if u == v:
                continue
            for i in range(self.counts[u]):
                for j in range(self.counts[v]):
                    edges.append((first[u] + i, first[v] + j))
        blocks = []
        for U in self.base.blocks:
            part = [first[v] + i for v in U for i in range(self.counts[v])]
            if part:
                blocks.append(part)
        return PartitionedGraph(len(origin), edges, blocks), origin


GraphLike = Union[PartitionedGraph, BlowUp]


@dataclass(frozen=True)
class Transversal:
    """A set of vertices with at most one per block (``kind`` "IT" or "PIT")."""

    vertices: tuple[int, ...]
    kind: str = "IT"

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        if self.kind not in ("IT", "PIT"):
            raise ValueError(f"unknown transversal kind {self.kind!r}")

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def weight(self, w: Sequence[Number]) -> Fraction:
        return sum((Fraction(w[v]) for v in self.vertices), Fraction(0))


@dataclass(frozen=True)
class Constellation:
    centres: frozenset[int]
    leaves: frozenset[int]

    @property
    def vertices(self) -> frozenset[int]:
        return self.centres | self.leaves


@dataclass(frozen=True)
class Blocker:
    """Certificate that blocks ``blocks`` admit no IT.

    ``dominator`` dominates every vertex of those blocks and is small;
    ``constellation`` is a star system for ``blocks0`` inside it.
    """

    blocks: frozenset[int]
    blocks0: frozenset[int]
    dominator: frozenset[int]
    constellation: Constellation
    epsilon: Fraction

    @property
    def extra(self) -> frozenset[int]:
        """The part of the dominating set outside the constellation."""
        return self.dominator - self.constellation.vertices


@dataclass(frozen=True)
class SolverParams:
    epsilon: Fraction = Fraction(1, 2)
    lam: Fraction = Fraction(1, 2)
    eta: Fraction = Fraction(1, 2)
    delta: Fraction = Fraction(2, 5)
    seed: int = 0
    C: int = 15000

    def __post_init__(self):
        for name in ("epsilon", "lam", "eta", "delta"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.lam < 1:
            raise ValueError("lambda must lie in (0, 1)")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not 0 < self.delta < Fraction(1, 2):
            raise ValueError("delta must lie in (0, 1/2)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.C < 15000:
            raise ValueError("C must be at least 15000")


# -- validators ---------------------------------------------------------------

def validate_graph(g: PartitionedGraph) -> list[str]:
    """Every violated structural invariant of ``g``; empty iff valid."""
    problems: list[str] = []
    if g.n < 0:
        problems.append("negative vertex count")
    seen: dict[int, int] = {}
    for i, U in enumerate(g.blocks):
        if not U:
            problems.append(f"block {i} is empty")
        for v in U:
            if not 0 <= v < g.n:
                problems.append(f"block {i} contains out-of-range vertex {v}")
            elif v in seen:
                problems.append(
                    f"blocks not disjoint: vertex {v} in blocks {seen[v]} and {i}")
            else:
                seen[v] = i
    uncovered = [v for v in range(g.n) if v not in seen]
    if uncovered:
        problems.append(f"vertices not covered by any block: {uncovered}")
    for u, v in sorted(g.edges):
        if u == v:
            problems.append(f"self-loop at vertex {u}")
        if not (0 <= u < g.n and 0 <= v < g.n):
            problems.append(f"edge ({u}, {v}) out of range")
    return problems


def _block_hits(g: PartitionedGraph, S: Iterable[int]) -> list[int] | None:
    hits = [0] * g.num_blocks
    for v in S:
        if not 0 <= v < g.n:
            return None
        hits[g.block_of[v]] += 1
    return hits


def is_independent(g: PartitionedGraph, S: Iterable[int]) -> bool:
    S = set(S)
    return all(not (g.nbr_sets[v] & S) for v in S)


def is_pit(g: PartitionedGraph, S: Iterable[int]) -> bool:
    S = set(S)
    hits = _block_hits(g, S)
    return hits is not None and max(hits, default=0) <= 1 and is_independent(g, S)


def is_it(g: PartitionedGraph, S: Iterable[int]) -> bool:
    S = set(S)
    hits = _block_hits(g, S)
    return hits is not None and all(h == 1 for h in hits) and is_independent(g, S)


def dominates(g: PartitionedGraph, D: Iterable[int], W: Iterable[int]) -> bool:
    """True iff every vertex of ``W`` has a neighbour in ``D``."""
    D = set(D)
    return all(g.nbr_sets[x] & D for x in W)


def block_union(g: PartitionedGraph, B: Iterable[int]) -> set[int]:
    return {v for i in B for v in g.blocks[i]}


def validate_constellation(g: PartitionedGraph, K: Constellation,
                           B: Iterable[int]) -> list[str]:
    B = set(B)
    problems: list[str] = []
    VB = block_union(g, B)
    centres, leaves = set(K.centres), set(K.leaves)
    if centres & leaves:
        problems.append("centres and leaves intersect")
    if not centres <= VB or not leaves <= VB:
        problems.append("constellation not inside V_B")
    if len(leaves) != len(B) - 1:
        problems.append(f"|leaves| = {len(leaves)} != |B|-1 = {len(B) - 1}")
    if leaves <= VB:
        hits: dict[int, int] = {}
        for v in leaves:
            hits[g.block_of[v]] = hits.get(g.block_of[v], 0) + 1
        if any(h > 1 for h in hits.values()):
            problems.append("leaves are not a PIT (two in one block)")
    for c in sorted(centres):
        if g.nbr_sets[c] & centres:
            problems.append(f"centre {c} is adjacent to another centre")
        if not g.nbr_sets[c] & leaves:
            problems.append(f"centre {c} has no leaf neighbour")
    for x in sorted(leaves):
        k = len(g.nbr_sets[x] & centres)
        if k != 1:
            problems.append(f"leaf {x} has {k} centre neighbours, expected 1")
        if g.nbr_sets[x] & leaves:
            problems.append(f"leaf {x} is adjacent to another leaf")
    return problems


def validate_blocker(g: PartitionedGraph, blk: Blocker) -> list[str]:
    """All violated clauses of the blocker certificate; empty iff valid."""
    problems: list[str] = []
    B, B0 = set(blk.blocks), set(blk.blocks0)
    D = set(blk.dominator)
    eps = Fraction(blk.epsilon)
    if eps <= 0:
        problems.append("epsilon must be positive")
    if not B:
        problems.append("B is empty")
    if not B <= B0:
        problems.append("B0 is not a superset of B")
    if any(not 0 <= i < g.num_blocks for i in B0):
        problems.append("block index out of range")
        return problems
    if any(not 0 <= v < g.n for v in D):
        problems.append("D has an out-of-range vertex")
        return problems
    VB = block_union(g, B)
    undominated = sorted(x for x in VB if not g.nbr_sets[x] & D)
    if undominated:
        problems.append(f"D does not dominate V_B (undominated: {undominated})")
    if not len(D) < (2 + eps) * (len(B) - 1):
        problems.append(f"|D| = {len(D)} is not below (2+eps)(|B|-1)")
    K = blk.constellation
    problems.extend(validate_constellation(g, K, B0))
    if not K.vertices <= D:
        problems.append("V(K) is not contained in D")
    if not len(D - K.vertices) < eps * (len(B) - 1):
        problems.append("|D \\ V(K)| is not below eps(|B|-1)")
    return problems


# -- numeric summaries ----------------------------------------------------------

def max_degree(g: GraphLike) -> int:
    if isinstance(g, BlowUp):
        return g.max_degree()
    return max((len(a) for a in g.nbr_sets), default=0)


def block_sizes(g: GraphLike) -> tuple[int, ...]:
    if isinstance(g, BlowUp):
        return g.block_sizes
    return tuple(len(U) for U in g.blocks)


def min_block_size(g: GraphLike) -> int:
    return min(block_sizes(g), default=0)


def regular_blocksize(g: GraphLike) -> int:
    """The common block size; raises :class:`NotRegular` otherwise."""
    sizes = set(block_sizes(g))
    if len(sizes) != 1:
        raise NotRegular(f"block sizes differ: {sorted(sizes)}")
    return sizes.pop()


def weight_total(g: GraphLike, w: Sequence[Number]) -> Fraction:
    if isinstance(g, BlowUp):
        return g.weight_total(w)
    return sum((Fraction(x) for x in w), Fraction(0))


def weight_norm(w: Sequence[Number]) -> Fraction:
    return sum((abs(Fraction(x)) for x in w), Fraction(0))


def wmax_block(g: PartitionedGraph, w: Sequence[Number], U: Iterable[int]) -> Fraction:
    return max(Fraction(w[u]) for u in U)


def check_weights(g: GraphLike, w: Sequence[Number]) -> tuple[Fraction, ...]:
    n = g.base.n if isinstance(g, BlowUp) else g.n
    if len(w) != n:
        raise InvalidGraph(f"weight vector has length {len(w)}, graph has {n} vertices")
    return tuple(as_fraction(x) for x in w)
