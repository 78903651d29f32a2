"""Line-based instance files.

::

    c any comment
    p itg <n> <m> <k>       header: vertices, edge lines, blocks
    b <id> <v> <v> ...      block id in 1..k and its vertices
    e <u> <v>               edge
    w <v> <p/q>             weight (default 0)

Vertices and block ids are 1-indexed in files and 0-indexed in memory.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import ParseError, SemanticError
from .graph import PartitionedGraph, as_fraction, fmt_rational, validate_graph


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", lineno) from None


def parse_instance(text: str) -> tuple[PartitionedGraph, list[Fraction]]:
    header = None
    blocks: dict[int, list[int]] = {}
    edges: list[tuple[int, int]] = []
    weights: dict[int, Fraction] = {}
    owner: dict[int, int] = {}

    def vertex(tok: str, lineno: int) -> int:
        v = _int(tok, lineno, "vertex")
        if not 1 <= v <= header[0]:
            raise ParseError(f"vertex {v} outside 1..{header[0]}", lineno)
        return v - 1

    for lineno, line in enumerate(text.splitlines(), 1):
        f = line.split()
        if not f or f[0] == "c":
            continue
        if f[0] == "p":
            if header is not None:
                raise ParseError("second header line", lineno)
            if len(f) != 5 or f[1] != "itg":
                raise ParseError("header must read 'p itg <n> <m> <k>'", lineno)
            header = tuple(_int(x, lineno, "header field") for x in f[2:])
            if min(header) < 0:
                raise ParseError("header fields must be non-negative", lineno)
            continue
        if header is None:
            raise ParseError(f"record {f[0]!r} before the header", lineno)
        if f[0] == "b":
            if len(f) < 3:
                raise ParseError("block line needs an id and at least one vertex", lineno)
            i = _int(f[1], lineno, "block id")
            if not 1 <= i <= header[2]:
                raise ParseError(f"block id {i} outside 1..{header[2]}", lineno)
            if i in blocks:
                raise SemanticError(f"block {i} defined twice (line {lineno})")
            members = [vertex(t, lineno) for t in f[2:]]
            for v in members:
                if v in owner:
                    raise SemanticError(
                        f"vertex {v + 1} in blocks {owner[v] + 1} and {i} (line {lineno})")
                owner[v] = i - 1
            blocks[i] = members
        elif f[0] == "e":
            if len(f) != 3:
                raise ParseError("edge line must read 'e <u> <v>'", lineno)
            u, v = vertex(f[1], lineno), vertex(f[2], lineno)
            if u == v:
                raise SemanticError(f"self-loop at vertex {u + 1} (line {lineno})")
            edges.append((u, v))
        elif f[0] == "w":
            if len(f) != 3:
                raise ParseError("weight line must read 'w <v> <p/q>'", lineno)
            v = vertex(f[1], lineno)
            try:
                x = as_fraction(f[2])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad rational {f[2]!r}", lineno) from None
            if v in weights:
                raise SemanticError(f"vertex {v + 1} weighted twice (line {lineno})")
            weights[v] = x
        else:
            raise ParseError(f"unknown record type {f[0]!r}", lineno)

    if header is None:
        raise ParseError("missing header line")
    n, m, k = header
    if len(edges) != m:
        raise SemanticError(f"header declares {m} edges, file has {len(edges)}")
    if sorted(blocks) != list(range(1, k + 1)):
        missing = sorted(set(range(1, k + 1)) - set(blocks))
        raise SemanticError(f"blocks {missing} not defined")
    uncovered = [v + 1 for v in range(n) if v not in owner]
    if uncovered:
        raise SemanticError(f"vertices {uncovered} belong to no block")
    g = PartitionedGraph(n, edges, [blocks[i] for i in range(1, k + 1)])
    problems = validate_graph(g)
    if problems:
        raise SemanticError("; ".join(problems))
    return g, [weights.get(v, Fraction(0)) for v in range(n)]


def emit_instance(g: PartitionedGraph, w: Sequence | None = None) -> str:
    out = [f"p itg {g.n} {len(g.edges)} {len(g.blocks)}"]
    for i, U in enumerate(g.blocks, 1):
        out.append(f"b {i} " + " ".join(str(v + 1) for v in U))
    out += [f"e {u + 1} {v + 1}" for u, v in sorted(g.edges)]
    if w is not None:
        out += [f"w {v + 1} {fmt_rational(x)}" for v, x in enumerate(w) if x != 0]
    return "\n".join(out) + "\n"
