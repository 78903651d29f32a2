"""Command-line front end.

Output is line based: ``s`` lines carry the solution, ``c`` lines carry
values and remarks.  Vertices and blocks are printed 1-indexed, rationals
as ``p/q``.  Exit codes: 0 success, 1 bad input, 2 unmet precondition,
3 infeasible / blocked / rejected certificate, 4 budget exhausted,
5 internal check failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import applications as apps
from .blocker import find_it_or_blocker
from .errors import (BudgetExceeded, Infeasible, InternalInvariantViolated,
                     ParseError, PreconditionViolated, SemanticError, TooLarge,
                     Unbounded)
from .fwpit import find_weight_it_quantized
from .graph import (Blocker, BlowUp, Constellation, PartitionedGraph, Transversal,
                    as_fraction, fmt_rational, is_it, is_pit, max_degree,
                    min_block_size, regular_blocksize, validate_blocker)
from .instance import parse_instance
from .lll import build_schedule, sparsify_once
from .lp import find_weighted_it, lp_feasible, round_pit_lp, solve_it_lp, solve_pit_lp

SEED_ENV = "INDTRANS_SEED"
EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_NEGATIVE, EXIT_BUDGET, EXIT_INTERNAL = range(6)


@dataclass
class Report:
    lines: list[str] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)
    code: int = EXIT_OK


def _ids(S) -> list[int]:
    return [v + 1 for v in sorted(S)]


def _csv(S) -> str:
    return ",".join(str(v) for v in _ids(S))


def _set_report(rep: Report, kind: str, S: Transversal, w: Sequence[Fraction]) -> None:
    rep.lines += [f"s {kind} " + " ".join(map(str, _ids(S))),
                  f"c weight {fmt_rational(S.weight(w))}"]
    rep.data.setdefault("sets", []).append(
        {"kind": kind, "vertices": _ids(S), "weight": fmt_rational(S.weight(w))})


def _blocked(blk: Blocker) -> Report:
    line = (f"s BLOCKED b={_csv(blk.blocks)} b0={_csv(blk.blocks0)} D={_csv(blk.dominator)} "
            f"centres={_csv(blk.constellation.centres)} leaves={_csv(blk.constellation.leaves)} "
            f"eps={fmt_rational(blk.epsilon)}")
    data = {"status": "blocked", "blocks": _ids(blk.blocks), "blocks0": _ids(blk.blocks0),
            "dominator": _ids(blk.dominator), "centres": _ids(blk.constellation.centres),
            "leaves": _ids(blk.constellation.leaves), "epsilon": fmt_rational(blk.epsilon)}
    return Report([line], data, EXIT_NEGATIVE)


def _vertex_list(text: str, g: PartitionedGraph) -> list[int]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            v = int(tok)
        except ValueError:
            raise ParseError(f"bad vertex {tok!r} in {text!r}") from None
        if not 1 <= v <= g.n:
            raise ParseError(f"vertex {v} outside 1..{g.n}")
        out.append(v - 1)
    return out


def cmd_it(g: PartitionedGraph, w: list[Fraction], a: argparse.Namespace) -> Report:
    rep = Report()
    regular = len({len(U) for U in g.blocks}) == 1
    b, d = min_block_size(g), max_degree(g)
    if not (regular and b >= (2 + a.epsilon) * d):
        res = find_it_or_blocker(g, a.epsilon)
        if isinstance(res, Blocker):
            return _blocked(res)
        raise PreconditionViolated(
            f"an IT exists, but the weight guarantee needs equal blocks of size "
            f">= (2+eps)*Delta (blocks {sorted({len(U) for U in g.blocks})}, Delta={d})")
    if a.method == "direct":
        M = find_weight_it_quantized(g, w, a.eta)
    else:
        M = find_weighted_it(g, w, a.epsilon, a.seed)
    _set_report(rep, "IT", M, w)
    return rep


def cmd_it_avoid(g, w, a) -> Report:
    rep = Report()
    M = apps.it_avoiding(g, _vertex_list(a.avoid, g), a.epsilon, a.seed)
    _set_report(rep, "IT", M, w)
    return rep


def cmd_it_through(g, w, a) -> Report:
    rep = Report()
    via = _vertex_list(a.via, g)
    if len(via) not in (1, 2):
        raise ParseError("--via takes one or two vertices")
    if len(via) == 1:
        _set_report(rep, "IT", apps.it_through(g, via[0], a.epsilon, a.seed), w)
    else:
        for M in apps.it_pair_through(g, via[0], via[1], a.epsilon, a.seed):
            _set_report(rep, "IT", M, w)
    return rep


def cmd_pit(g, w, a) -> Report:
    rep = Report()
    _set_report(rep, "PIT", round_pit_lp(g, w, a.delta, a.seed), w)
    return rep


def cmd_lp(g, w, a) -> Report:
    kind = "pit" if a.pit else "it"
    head = [f"c lp {kind}", f"c delta {fmt_rational(a.delta)}"]
    try:
        res = (solve_pit_lp if a.pit else solve_it_lp)(g, w, a.delta)
    except Infeasible:
        return Report(head + ["s INFEASIBLE"],
                      {"lp": kind, "delta": fmt_rational(a.delta), "status": "infeasible"},
                      EXIT_NEGATIVE)
    lines = head + [f"c tau {fmt_rational(res.tau)}",
                    "s GAMMA " + " ".join(fmt_rational(x) for x in res.gamma)]
    return Report(lines, {"lp": kind, "delta": fmt_rational(a.delta), "status": "optimal",
                          "tau": fmt_rational(res.tau),
                          "gamma": [fmt_rational(x) for x in res.gamma]})


def cmd_strong_colour(g, w, a) -> Report:
    sc = apps.strong_colouring(g, a.epsilon, a.seed)
    pairs = [f"{v + 1}:{c}" for v, c in enumerate(sc.colour)]
    return Report([f"c colours {sc.b}", f"c rounds {len(sc.history)}", "s COL " + " ".join(pairs)],
                  {"colours": sc.b, "rounds": len(sc.history), "colour": list(sc.colour)})


def cmd_frac_strong_colour(g, w, a) -> Report:
    fc = apps.fractional_strong_colouring(g, a.epsilon, a.seed, a.budget)
    lines = [f"c parts {len(fc.parts)}"]
    parts = []
    for S, f in sorted(fc.parts, key=lambda p: _ids(p[0])):
        lines.append(f"s PART f={fmt_rational(f)} " + " ".join(map(str, _ids(S))))
        parts.append({"f": fmt_rational(f), "vertices": _ids(S)})
    return Report(lines, {"b": fc.b, "parts": parts})


def cmd_sparsify(g, w, a) -> Report:
    bu = BlowUp.of(g)
    rounds = a.rounds
    if rounds is None:
        rounds = build_schedule(regular_blocksize(g), a.epsilon, a.lam).t
    lines, data = [], {"rounds": []}
    for i in range(rounds):
        bu = sparsify_once(bu, w, a.seed, round_index=i, budget=a.budget)
        b, d = bu.block_sizes[0], bu.max_degree()
        lines.append(f"c round {i + 1} b={b} maxdeg={d}")
        data["rounds"].append({"b": b, "maxdeg": d})
    kept = bu.active
    lines += [f"c weight {fmt_rational(bu.weight_total(w))}",
              "s SUBGRAPH " + " ".join(map(str, _ids(kept)))]
    data.update(vertices=_ids(kept), weight=fmt_rational(bu.weight_total(w)))
    return Report(lines, data)


def _fields(tokens: Sequence[str]) -> dict[str, str]:
    out = {}
    for tok in tokens:
        key, _, val = tok.partition("=")
        out[key] = val
    return out


def _check_certificate(g: PartitionedGraph, w: list[Fraction], text: str) -> list[str]:
    problems: list[str] = []
    parts: list[tuple[Transversal, Fraction]] = []
    comments: dict[str, str] = {}
    solutions = 0

    def vs(items: Sequence[str]) -> list[int]:
        return [int(x) - 1 for x in items if x]

    last_set: Transversal | None = None
    for line in text.splitlines():
        f = line.split()
        if len(f) < 2:
            continue
        if f[0] == "c":
            comments[f[1]] = " ".join(f[2:])
            if f[1] == "weight" and last_set is not None:
                if last_set.weight(w) != as_fraction(f[2]):
                    problems.append(f"stated weight {f[2]} != {fmt_rational(last_set.weight(w))}")
            continue
        if f[0] != "s":
            continue
        solutions += 1
        kind, rest = f[1], f[2:]
        last_set = None
        if kind in ("IT", "PIT"):
            S = vs(rest)
            ok = (is_it if kind == "IT" else is_pit)(g, S)
            if not ok or len(set(S)) != len(S):
                problems.append(f"{kind} {' '.join(rest)} is not a valid {kind}")
            else:
                last_set = Transversal(tuple(S), kind)
        elif kind == "BLOCKED":
            x = _fields(rest)
            blk = Blocker(frozenset(vs(x["b"].split(","))), frozenset(vs(x["b0"].split(","))),
                          frozenset(vs(x["D"].split(","))),
                          Constellation(frozenset(vs(x["centres"].split(","))),
                                        frozenset(vs(x["leaves"].split(",")))),
                          as_fraction(x["eps"]))
            problems += validate_blocker(g, blk)
        elif kind == "COL":
            colour = [None] * g.n
            for tok in rest:
                v, _, c = tok.partition(":")
                colour[int(v) - 1] = int(c)
            b = int(comments.get("colours", max(len(U) for U in g.blocks)))
            problems += apps.check_strong_colouring(g, apps.StrongColouring(tuple(colour), b))
        elif kind == "PART":
            fval = as_fraction(_fields(rest[:1])["f"])
            parts.append((Transversal(tuple(vs(rest[1:])), "IT"), fval))
        elif kind in ("GAMMA", "INFEASIBLE"):
            delta = as_fraction(comments["delta"])
            pit = comments.get("lp") == "pit"
            try:
                res = (solve_pit_lp if pit else solve_it_lp)(g, w, delta)
            except Infeasible:
                res = None
            if kind == "INFEASIBLE":
                if res is not None:
                    problems.append("LP reported infeasible but has a solution")
            else:
                gamma = [as_fraction(x) for x in rest]
                if not lp_feasible(g, gamma, delta, pit=pit):
                    problems.append("gamma violates the LP constraints")
                val = sum((x * y for x, y in zip(gamma, w)), Fraction(0))
                if fmt_rational(val) != comments.get("tau"):
                    problems.append(f"tau {comments.get('tau')} != objective {fmt_rational(val)}")
                if res is None or res.tau != val:
                    problems.append("gamma is not optimal")
        elif kind == "SUBGRAPH":
            kept = set(vs(rest))
            sizes = {sum(1 for v in U if v in kept) for U in g.blocks}
            if len(sizes) != 1:
                problems.append(f"subgraph blocks have sizes {sorted(sizes)}")
        else:
            problems.append(f"unknown solution line {kind!r}")
    if parts:
        b = regular_blocksize(g)
        problems += apps.check_fractional_colouring(g, apps.FractionalColouring(tuple(parts), b))
    if not solutions:
        problems.append("certificate has no solution lines")
    return problems


def cmd_check(g, w, a) -> Report:
    try:
        with open(a.certificate) as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read certificate: {e}") from None
    if text.lstrip().startswith("{"):
        raise ParseError("certificates must be in text format (run without --format json)")
    try:
        problems = _check_certificate(g, w, text)
    except (KeyError, ValueError, IndexError, ZeroDivisionError) as e:
        raise ParseError(f"malformed certificate: {e!r}") from None
    if problems:
        return Report(["s INVALID"] + [f"c {p}" for p in problems],
                      {"valid": False, "problems": problems}, EXIT_NEGATIVE)
    return Report(["s VALID"], {"valid": True})


COMMANDS: dict[str, Callable[[PartitionedGraph, list[Fraction], argparse.Namespace], Report]] = {
    "it": cmd_it,
    "it-avoid": cmd_it_avoid,
    "it-through": cmd_it_through,
    "pit": cmd_pit,
    "lp": cmd_lp,
    "strong-colour": cmd_strong_colour,
    "frac-strong-colour": cmd_frac_strong_colour,
    "sparsify": cmd_sparsify,
    "check": cmd_check,
}


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _seed(text: str) -> int:
    try:
        s = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}") from None
    if not 0 <= s < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return s


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", help="instance file ('-' for stdin)")
    common.add_argument("--epsilon", type=_rational, default=Fraction(1, 2))
    common.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(1, 2))
    common.add_argument("--eta", type=_rational, default=Fraction(1, 2))
    common.add_argument("--delta", type=_rational, default=Fraction(2, 5))
    common.add_argument("--seed", type=_seed, default=None,
                        help=f"random seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--budget", type=int, default=None,
                        help="cap on resamples (sparsify) or generated columns")

    p = argparse.ArgumentParser(prog="indtrans", description="Weighted independent transversals.")
    sub = p.add_subparsers(dest="command", required=True)
    it = sub.add_parser("it", parents=[common], help="IT of weight >= w(G)/b")
    it.add_argument("--method", choices=("lp", "direct"), default="lp",
                    help="LP rounding, or the direct recursion on quantized weights")
    sub.add_parser("it-avoid", parents=[common], help="IT avoiding a vertex set") \
        .add_argument("--avoid", required=True, help="comma-separated vertices")
    sub.add_parser("it-through", parents=[common], help="IT(s) through given vertices") \
        .add_argument("--via", required=True, help="v or v1,v2 from one block")
    sub.add_parser("pit", parents=[common], help="PIT of weight >= PIT-LP optimum")
    sub.add_parser("lp", parents=[common], help="solve the LP relaxation exactly") \
        .add_argument("--pit", action="store_true", help="block sums <= 1 instead of = 1")
    sub.add_parser("strong-colour", parents=[common], help="strong b-colouring")
    sub.add_parser("frac-strong-colour", parents=[common], help="fractional strong colouring")
    sub.add_parser("sparsify", parents=[common], help="random degree-splitting rounds") \
        .add_argument("--rounds", type=int, default=None)
    sub.add_parser("check", parents=[common], help="validate a certificate") \
        .add_argument("--certificate", required=True)
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise ParseError(f"cannot read instance: {e}") from None


def _emit(rep: Report, a: argparse.Namespace, out) -> None:
    if a.format == "json":
        data = dict(rep.data, command=a.command)
        out.write(json.dumps(data, sort_keys=True) + "\n")
    else:
        out.write("".join(line + "\n" for line in rep.lines))


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    a = build_parser().parse_args(argv)
    if a.seed is None:
        try:
            a.seed = _seed(os.environ.get(SEED_ENV, "0"))
        except argparse.ArgumentTypeError as e:
            err.write(f"error: {SEED_ENV}: {e}\n")
            return EXIT_INPUT
    try:
        g, w = parse_instance(_read(a.instance))
        rep = COMMANDS[a.command](g, w, a)
    except (ParseError, SemanticError) as e:
        err.write(f"error: {e}\n")
        return EXIT_INPUT
    except (PreconditionViolated, TooLarge) as e:
        err.write(f"error: precondition: {e}\n")
        return EXIT_PRECONDITION
    except Infeasible as e:
        err.write(f"error: infeasible: {e}\n")
        return EXIT_NEGATIVE
    except BudgetExceeded as e:
        err.write(f"error: budget: {e}\n")
        return EXIT_BUDGET
    except (InternalInvariantViolated, Unbounded) as e:
        err.write(f"error: internal check failed: {e}\n")
        return EXIT_INTERNAL
    _emit(rep, a, out)
    return rep.code


if __name__ == "__main__":
    sys.exit(main())
