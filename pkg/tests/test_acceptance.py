"""Acceptance criteria, each checked exactly (rational arithmetic, zero tolerance).

Every criterion records one PASS/FAIL line, printed as it runs and again in
the pytest terminal summary.
"""

from __future__ import annotations

import os
import random
import subprocess
import sys
from fractions import Fraction
from math import ceil

import mpmath
import pytest

from conftest import ACCEPTANCE
from indtrans.applications import (check_fractional_colouring, check_strong_colouring,
                                   fractional_strong_colouring, it_avoiding,
                                   it_pair_through, strong_colouring)
from indtrans.blocker import find_it_or_blocker
from indtrans.errors import AvoidSetTooLarge, Infeasible, InternalInvariantViolated
from indtrans.fwpit import find_weight_it_integer, find_weight_it_quantized
from indtrans.graph import (BlowUp, PartitionedGraph, Transversal, is_it,
                            validate_blocker, weight_total)
from indtrans.instance import emit_instance
from indtrans.lll import split_rounds, sparsify_and_solve, sparsify_once
from indtrans.lp import find_weighted_it, lp_feasible, round_it_lp, solve_it_lp
from indtrans.oracle import brute_max_weight_it, min_dominating_size
from instances import (G_A, G_B, G_C, W_A, bounded_degree_graph, random_partitioned,
                       sparse_instance)

HALF = Fraction(1, 2)


def record(key: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[key] = (ok, detail)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_weighted_it_guarantee():
    rng = random.Random(1001)
    bad = []
    for i in range(300):
        g = sparse_instance(rng, HALF, nmax=12, sizes=(2, 3, 4))
        b = len(g.blocks[0])
        w = [rng.randint(-9, 9) for _ in range(g.n)]
        M = find_weighted_it(g, w, HALF, seed=i)
        best = brute_max_weight_it(g, w)
        if not (is_it(g, M) and b * M.weight(w) >= sum(w) and M.weight(w) <= best[0]):
            bad.append(i)
    record("1", not bad, f"300 instances, {len(bad)} violations of b*w(M) >= w(G) <= brute")
    assert not bad


def _sparse_integer_instance(rng: random.Random) -> PartitionedGraph:
    b = rng.choice([3, 4, 5, 6])
    k = rng.randint(2, max(2, 14 // b))
    return bounded_degree_graph(rng, k, b, (b - 1) // 2, tries=rng.randint(k * b, 4 * k * b))


def test_criterion_2_recursion_internals():
    rng = random.Random(2002)
    violations = []
    levels = 0
    for i in range(200):
        g = _sparse_integer_instance(rng)
        b = len(g.blocks[0])
        w = [rng.randint(-9, 9) for _ in range(g.n)]
        try:
            # the run itself raises on a swap that lowers w'(M) or any other failed check
            M, tr = find_weight_it_integer(g, w)
        except InternalInvariantViolated as e:
            violations.append((i, str(e)))
            continue
        phi = tr.phi_values
        if any(a - c < b for a, c in zip(phi, phi[1:])):
            violations.append((i, "potential drop"))
        if not tr.recursion_depth * b <= phi[0]:
            violations.append((i, "depth"))
        for size, hits in zip(tr.blocker_sizes, tr.dominator_hits):
            if not hits > (1 - Fraction(1, 16 * b)) * (size - 1):
                violations.append((i, "dominator hits"))
        if not (is_it(g, M) and b * M.weight(w) >= sum(w)):
            violations.append((i, "final weight"))
        levels += tr.recursion_depth
    record("2", not violations and levels > 0,
           f"200 instances, {levels} blocker levels, {len(violations)} violations")
    assert not violations and levels > 0


def test_criterion_3_blocker_certificates():
    rng = random.Random(3003)
    graphs = [random_partitioned(rng, nmax=10, kmax=4, pmax=0.7) for _ in range(500)]
    graphs += [G_A, G_B, G_C,
               PartitionedGraph(3, [(0, 1), (1, 2), (0, 2)], [(0,), (1,), (2,)]),
               PartitionedGraph(4, [(0, 2), (0, 3), (1, 2), (1, 3)], [(0, 1), (2, 3)])]
    eps = Fraction(1, 8)
    free = bad = 0
    for g in graphs:
        res = find_it_or_blocker(g, eps)
        if isinstance(res, Transversal):
            continue
        free += 1
        VB = [v for i in res.blocks for v in g.blocks[i]]
        if (validate_blocker(g, res) or len(res.dominator) > 2 * (len(res.blocks) - 1)
                or min_dominating_size(g, VB) > len(res.dominator)):
            bad += 1
    record("3", bad == 0 and free > 0, f"{free} IT-free instances, {bad} violations")
    assert bad == 0 and free > 0


def test_criterion_4_quantization():
    rng = random.Random(4004)
    bad = 0
    for i in range(100):
        g = _sparse_integer_instance(rng)
        b = len(g.blocks[0])
        w = [Fraction(rng.randint(0, 50), rng.randint(1, 12)) for _ in range(g.n)]
        eta = (HALF, Fraction(1, 8))[i % 2]
        M = find_weight_it_quantized(g, w, eta)
        if not (is_it(g, M) and b * M.weight(w) >= (1 - eta) * weight_total(g, w)):
            bad += 1
    record("4", bad == 0, f"100 instances, eta in {{1/2, 1/8}}, {bad} violations")
    assert bad == 0


def _mp_threshold_ceiling(d: Fraction) -> int:
    mpmath.mp.dps = 50
    x = mpmath.mpf(d.numerator) / d.denominator
    return int(mpmath.ceil(x / 2 + 10 * mpmath.sqrt(x * mpmath.log(x))))


def _blowup(seed: int, k: int, base_per_block: int, copies: int, dmax: int) -> BlowUp:
    rng = random.Random(seed)
    n = k * base_per_block
    cap = dmax // copies
    deg = [0] * n
    edges = set()
    for _ in range(n * cap * 3):
        u, v = rng.sample(range(n), 2)
        if u // base_per_block == v // base_per_block or deg[u] >= cap or deg[v] >= cap:
            continue
        e = (min(u, v), max(u, v))
        if e not in edges:
            edges.add(e)
            deg[u] += 1
            deg[v] += 1
    blocks = [range(i * base_per_block, (i + 1) * base_per_block) for i in range(k)]
    return BlowUp(PartitionedGraph(n, edges, blocks), (copies,) * n)


def test_criterion_5_degree_splitting():
    bu = _blowup(5005, 4, 150, 100, 6000)
    b = 15000
    assert bu.block_sizes == (b,) * 4 and bu.max_degree() <= 6000
    rng = random.Random(5)
    w = [rng.randint(0, 20) for _ in range(bu.base.n)]
    out = sparsify_once(bu, w, seed=55)
    dhat = max(Fraction(b, 3), Fraction(bu.max_degree()))
    limit = _mp_threshold_ceiling(dhat)
    ok1 = out.block_sizes == (7500,) * 4
    ok2 = out.max_degree() <= limit
    ok3 = out.weight_total(w) / 7500 >= bu.weight_total(w) / b * (1 - Fraction(1, b ** 10))
    record("5", ok1 and ok2 and ok3,
           f"blocks {sorted(set(out.block_sizes))}, Delta' {out.max_degree()} <= {limit}, "
           f"weight ratio {'ok' if ok3 else 'low'} (Delta={bu.max_degree()})")
    assert ok1 and ok2 and ok3


@pytest.mark.slow
def test_criterion_5_multi_round_solve():
    eps = lam = Fraction(9, 10)
    bu = _blowup(5006, 3, 300, 200, 20000)
    b = 60000
    rng = random.Random(6)
    w = [rng.randint(0, 9) for _ in range(bu.base.n)]
    sched, graphs = split_rounds(bu, w, eps, lam, seed=7)
    rows_ok = sched.t == 1 and all(2 * d <= bi <= 3 * d for _, bi, d in sched.rows)
    M = sparsify_and_solve(bu, w, eps, lam, seed=7)
    ok = rows_ok and is_it(bu.base, M) and b * M.weight(w) >= (1 - lam) * bu.weight_total(w)
    record("5.slow", ok, f"b={b}, t={sched.t}, b*w(M) >= (1-lambda)w(G): {ok}")
    assert ok


def test_criterion_6_fixture_tau_as_stated():
    tau = solve_it_lp(G_A, W_A, Fraction(49, 100)).tau
    ok = tau == 5
    record("6.fixture", ok, f"G_A at delta=49/100: tau = {tau}, stated value 5")
    assert ok


def test_criterion_6_lp_rounding():
    tau_a = solve_it_lp(G_A, W_A, Fraction(49, 100)).tau
    try:
        solve_it_lp(G_B, [1, 1], Fraction(2, 5))
        gb_infeasible = False
    except Infeasible:
        gb_infeasible = True
    rng = random.Random(6006)
    done = bad = 0
    while done < 100:
        g = random_partitioned(rng, nmax=9, kmax=4, pmax=0.4)
        w = [rng.randint(-5, 9) for _ in range(g.n)]
        delta = rng.choice([Fraction(1, 3), Fraction(2, 5), Fraction(9, 20), Fraction(49, 100)])
        try:
            lp = solve_it_lp(g, w, delta)
        except Infeasible:
            continue
        M = round_it_lp(g, w, delta, seed=done)
        if not (lp_feasible(g, lp.gamma, delta)
                and sum(x * y for x, y in zip(lp.gamma, w)) == lp.tau
                and is_it(g, M) and M.weight(w) >= lp.tau):
            bad += 1
        done += 1
    ok = tau_a == Fraction(49, 10) and gb_infeasible and bad == 0
    record("6.rounding", ok, f"G_A tau={tau_a}, G_B infeasible={gb_infeasible}, "
           f"100 feasible instances with {bad} violations")
    assert ok


def _irregular_sparse(rng: random.Random, eps: Fraction) -> PartitionedGraph:
    bmin = rng.choice([3, 5, 6])
    d = 0
    while ceil((2 + eps) * (d + 1)) <= bmin:
        d += 1
    sizes = [bmin + rng.randint(0, 2) for _ in range(rng.randint(1, 3))]
    n = sum(sizes)
    blocks, start = [], 0
    for s in sizes:
        blocks.append(range(start, start + s))
        start += s
    deg = [0] * n
    edges = set()
    for _ in range(rng.randint(0, 3 * n)):
        u, v = rng.sample(range(n), 2)
        if deg[u] < d and deg[v] < d and (min(u, v), max(u, v)) not in edges:
            edges.add((min(u, v), max(u, v)))
            deg[u] += 1
            deg[v] += 1
    return PartitionedGraph(n, edges, blocks)


def test_criterion_7_restricted_its():
    rng = random.Random(7007)
    bad = 0
    for i in range(100):
        g = _irregular_sparse(rng, HALF)
        bmin = min(len(U) for U in g.blocks)
        L = set(rng.sample(range(g.n), rng.randint(0, bmin - 1)))
        M = it_avoiding(g, L, HALF, seed=i)
        if not is_it(g, M) or set(M) & L:
            bad += 1
        U = list(g.blocks[rng.randrange(len(g.blocks))])
        v1, v2 = rng.choice(U), rng.choice(U)
        M1, M2 = it_pair_through(g, v1, v2, HALF, seed=i)
        if not (v1 in M1 and v2 in M2 and set(M1) - {v1} == set(M2) - {v2}):
            bad += 1
        try:
            it_avoiding(g, set(rng.sample(range(g.n), bmin)), HALF, seed=i)
            bad += 1
        except AvoidSetTooLarge:
            pass
    record("7", bad == 0, f"100 instances, {bad} violations")
    assert bad == 0


def test_criterion_8_strong_colouring():
    rng = random.Random(8008)
    bad = 0
    for i in range(100):
        d = rng.randint(1, 4)
        b = ceil((3 + HALF) * d)
        g = bounded_degree_graph(rng, rng.randint(1, 3), b, d, cross_only=rng.random() < 0.5)
        sc = strong_colouring(g, HALF, seed=i)
        if (sc.b != b or check_strong_colouring(g, sc) or len(sc.history) > g.n
                or any(a >= c for a, c in zip(sc.history, sc.history[1:]))):
            bad += 1
    record("8", bad == 0, f"100 instances, {bad} violations")
    assert bad == 0


def test_criterion_9_fractional_strong_colouring():
    rng = random.Random(9009)
    bad = 0
    for i in range(50):
        g = sparse_instance(rng, HALF, nmax=12, sizes=(3, 4, 5, 6))
        fc = fractional_strong_colouring(g, HALF, seed=i)
        if check_fractional_colouring(g, fc) or sum(f for _, f in fc.parts) != fc.b:
            bad += 1
    record("9", bad == 0, f"50 instances, {bad} violations")
    assert bad == 0


def test_criterion_10_determinism(tmp_path):
    a = tmp_path / "a.itg"
    a.write_text(emit_instance(G_A, W_A))
    bfile = tmp_path / "b.itg"
    bfile.write_text(emit_instance(G_B, [1, 1]))
    rng = random.Random(10)
    r = tmp_path / "r.itg"
    g = sparse_instance(rng, HALF, nmax=12, sizes=(6,))
    r.write_text(emit_instance(g, [rng.randint(0, 9) for _ in range(g.n)]))
    s = tmp_path / "s.itg"
    s.write_text(emit_instance(PartitionedGraph(8, [(0, 4)], [range(4), range(4, 8)]),
                               [1] * 8))
    big = tmp_path / "big.itg"
    big.write_text(emit_instance(PartitionedGraph(30000, [(0, 15000), (1, 15001)],
                                                  [range(15000), range(15000, 30000)]),
                                 [1] * 30000))
    cert = tmp_path / "cert.txt"
    cert.write_text("s IT 1 5\n")
    combos = [
        ["it", a], ["it", a, "--method", "direct"], ["it", bfile], ["it", r, "--seed", "4"],
        ["it", r, "--format", "json"],
        ["it-avoid", a, "--avoid", "2"], ["it-avoid", r, "--avoid", "1,2", "--seed", "9"],
        ["it-through", a, "--via", "1,2"], ["it-through", r, "--via", "3"],
        ["pit", a], ["pit", bfile, "--delta", "1/3"],
        ["lp", a, "--delta", "49/100"], ["lp", bfile, "--pit"], ["lp", r, "--format", "json"],
        ["strong-colour", s, "--seed", "2"], ["strong-colour", a],
        ["frac-strong-colour", a, "--seed", "5"], ["frac-strong-colour", r],
        ["sparsify", big, "--rounds", "1", "--seed", "8"],
        ["check", a, "--certificate", cert],
    ]
    env = dict(os.environ, INDTRANS_SEED="0")
    differing = []
    for argv in combos:
        argv = [str(x) for x in argv]
        runs = [subprocess.run([sys.executable, "-m", "indtrans.cli", *argv],
                               capture_output=True, env=env) for _ in range(2)]
        if runs[0].stdout != runs[1].stdout or runs[0].returncode != runs[1].returncode:
            differing.append(" ".join(argv[:1]))
    ok = len(combos) == 20 and not differing
    record("10", ok, f"{len(combos)} combinations, {len(differing)} non-identical {differing}")
    assert ok
