"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from fairmclp import FairnessSpec, Instance, SolveOptions, solve_continuous_fds, solve_discrete, \
    solve_row_generation
from fairmclp.experiments import ExperimentGrid, gen_instance, run_grid
from fairmclp.fairness import FAMILIES, orness_closed_form, orness_exact, owa_family_exact
from fairmclp.geometry import cluster_feasible, distance, incompatible_sets, one_center
from fairmclp.metrics import gini_index, relative_loss
from fairmclp.model_ir import (build_continuous, build_continuous_cut_model, build_discrete,
                               decompose_power, exhaustive_optimum, export, import_json, power_exponents)
from fairmclp.solver import brute_force, coverage_vectors, evaluate_batch

ALPHAS = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)]
R_CHOICES = [0.1, 0.2, 0.3, 0.4, 0.5]


@pytest.fixture
def verdict(capsys):
    def emit(num, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
        assert ok, detail
    return emit


def _seeded_instance(seed, planar_only=False):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 11))
    pts = rng.uniform(0, 1, (n, 2))
    w = rng.uniform(0, 1, n)
    if planar_only:
        return Instance.from_arrays(pts, w, name=f"acc{seed}"), rng
    m = int(rng.integers(3, 9))
    cands = rng.uniform(0, 1, (m, 2))
    return Instance.from_arrays(pts, w, candidates=cands, name=f"acc{seed}"), rng


def _same(a, b, tol):
    if a == -math.inf or b == -math.inf:
        return a == b
    return abs(a - b) <= tol


def test_criterion_1_discrete_solver_matches_exhaustive_enumeration(verdict):
    t0 = time.perf_counter()
    mismatches, checked, degenerate = [], 0, 0
    for seed in range(200):
        inst, rng = _seeded_instance(seed)
        p = int(rng.integers(1, min(3, inst.m) + 1))
        R = float(rng.choice(R_CHOICES))
        # enumerate every (selection, allocation) coverage vector once per instance
        batches = [Wm for _, _, Wm, _ in coverage_vectors(inst, p, R, "disc")]
        for fam, alpha in itertools.product(FAMILIES, ALPHAS):
            spec = FairnessSpec.of(fam, p, alpha)
            oracle = max(float(evaluate_batch(Wm, spec).max()) for Wm in batches)
            got = solve_discrete(inst, spec, p, R).objective
            checked += 1
            degenerate += oracle == -math.inf
            if not _same(got, oracle, 1e-9):
                mismatches.append((seed, fam, alpha, got, oracle))
        if seed < 10:
            # the packaged brute-force solver agrees with the batch evaluation
            for fam in FAMILIES:
                spec = FairnessSpec.of(fam, p, Fraction(1, 2))
                oracle = max(float(evaluate_batch(Wm, spec).max()) for Wm in batches)
                if not _same(brute_force(inst, spec, p, R).objective, oracle, 1e-9):
                    mismatches.append((seed, fam, "brute", None, oracle))
    secs = time.perf_counter() - t0
    ok = not mismatches and secs < 300
    verdict(1, ok, f"{checked} solves on 200 instances, {len(mismatches)} mismatches "
                   f"({degenerate} -inf optima), {secs:.1f}s (budget 300s)"
            + (f"; first mismatch {mismatches[0]}" if mismatches else ""))


def test_criterion_2_planar_methods_agree_and_centres_cover(verdict):
    t0 = time.perf_counter()
    mismatches, uncovered, checked = [], 0, 0
    for seed in range(100):
        inst, rng = _seeded_instance(10_000 + seed, planar_only=True)
        p = int(rng.integers(1, 4))
        R = float(rng.choice(R_CHOICES[:3]))
        specs = [("W", 0), ("C", 0)] + [(str(rng.choice(FAMILIES)), ALPHAS[int(rng.integers(0, 4))])
                                        for _ in range(2)]
        for fam, alpha in specs:
            spec = FairnessSpec.of(fam, p, alpha)
            fds = solve_continuous_fds(inst, spec, p, R)
            rg = solve_row_generation(inst, spec, p, R)
            checked += 1
            if not _same(fds.objective, rg.objective, 1e-9):
                mismatches.append((seed, fam, alpha, fds.objective, rg.objective))
            for sol in (fds, rg):
                for i, k in enumerate(sol.assignment):
                    if k is not None and distance(sol.positions[k], inst.points[i]) > R * (1 + 1e-9):
                        uncovered += 1
    secs = time.perf_counter() - t0
    ok = not mismatches and uncovered == 0 and secs < 600
    verdict(2, ok, f"{checked} planar problems on 100 instances, {len(mismatches)} objective mismatches, "
                   f"{uncovered} uncovered assignments, {secs:.1f}s (budget 600s)")


def test_criterion_3_owa_family_closed_forms(verdict):
    bad, notes = [], []
    for p in range(2, 11):
        for fam in FAMILIES:
            lam = owa_family_exact(fam, p)
            if sum(lam) != 1:
                bad.append((fam, p, "sum", sum(lam)))
            direct = orness_exact(lam)
            if fam in ("W", "C", "K", "G"):
                if direct != orness_closed_form(fam, p):
                    bad.append((fam, p, direct, orness_closed_form(fam, p)))
            elif fam == "H":
                if abs(float(direct) - 0.75) > 1e-9:
                    bad.append((fam, p, direct, Fraction(3, 4)))
        # the mix family's tabulated orness only matches the direct sum at beta_mix = 1/2
        beta = Fraction(1, 4)
        d_direct = orness_exact(owa_family_exact("D", p, beta_mix=beta))
        d_table = orness_closed_form("D", p, beta_mix=beta)
        if d_direct != d_table:
            notes.append(f"p={p}: direct {d_direct} vs tabulated {d_table}")
    detail = f"W, C, K, G, H orness closed forms hold for p=2..10 ({len(bad)} failures)"
    if notes:
        detail += f"; flagged mix-family (beta_mix=1/4) disagreements at {len(notes)} sizes, e.g. {notes[0]}"
    verdict(3, not bad, detail + (f"; {bad[:3]}" if bad else ""))


@pytest.fixture(scope="module")
def desk_rows():
    """Full desk grid (both spaces, all families) over 60 seeded instances."""
    rows = []
    grid = ExperimentGrid(n_values=[10], p_values=[2, 3], R_values=[0.15])
    for seed in range(60):
        inst = gen_instance(10, 2, 500 + seed, name=f"desk{seed}")
        rows.extend(run_grid(grid, inst, None))
    return rows


def test_criterion_4_baseline_identities(verdict, desk_rows):
    pof_w = [r["PoF"] for r in desk_rows if r["family"] == "W" and r["alpha"] == "0"]
    poe_c = [r["PoE"] for r in desk_rows if r["family"] == "C"]
    out_of_range = [r for r in desk_rows for k in ("PoF", "PoE", "Gini")
                    if r[k] is not None and not 0.0 <= r[k] <= 1.0]
    missing = [r for r in desk_rows if r["status"] != "Optimal"]
    ok = all(v == 0.0 for v in pof_w) and all(v == 0.0 for v in poe_c) and not out_of_range and not missing
    verdict(4, ok, f"{len(desk_rows)} rows: PoF(W,0)=0 on {sum(v == 0.0 for v in pof_w)}/{len(pof_w)}, "
                   f"PoE(C)=0 on {sum(v == 0.0 for v in poe_c)}/{len(poe_c)}, "
                   f"{len(out_of_range)} values outside [0,1], {len(missing)} non-optimal rows")


def test_criterion_5_worked_example_metrics(verdict):
    g1 = gini_index([1723, 2365, 2804])
    g2 = gini_index([2126, 2162, 2278])
    pof = relative_loss(65.7, 62.58)
    ok = (abs(g1 - 2162 / 41352) <= 1e-15 and abs(g2 - 304 / 39396) <= 1e-15
          and abs(pof - (65.7 - 62.58) / 65.7) <= 1e-6)
    verdict(5, ok, f"Gini {g1:.12f} (want {2162 / 41352:.12f}), {g2:.12f} (want {304 / 39396:.12f}), "
                   f"PoF {pof:.8f} (want {(65.7 - 62.58) / 65.7:.8f})")


def test_criterion_6_power_cone_soundness(verdict):
    rng = np.random.default_rng(6)
    counter = []
    for alpha in (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(2), Fraction(3)):
        aux, cones, _ = decompose_power("Z", "W", alpha)
        a, b = power_exponents(alpha)
        for _ in range(1000):
            Z = Fraction(int(rng.integers(0, 65)), 16)
            W = Fraction(int(rng.integers(1 if alpha > 1 else 0, 65)), 16)
            truth = Z ** b <= W ** a if alpha < 1 else Z ** b * W ** (-a) >= 1
            # largest admissible auxiliaries, bottom-up; the system is feasible iff these satisfy it
            x = {"Z": float(Z), "W": float(W)}
            for c in cones:
                h = c.u[0]
                if len(h.terms) == 1 and h.terms[0][0] not in x:
                    x[h.terms[0][0]] = math.sqrt(max(0.0, 2 * c.t.value(x) * c.s.value(x)))
            feasible = all(c.satisfied(x, tol=1e-9) for c in cones)
            if feasible != truth:
                counter.append((alpha, Z, W))
    verdict(6, not counter, f"5 exponents x 1000 grid points, {len(counter)} counterexamples")


def test_criterion_7_separation_machinery(verdict):
    bad_pool, events, violated = 0, 0, 0
    for seed in range(50):
        inst, rng = _seeded_instance(20_000 + seed, planar_only=True)
        R = float(rng.choice(R_CHOICES[:3]))
        n = inst.n
        infeasible = {Q for Q in itertools.combinations(range(n), 3) if
                      one_center(inst.coords[list(Q)]).radius > R * (1 + 1e-9)}
        pool = set(incompatible_sets(inst, R, size=3, minimal=False))
        bad_pool += len(pool ^ infeasible)
        minimal = incompatible_sets(inst, R)
        bad_pool += sum(1 for Q in minimal if cluster_feasible(Q, inst, R))
        bad_pool += sum(1 for Q in infeasible if not any(set(S) <= set(Q) for S in minimal))
        p = int(rng.integers(2, 4))
        sol = solve_row_generation(inst, FairnessSpec.of("W", p, 0), p, R,
                                   SolveOptions(mode="rowgen", warm_start="pairs"))
        evs = list(sol.stats["events"])
        if n <= 7:
            # a cold start makes the loop discover its cuts from scratch
            cold = solve_row_generation(inst, FairnessSpec.of("W", p, 0), p, R,
                                        SolveOptions(mode="rowgen", warm_start="none"))
            evs += cold.stats["events"]
        for ev in evs:
            events += 1
            lhs = sum(1 for i in ev.cluster if ev.incumbent[i] == ev.slot)
            violated += lhs > len(ev.cluster) - 1
    ok = bad_pool == 0 and events > 0 and violated == events
    verdict(7, ok, f"50 instances: {bad_pool} pool errors against exhaustive triples; "
                   f"{violated}/{events} generated cuts violated by their triggering incumbent")


def test_criterion_8_qualitative_trends(verdict, desk_rows):
    groups = {}
    for r in desk_rows:
        groups.setdefault((r["instance"], r["p"], r["space"]), {})[(r["family"], r["alpha"])] = r
    gini_c = [g[("C", "0")]["Gini"] for g in groups.values()]
    gini_w = [g[("W", "0")]["Gini"] for g in groups.values()]
    pof_c = [g[("C", "0")]["PoF"] for g in groups.values()]
    pof_w = [g[("W", "0")]["PoF"] for g in groups.values()]
    mono = sum(1 for g in groups.values()
               if g[("W", "0")]["PoE"] >= g[("W", "1/2")]["PoE"] - 1e-12 >= g[("W", "2")]["PoE"] - 2e-12)
    mg_c, mg_w = math.fsum(gini_c) / len(gini_c), math.fsum(gini_w) / len(gini_w)
    mp_c, mp_w = math.fsum(pof_c) / len(pof_c), math.fsum(pof_w) / len(pof_w)
    share = mono / len(groups)
    ok = len(groups) >= 50 and mg_c <= mg_w and mp_c >= mp_w and share >= 0.8
    verdict(8, ok, f"{len(groups)} instance/p/space groups: mean Gini C {mg_c:.4f} <= W {mg_w:.4f}; "
                   f"mean PoF C {mp_c:.4f} >= W {mp_w:.4f}; PoE non-increasing over alpha 0,1/2,2 "
                   f"for W in {share:.0%}")


def test_criterion_9_model_export(verdict):
    round_trip_fail, built = 0, 0
    for seed in range(4):
        rng = np.random.default_rng(900 + seed)
        inst = Instance.from_arrays(rng.random((4, 2)), rng.random(4) + 0.1, candidates=rng.random((3, 2)))
        for fam, alpha in itertools.product(FAMILIES, ["0", "1/2", "1", "2", "1/3", "3"]):
            spec = FairnessSpec.of(fam, 2, alpha)
            for model in (build_discrete(inst, spec, 2, 0.35), build_continuous(inst, spec, 2, 0.35),
                          build_continuous_cut_model(inst, spec, 2, 0.35)):
                built += 1
                round_trip_fail += import_json(export(model, "json")) != model
    mismatch, solved = [], 0
    for seed in range(20):
        rng = np.random.default_rng(950 + seed)
        inst = Instance.from_arrays(rng.random((3, 2)), rng.random(3) + 0.1, candidates=rng.random((3, 2)))
        fam = FAMILIES[seed % len(FAMILIES)]
        spec = FairnessSpec.of(fam, 2, 0)
        val, _ = exhaustive_optimum(build_discrete(inst, spec, 2, 0.4))
        ref = solve_discrete(inst, spec, 2, 0.4).objective
        solved += 1
        if abs(val - ref) > 1e-9:
            mismatch.append((seed, fam, val, ref))
    ok = round_trip_fail == 0 and not mismatch
    verdict(9, ok, f"{built - round_trip_fail}/{built} models round-trip through JSON; exhaustive IR optimum "
                   f"matches the discrete solver on {solved - len(mismatch)}/{solved} tiny instances")
