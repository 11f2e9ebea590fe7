"""Acceptance criteria at their stated sizes and tolerances.

Each test prints one PASS/FAIL line (collected again in the terminal summary).
"""
import os
import subprocess
import sys
import time

import pytest

from percolate import geometry as G
from percolate.arms import PI3, PI5, edge_arm_event
from percolate.distance import crossing_lengths
from percolate.harness import (
    _check_arms, _check_lowest, n1_monte_carlo, pi_estimate, run_crossing, run_dtail, run_radial,
)
from percolate.lattice import sample_config
from percolate.oracles import n1_exact
from percolate.shortcut import build_shortcut, find_all_detours

pytestmark = pytest.mark.acceptance

SEED = 20240601


def _sup(v):
    return max(abs(v[0]), abs(v[1]))


def test_n1_oracle_equivalence(verdict):
    t0 = time.perf_counter()
    mc = n1_monte_carlo(10**6, SEED)
    ex = n1_exact()
    dt = time.perf_counter() - t0
    keys = ("P_H", "E_S_given_H", "E_SB_given_A")
    within = {k: abs(mc[k].value - ex[k]) <= 3 * mc[k].stderr for k in keys}
    detail = ", ".join(f"{k}={mc[k].value:.6f}/{ex[k]:.6f}" for k in keys) + f", {dt:.1f}s"
    verdict("1 n=1 Monte Carlo within 3 stderr of enumeration", all(within.values()) and dt < 120, detail)


def test_lowest_crossing_oracle(verdict):
    t0 = time.perf_counter()
    c = _check_lowest(200, SEED)
    dt = time.perf_counter() - t0
    verdict("2 lowest crossing vs minimal-region oracle", c.total == 200 and c.passed and dt < 60,
            f"{c.agree}/{c.total}, {dt:.1f}s")


def test_arm_detector_oracle(verdict):
    t0 = time.perf_counter()
    checks = _check_arms(500, (2, 3, 4), SEED)
    dt = time.perf_counter() - t0
    ok = len(checks) == 9 and all(c.passed and c.total == 500 for c in checks) and dt < 600
    verdict("3 arm detector vs packing oracle", ok,
            "; ".join(f"{c.name.split()[2]} {c.name.split()[3]}: {c.agree}/{c.total}" for c in checks)
            + f", {dt:.1f}s")


def test_five_arm_ratios(verdict):
    t0 = time.perf_counter()
    pi = {r: pi_estimate(PI5, r, 10**6, SEED) for r in (8, 16, 32)}
    dt = time.perf_counter() - t0
    ratios = {n: pi[2 * n].value / pi[n].value for n in (8, 16)}
    ok = all(0.15 <= r <= 0.40 for r in ratios.values()) and dt < 1800
    verdict("4 pi5(2n)/pi5(n) in [0.15, 0.40]", ok,
            ", ".join(f"n={n}: {r:.4f}" for n, r in ratios.items()) + f", {dt:.1f}s")


def test_dtail_band(verdict):
    t0 = time.perf_counter()
    res = run_dtail(6, 10**6, SEED, pi_trials=10**6, pi_kmax=5)
    dt = time.perf_counter() - t0
    by = res.summary["by_k"]
    ratios = {k: by[k]["ratio"] for k in range(2, 6)}
    scaled = min(by[k]["scaled"] for k in range(2, 7))
    ok = all(0.05 <= r <= 20 for r in ratios.values()) and scaled >= 0.01 and dt < 1800
    verdict("5 P(D=k)/pi4 band and non-vanishing 4^(k-1) P(D=k)", ok,
            ", ".join(f"k={k}: {r:.3f}" for k, r in ratios.items()) + f"; min scaled {scaled:.4f}, {dt:.1f}s")


def _open_horizontal_crossing(cfg, path) -> bool:
    n = cfg.n
    vs = path.vertices
    return (path.self_avoiding and vs[0][0] == -n and vs[-1][0] == n
            and all(_sup(v) <= n for v in vs) and all(cfg.is_open(e) for e in path.edges))


def test_shortcut_invariants(verdict):
    n, eps = 64, 0.5
    t0 = time.perf_counter()
    accepted = violations = with_detour = 0
    trial = 0
    while accepted < 1000:
        cfg = sample_config(n, 0.5, SEED, trial)
        trial += 1
        cl = crossing_lengths(cfg)
        if cl is None:
            continue
        accepted += 1
        S, L = cl
        low = G.lowest_crossing(cfg)
        plan = build_shortcut(cfg, low, list(find_all_detours(cfg, low, eps).values()))
        spans = sorted((low.vertices.index(d.w0), low.vertices.index(d.wM)) for d in plan.Pi)
        bad = (not _open_horizontal_crossing(cfg, plan.sigma)
               or not S <= len(plan.sigma) <= L
               or any(b0 >= a1 for (_, b0), (a1, _) in zip(spans, spans[1:]))
               or any(len(d.P) > eps * len(d.Q) for d in plan.Pi))
        violations += bad
        with_detour += bool(plan.Pi)
    dt = time.perf_counter() - t0
    verdict("6 shortcut invariants on H_64, eps=0.5", violations == 0 and dt < 900,
            f"{accepted} accepted, {violations} violations, {with_detour} with detours, {dt:.1f}s")


def test_three_arms_along_radial_path(verdict):
    n = 32
    t0 = time.perf_counter()
    samples = violations = 0
    trial = 0
    while samples < 100:
        cfg = sample_config(n, 0.5, SEED, trial)
        trial += 1
        if not G.connected(cfg, [(0, 0)], G.boundary_vertices(n)) or G.open_circuits_around_origin(cfg):
            continue
        samples += 1
        for e in G.leftmost_radial_path(cfg).edges:
            ends = e.endpoints()
            r = min(min(_sup(v) for v in ends), min(n - _sup(v) for v in ends))
            violations += not edge_arm_event(cfg, e, r, PI3)
    dt = time.perf_counter() - t0
    verdict("7 ooc arms along the left-most radial path on A_32 minus C_0",
            violations == 0 and dt < 600, f"{samples} samples, {violations} violations, {dt:.1f}s")


def test_trends(verdict):
    t0 = time.perf_counter()
    sl = {}
    for n in (32, 64, 128):
        res = run_crossing(n, None, SEED, accepted=200)
        assert res.summary["S"]["accepted"] >= 200
        sl[n] = res.summary["S_over_L"]["value"]
    rad = {n: run_radial(n, 20000, SEED, pi_trials=100000).summary["ratio"] for n in (32, 128)}
    dt = time.perf_counter() - t0
    ok = sl[32] > sl[64] > sl[128] and rad[128] <= 1.5 * rad[32] and dt < 2700
    verdict("8 S/L decreasing and radial ratio bounded", ok,
            "S/L " + ", ".join(f"{n}: {v:.4f}" for n, v in sl.items())
            + "; ratio " + ", ".join(f"{n}: {v:.4f}" for n, v in rad.items()) + f", {dt:.1f}s")


CLI_STUDIES = [
    ["sample", "--n", "3", "--seed", "5"],
    ["arms", "--spec", "ococ", "--outer", "8", "--trials", "10000", "--seed", "1"],
    ["radial", "--n", "8", "--trials", "10000", "--seed", "2"],
    ["crossing", "--n", "8", "--trials", "10000", "--seed", "3", "--eps", "1"],
    ["shortcut", "--n", "16", "--eps", "1", "--trials", "300", "--seed", "3"],
    ["dtail", "--kmax", "3", "--trials", "10000", "--seed", "4"],
    ["pt2pt", "--d", "1", "--L", "2", "--trials", "10000", "--seed", "6"],
    ["verify", "--level", "fast"],
]


def _cli(args, threads, out):
    env = dict(os.environ)
    subprocess.run([sys.executable, "-m", "percolate.cli", *args, "--threads", str(threads), "--out", str(out)],
                   check=True, env=env, capture_output=True)
    return out.read_bytes()


def test_cli_determinism(verdict, tmp_path):
    t0 = time.perf_counter()
    mismatched = []
    for i, args in enumerate(CLI_STUDIES):
        runs = [_cli(args, th, tmp_path / f"{i}_{j}.csv") for j, th in enumerate((1, 1, 4))]
        if not runs[0] or any(r != runs[0] for r in runs[1:]):
            mismatched.append(args[0])
    dt = time.perf_counter() - t0
    verdict("9 byte-identical CSV on rerun and across thread counts", not mismatched,
            f"{len(CLI_STUDIES) - len(mismatched)}/{len(CLI_STUDIES)} studies, {dt:.1f}s"
            + (f", mismatched: {mismatched}" if mismatched else ""))
