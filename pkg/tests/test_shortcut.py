import pytest

from percolate import oracles
from percolate.geometry import DUAL, LatticePath, lowest_crossing
from percolate.lattice import HORIZONTAL, EdgeId, all_edges, all_open, edge_between, sample_config
from percolate.shortcut import (
    ShieldedDetour, build_shortcut, default_budget, find_all_detours, find_detour, lambda_radius,
    verify_shielded_detour,
)


@pytest.fixture
def fx():
    f = oracles.fixture_7x7()
    f["low"] = lowest_crossing(f["config"])
    f["cand"] = ShieldedDetour(LatticePath(tuple(f["P"])), LatticePath(tuple(f["Q"])),
                               LatticePath(tuple(f["R"]), DUAL), f["anchor"])
    return f


def test_defaults():
    assert default_budget(0.5) == 64 and default_budget(1.0) == 32
    assert lambda_radius(64) == pytest.approx(64 - 64 ** 0.15)


def test_fixture_verifies(fx):
    assert list(fx["low"].vertices) == fx["l_n"]
    rep = verify_shielded_detour(fx["config"], fx["low"], fx["cand"], fx["eps"])
    assert rep.ok and bool(rep) and rep.failed == ()


def test_opening_a_shield_edge_breaks_condition_4(fx):
    R = fx["R"]
    opened = fx["config"].with_edges(opened=[LatticePath((R[2], R[3]), DUAL).edges[0]])
    assert verify_shielded_detour(opened, fx["low"], fx["cand"], fx["eps"]).failed == (4,)


def test_long_detour_breaks_condition_5(fx):
    assert verify_shielded_detour(fx["config"], fx["low"], fx["cand"], 0.5).failed == (5,)


def test_segment_of_crossing_is_not_a_detour():
    n = 4
    cfg = all_open(n)
    low = lowest_crossing(cfg)
    seg = LatticePath(low.vertices[2:6])
    R = LatticePath(((-3, -4), (-3, -3), (-2, -3), (-1, -3), (0, -3), (0, -4)), DUAL)
    cand = ShieldedDetour(seg, seg, R, seg.edges[1])
    rep = verify_shielded_detour(cfg, low, cand, 1.0)
    assert not rep and 1 in rep.failed


def test_out_of_box_candidate_raises(fx):
    far = LatticePath(((2, 0), (3, 0), (4, 0)))
    bad = ShieldedDetour(far, fx["cand"].Q, fx["cand"].R, fx["anchor"])
    with pytest.raises(ValueError):
        verify_shielded_detour(fx["config"], fx["low"], bad, 1.0)


def test_find_detour_on_fixture(fx):
    got = find_detour(fx["config"], fx["low"], fx["anchor"], fx["eps"])
    assert got is not None and list(got.P.vertices) == fx["P"]
    assert verify_shielded_detour(fx["config"], fx["low"], got, fx["eps"]).ok
    assert oracles.detour_oracle(fx["config"], fx["l_n"], fx["anchor"], fx["eps"], 100) == tuple(fx["P"])


def test_find_detour_rejects_edges_off_the_crossing(fx):
    with pytest.raises(ValueError):
        find_detour(fx["config"], fx["low"], EdgeId(HORIZONTAL, 2, 0), 1.0)


def test_all_open_has_no_detours():
    n = 6
    low = lowest_crossing(all_open(n))
    assert find_all_detours(all_open(n), low, 1.0) == {}
    # with the lower half removed the crossing runs along y = 0, inside Lambda_n
    cut = [e for e in all_edges(n) if min(e.y, e.head.y) < 0]
    cfg = all_open(n).with_edges(closed=cut)
    low = lowest_crossing(cfg)
    assert {v[1] for v in low.vertices} == {0}
    assert find_all_detours(cfg, low, 1.0) == {}
    for e in low.edges[2:-2]:
        assert find_detour(cfg, low, e, 1.0) is None


def test_anchor_outside_lambda_is_rejected():
    cfg = all_open(6)
    low = lowest_crossing(cfg)
    with pytest.raises(ValueError):
        find_detour(cfg, low, low.edges[5], 1.0)


def test_empty_plan_is_the_crossing(fx):
    plan = build_shortcut(fx["config"], fx["low"], [])
    assert plan.sigma.vertices == fx["low"].vertices and plan.Pi == ()


def test_fixture_plan_shortens(fx):
    plan = build_shortcut(fx["config"], fx["low"], [fx["cand"]], fx["eps"])
    assert len(fx["low"]) - len(plan.sigma) == len(fx["cand"].Q) - len(fx["cand"].P) == 2
    assert plan.detoured_edges == len(fx["cand"].Q)


def test_overlapping_detours_select_one(fx):
    P2 = [(-2, 0), (-2, 1), (-2, 2), (-1, 2), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0)]
    cfg = fx["config"].with_edges(opened=[edge_between(a, b) for a, b in zip(P2, P2[1:])])
    low = lowest_crossing(cfg)
    assert low.vertices == fx["low"].vertices
    d2 = ShieldedDetour(LatticePath(tuple(P2)), fx["cand"].Q, fx["cand"].R, edge_between((1, -1), (1, 0)))
    plan = build_shortcut(cfg, low, [fx["cand"], d2])
    assert len(plan.Pi) == 1 and plan.Pi[0] is fx["cand"]


def test_build_rejects_unverified_detours(fx):
    with pytest.raises(ValueError):
        build_shortcut(fx["config"], fx["low"], [fx["cand"]], eps=0.5)


POSITIVE = [(0.5, 90), (0.5, 505), (0.5, 733), (0.5, 886), (0.5, 1267), (0.6, 418), (0.6, 892)]


@pytest.mark.parametrize("p,seed", POSITIVE)
def test_search_matches_exhaustive_oracle(p, seed):
    cfg = sample_config(6, p, 5, seed)
    low = lowest_crossing(cfg)
    found = 0
    for eps in (2.0, 3.0):
        got = find_all_detours(cfg, low, eps, budget=100, alpha3=0.0001)
        for d in got.values():
            assert verify_shielded_detour(cfg, low, d, eps).ok
        for j in range(len(low.edges)):
            e = low.edges[j]
            try:
                single = find_detour(cfg, low, e, eps, budget=100, alpha3=0.0001)
            except ValueError:
                continue
            want = oracles.detour_oracle(cfg, low.vertices, e, eps, 100)
            have = got.get(e)
            assert (None if have is None else have.P.vertices) == want
            assert (None if single is None else single.P.vertices) == want
            found += want is not None
        short = [d for d in got.values() if len(d.P) <= len(d.Q)]
        plan = build_shortcut(cfg, low, short, eps)
        assert len(plan.sigma) <= len(low)
    assert found > 0


def test_random_plans_hold_invariants():
    for s in range(60):
        cfg = sample_config(24, 0.5, 13, s)
        low = lowest_crossing(cfg)
        if low is None:
            continue
        ds = find_all_detours(cfg, low, 1.0)
        plan = build_shortcut(cfg, low, list(ds.values()), 1.0)
        assert all(cfg.is_open(e) for e in plan.sigma.edges) and plan.sigma.self_avoiding
        assert len(plan.sigma) <= len(low)
        assert all(len(d.P) <= len(d.Q) for d in plan.Pi)


def test_lengthening_detours_are_rejected():
    cfg = sample_config(6, 0.5, 5, 90)
    low = lowest_crossing(cfg)
    ds = find_all_detours(cfg, low, 3.0, budget=100, alpha3=0.0001)
    assert any(len(d.P) > len(d.Q) for d in ds.values())
    with pytest.raises(ValueError):
        build_shortcut(cfg, low, list(ds.values()))
