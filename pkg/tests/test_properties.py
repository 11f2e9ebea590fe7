"""Invariants as hypothesis properties over seeded configurations."""
import math

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from percolate import geometry as G
from percolate.arms import ArmSpec, edge_arm_event
from percolate.distance import chem_dist, crossing_lengths, dyadic_scale
from percolate.harness import crossing_records, fmt, run_pt2pt
from percolate.lattice import HORIZONTAL, EdgeId, all_edges, num_edges, sample_config

settings.register_profile("perc", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("perc")

E1 = EdgeId(HORIZONTAL, 0, 0)
seeds = st.integers(0, 2**63 - 1)
densities = st.sampled_from([0.3, 0.5, 0.6, 0.7])
words = st.text(alphabet="oc", min_size=1, max_size=5)


@st.composite
def configs(draw, n_min=1, n_max=5):
    n = draw(st.integers(n_min, n_max))
    return sample_config(n, draw(densities), draw(seeds), draw(st.integers(0, 1000)))


def vertices(n):
    return st.tuples(st.integers(-n, n), st.integers(-n, n))


@given(n=st.integers(1, 6), p=densities, seed=seeds, stream=st.integers(0, 10**6))
def test_sampling_is_a_function_of_its_key(n, p, seed, stream):
    a, b = sample_config(n, p, seed, stream), sample_config(n, p, seed, stream)
    assert a == b and a.bits.size == num_edges(n)


@given(cfg=configs(n_min=3, n_max=5), word=words, data=st.data())
def test_arm_events_shrink_with_radius(cfg, word, data):
    spec = ArmSpec.parse(word)
    m2 = data.draw(st.integers(1, cfg.n - 1))
    m1 = data.draw(st.integers(1, m2))
    if edge_arm_event(cfg, E1, m2, spec):
        assert edge_arm_event(cfg, E1, m1, spec)


@given(cfg=configs(n_min=2, n_max=4), k=st.integers(1, 4), data=st.data())
def test_monochromatic_events_are_monotone(cfg, k, data):
    e = data.draw(st.sampled_from(all_edges(cfg.n)))
    m = cfg.n - 1 if cfg.n > 1 else 1
    spec_o, spec_c = ArmSpec(("o",) * k), ArmSpec(("c",) * k)
    if edge_arm_event(cfg, E1, m, spec_o):
        assert edge_arm_event(cfg.with_edges(opened=[e]), E1, m, spec_o)
    if edge_arm_event(cfg, E1, m, spec_c):
        assert edge_arm_event(cfg.with_edges(closed=[e]), E1, m, spec_c)


@given(cfg=configs(n_min=4, n_max=8), data=st.data())
def test_opening_edges_never_raises_the_dyadic_scale(cfg, data):
    es = data.draw(st.lists(st.sampled_from(all_edges(cfg.n)), max_size=6))
    before, after = dyadic_scale(cfg), dyadic_scale(cfg.with_edges(opened=es))
    if not before.censored:
        assert not after.censored and after.k <= before.k
    if not after.censored:
        assert after.distance >= 2 ** (after.k - 1)


@given(cfg=configs(n_max=8))
def test_shortest_never_exceeds_lowest(cfg):
    cl = crossing_lengths(cfg)
    low = G.lowest_crossing(cfg)
    assert (cl is None) == (low is None)
    if cl is not None:
        S, L = cl
        n = cfg.n
        assert 2 * n <= S <= L == len(low)
        assert low.self_avoiding and low.vertices[0][0] == -n and low.vertices[-1][0] == n
        assert all(cfg.is_open(e) for e in low.edges)


@given(cfg=configs(n_max=4), data=st.data())
def test_chemical_distance_is_a_metric(cfg, data):
    a, b, c = (data.draw(vertices(cfg.n)) for _ in range(3))
    ab = chem_dist(cfg, [a], [b])
    assert ab.value == chem_dist(cfg, [b], [a]).value
    if ab.connected:
        assert ab.value >= abs(a[0] - b[0]) + abs(a[1] - b[1])
        assert ab.witness.vertices[0] == a and ab.witness.vertices[-1] == b
        assert all(cfg.is_open(e) for e in ab.witness.edges)
        bc, ac = chem_dist(cfg, [b], [c]), chem_dist(cfg, [a], [c])
        if bc.connected:
            assert ac.value <= ab.value + bc.value


@given(cfg=configs(n_max=7))
def test_circuits_are_disjoint_open_and_surround_the_origin(cfg):
    cs = G.open_circuits_around_origin(cfg)
    seen = set()
    for c in cs:
        body = set(c.vertices)
        assert c.self_avoiding and c.winding and not (body & seen)
        assert all(cfg.is_open(e) for e in c.edges)
        assert all(max(abs(x), abs(y)) <= cfg.n for x, y in body)
        seen |= body
    for inner, outer in zip(cs, cs[1:]):
        assert all(outer.contains(v) for v in inner.vertices)


@given(cfg=configs(n_min=2, n_max=10))
def test_radial_path_is_open_and_extremal_in_arms(cfg):
    n = cfg.n
    if not G.connected(cfg, [(0, 0)], G.boundary_vertices(n)) or G.open_circuits_around_origin(cfg):
        return
    sig = G.leftmost_radial_path(cfg)
    assert sig.vertices[0] == (0, 0) and max(map(abs, sig.vertices[-1])) == n
    assert sum(max(map(abs, v)) == n for v in sig.vertices) == 1
    assert sig.self_avoiding and all(cfg.is_open(e) for e in sig.edges)
    ooc = ArmSpec.parse("ooc")
    for e in sig.edges:
        ends = e.endpoints()
        r = min(min(max(map(abs, v)) for v in ends), min(n - max(map(abs, v)) for v in ends))
        assert edge_arm_event(cfg, e, r, ooc)


@given(n=st.integers(1, 12), seed=seeds)
@settings(max_examples=15)
def test_lazy_kernels_agree_with_explicit_configs(n, seed):
    recs = {r.trial: r for r in crossing_records(n, seed, trials=40)}
    for t in range(40):
        cl = crossing_lengths(sample_config(n, 0.5, seed, t))
        assert (cl is None) == (t not in recs)
        if cl is not None:
            assert cl == (recs[t].S, recs[t].L)


@given(seed=st.integers(0, 10**6))
@settings(max_examples=8)
def test_distance_tail_is_nonincreasing(seed):
    res = run_pt2pt(1, 1, 400, seed, pi_trials=200)
    tail = [r[4] for r in res.rows if r[0] == "tail"]
    assert all(a >= b for a, b in zip(tail, tail[1:]))


@given(x=st.floats(allow_nan=False, allow_infinity=False, min_value=-1e300, max_value=1e300))
def test_csv_floats_keep_ten_significant_digits(x):
    s = fmt(x)
    digits = s.lstrip("-").split("e")[0].replace(".", "").lstrip("0")
    assert len(digits) <= 10
    assert math.isclose(float(s), x, rel_tol=5e-10, abs_tol=0.0) or x == 0
