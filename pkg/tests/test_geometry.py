import json

import pytest

from percolate import geometry as G
from percolate import oracles
from percolate.lattice import BondConfig, all_closed, all_open, edge_between, enumeration_bits, sample_config


def _open_path(cfg, pts):
    return [edge_between(a, b) for a, b in zip(pts, pts[1:])]


def _square(k):
    return [(x, -k) for x in range(-k, k + 1)] + [(k, y) for y in range(-k + 1, k + 1)] \
        + [(x, k) for x in range(k - 1, -k - 1, -1)] + [(-k, y) for y in range(k - 1, -k - 1, -1)]


def test_path_validation_and_json():
    p = G.LatticePath(((0, 0), (1, 0), (1, 1)))
    assert len(p) == 2 and p.self_avoiding
    with pytest.raises(ValueError):
        G.LatticePath(((0, 0), (1, 1)))
    d = G.LatticePath(((0, 0), (1, 0)), G.DUAL)
    assert d.edges == (edge_between((1, 0), (1, 1)),)
    assert json.loads(d.to_json()) == {"lattice": "dual", "path": [[0.5, 0.5], [1.5, 0.5]]}


def test_circuit_contains():
    c = G.Circuit(tuple(_square(1)))
    assert len(c) == 8 and c.self_avoiding and c.winding
    assert c.contains((0, 0)) and not c.contains((2, 0)) and not c.contains((1, 0))
    with pytest.raises(ValueError):
        G.Circuit(((0, 0), (1, 0), (0, 0)))


def test_connected_examples():
    n = 3
    assert G.connected(all_open(n), [(-n, 0)], [(n, 0)])
    assert not G.connected(all_closed(n), [(-1, 0)], [(1, 0)])
    assert G.geodesic(all_closed(n), [(0, 0)], [(2, 2)]) is None


@pytest.mark.parametrize("n", [1, 2, 4])
def test_lowest_crossing_examples(n):
    low = G.lowest_crossing(all_open(n))
    assert low.vertices == tuple((x, -n) for x in range(-n, n + 1))
    row = [edge_between((x, -n), (x + 1, -n)) for x in range(-n, n)]
    legs = [edge_between((-n, -n), (-n, -n + 1)), edge_between((n, -n), (n, -n + 1))]
    upper = tuple((x, -n + 1) for x in range(-n, n + 1))
    # the corner legs run along the sides, so climbing them leaves a smaller region below
    got = G.lowest_crossing(all_open(n).with_edges(closed=row)).vertices
    assert got == ((-n, -n),) + upper + ((n, -n),)
    assert G.lowest_crossing(all_open(n).with_edges(closed=row + legs)).vertices == upper
    assert G.lowest_crossing(all_closed(n)) is None


def test_lowest_crossing_matches_minimal_region():
    seen = 0
    for s in range(300):
        c = sample_config(2, 0.5, 99, s)
        want = oracles.lowest_crossing_oracle(c)
        got = G.lowest_crossing(c)
        assert (got is None) == (want is None)
        if got is not None:
            assert got.vertices == want
            seen += 1
    assert seen > 100


def test_all_open_circuits_are_squares():
    n = 3
    dec = G.innermost_circuits(all_open(n))
    assert dec.K == n
    for k, c in enumerate(dec.circuits, 1):
        assert set(c.vertices) == set(_square(k))
    assert [len(p) for p in dec.connectors] == [1] * n + [0]


def test_single_square_with_exit():
    n = 3
    edges = _open_path(None, _square(1)) + _open_path(None, [(0, 0), (0, 1), (0, 2), (0, 3)])
    cfg = all_closed(n).with_edges(opened=edges)
    dec = G.innermost_circuits(cfg)
    assert dec.K == 1 and set(dec.circuits[0].vertices) == set(_square(1))
    assert dec.connectors[0].vertices[0] == (0, 0)
    assert max(map(abs, dec.connectors[-1].vertices[-1])) == n


def test_decomposition_needs_radial_connection():
    with pytest.raises(G.PreconditionError):
        G.innermost_circuits(all_closed(2))


def test_circuits_match_enumeration_n1():
    for mask, row in enumerate(enumeration_bits(1)):
        c = BondConfig(1, row)
        assert len(G.open_circuits_around_origin(c)) == oracles.max_disjoint_circuits(c)


def test_circuits_match_enumeration_n2():
    for s in range(150):
        c = sample_config(2, 0.6, 11, s)
        peel = G.open_circuits_around_origin(c)
        assert len(peel) == oracles.max_disjoint_circuits(c)
        inner = oracles.innermost_circuit_oracle(c)
        assert (inner is None) == (not peel)
        if peel:
            assert frozenset(peel[0].vertices) == inner
            sets = [set(p.vertices) for p in peel]
            assert all(not (a & b) for i, a in enumerate(sets) for b in sets[i + 1:])
            assert all(p.winding and p.self_avoiding for p in peel)


def test_single_column_is_the_radial_path():
    n = 4
    col = [(0, y) for y in range(n + 1)]
    cfg = all_closed(n).with_edges(opened=_open_path(None, col))
    assert G.leftmost_radial_path(cfg).vertices == tuple(col)


def test_radial_path_preconditions():
    with pytest.raises(G.PreconditionError):
        G.leftmost_radial_path(all_closed(2))
    with pytest.raises(G.PreconditionError):
        G.leftmost_radial_path(all_open(2))
    with pytest.raises(G.PreconditionError):
        G.canonical_closed_path(all_closed(2))


def _radial_cases(configs):
    for c in configs:
        if not G.connected(c, [(0, 0)], G.boundary_vertices(c.n)) or G.open_circuits_around_origin(c):
            continue
        yield c


def _check_extremal(c):
    n = c.n
    sig = G.leftmost_radial_path(c)
    wall = G.canonical_closed_path(c)
    assert all(c.is_open(e) for e in sig.edges) and sig.self_avoiding
    assert sig.vertices[0] == (0, 0) and max(map(abs, sig.vertices[-1])) == n
    assert all(not c.is_open(e) for e in wall.edges)
    assert sig.vertices == oracles.leftmost_radial_oracle(c, wall.vertices)
    assert len(G.sector_faces(n, sig, wall)) == oracles.right_sector(n, sig.vertices, wall.vertices)


def test_radial_path_extremal_n1():
    cases = list(_radial_cases(BondConfig(1, row) for row in enumeration_bits(1)))
    assert len(cases) > 1000
    for c in cases:
        _check_extremal(c)


def test_radial_path_extremal_n2():
    cases = list(_radial_cases(sample_config(2, 0.5, 4, s) for s in range(400)))
    assert len(cases) > 50
    for c in cases:
        _check_extremal(c)


def test_geometry_json():
    g = G.geometry_json(all_open(2))
    assert g["n"] == 2 and len(g["circuits"]) == 2
    assert g["lowest_crossing"]["lattice"] == "primal"
    json.dumps(g)
