import numpy as np
import pytest

from percolate.lattice import (
    HORIZONTAL, VERTICAL, BondConfig, EdgeId, all_closed, all_edges, all_open, dual_state, edge_between,
    edge_from_index, edge_index, edge_state, enumerate_configs, num_edges, sample_config,
)


def test_p_one_and_zero():
    assert sample_config(3, 1.0, 11).bits.sum() == 84 == num_edges(3)
    assert sample_config(3, 0.0, 11).bits.sum() == 0


def test_sampling_is_deterministic():
    a = sample_config(64, 0.5, 7, 3)
    b = sample_config(64, 0.5, 7, 3)
    assert a == b and a.bits.tobytes() == b.bits.tobytes()
    assert sample_config(64, 0.5, 7, 4) != a


@pytest.mark.parametrize("n", range(1, 9))
def test_edge_count_by_direct_counting(n):
    rng = range(-n, n + 1)
    direct = sum(1 for x in rng for y in rng for dx, dy in ((1, 0), (0, 1)) if x + dx <= n and y + dy <= n)
    assert num_edges(n) == direct == len(all_edges(n))


def test_open_fraction_near_half():
    bits = np.concatenate([sample_config(64, 0.5, 1, s).bits for s in range(31)])
    assert bits.size >= 10**6
    sd = np.sqrt(bits.size * 0.25)
    assert abs(bits.sum() - bits.size / 2) <= 4 * sd


def test_enumeration_n1():
    cfgs = list(enumerate_configs(1))
    assert len(cfgs) == 4096
    assert len({c.mask for c in cfgs}) == 4096
    assert cfgs[0].bits.sum() == 0 and cfgs[-1].bits.sum() == 12
    assert [c.mask for c in cfgs[:5]] == [0, 1, 2, 3, 4]


def test_enumeration_limits():
    with pytest.raises(ValueError):
        next(enumerate_configs(2))
    sub = list(enumerate_configs(2, edges=all_edges(2)[:3]))
    assert len(sub) == 8


@pytest.mark.parametrize("n", [1, 2, 5])
def test_index_roundtrip(n):
    for i, e in enumerate(all_edges(n)):
        assert edge_index(e, n) == i
        assert edge_from_index(i, n) == e


def test_layout_horizontal_first():
    n = 2
    nh = (2 * n + 1) * 2 * n
    assert all(e.orientation == HORIZONTAL for e in all_edges(n)[:nh])
    assert all(e.orientation == VERTICAL for e in all_edges(n)[nh:])
    assert edge_from_index(0, n) == EdgeId(HORIZONTAL, -n, -n)


def test_edge_order_and_geometry():
    e = edge_between((1, 0), (0, 0))
    assert e == EdgeId(HORIZONTAL, 0, 0) and e.head == (1, 0)
    assert edge_between((0, 1), (0, 0)).orientation == VERTICAL
    with pytest.raises(ValueError):
        edge_between((0, 0), (1, 1))
    assert sorted([EdgeId(1, 0, 0), EdgeId(0, 5, 5), EdgeId(0, -1, 3)])[0] == EdgeId(0, -1, 3)


def test_out_of_box_index():
    with pytest.raises(IndexError):
        edge_index(EdgeId(HORIZONTAL, 0, 2), 2)


def test_states():
    e1 = EdgeId(HORIZONTAL, 0, 0)
    op, cl = all_open(2), all_closed(2)
    assert all(edge_state(op, e) == "open" and dual_state(op, e) == "open-dual" for e in all_edges(2))
    assert all(edge_state(cl, e) == "closed" and dual_state(cl, e) == "closed-dual" for e in all_edges(2))
    one = op.with_edges(closed=[e1])
    assert [e for e in all_edges(2) if dual_state(one, e) == "closed-dual"] == [e1]


def test_json_roundtrip():
    c = sample_config(5, 0.5, 9, 2)
    d = BondConfig.from_json(c.to_json())
    assert d == c and (d.seed, d.stream) == (9, 2)


def test_config_validation():
    with pytest.raises(ValueError):
        BondConfig(1, np.zeros(5, np.uint8))
    with pytest.raises(ValueError):
        BondConfig(0, np.zeros(0, np.uint8))
    c = sample_config(2, 0.5, 1)
    with pytest.raises(ValueError):
        c.bits[0] = 1
