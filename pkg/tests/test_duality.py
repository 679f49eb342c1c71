import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from suites import planar_suite
from rcmodel.duality import (asymmetric_upper_bound, dual_config, dual_parameter, duality_identity_check,
                             duality_identity_error, planar_dual, read_dual_pair, self_dual_point,
                             self_dual_weight_error, write_dual_pair)
from rcmodel.graph import Graph, cluster_decompose, cycle_graph, path_graph, build_box_lattice

PLANAR = planar_suite()


def _multiset(g):
    return sorted(tuple(sorted(e)) for e in g.edges)


def test_triangle_dual():
    d = planar_dual(cycle_graph(3)).dual
    assert d.vertex_count == 2 and _multiset(d) == [(0, 1)] * 3


def test_single_edge_dual_is_loop():
    d = planar_dual(path_graph(2)).dual
    assert d.vertex_count == 1 and d.edges == ((0, 0),)


def test_square_dual():
    d = planar_dual(build_box_lattice(2, [2, 2])).dual
    assert d.vertex_count == 2 and _multiset(d) == [(0, 1)] * 4


def test_dual_requires_embedding_and_connectivity():
    with pytest.raises(ValueError):
        planar_dual(Graph(3, ((0, 1), (1, 2))))
    with pytest.raises(ValueError):
        planar_dual(Graph(3, ((0, 1),), (((0, 0),), ((0, 1),), ())))


@pytest.mark.parametrize("name", sorted(PLANAR))
def test_dual_of_dual_recovers_primal(name):
    g = PLANAR[name]
    dd = planar_dual(planar_dual(g).dual).dual
    assert dd.vertex_count == g.vertex_count
    assert len(_multiset(dd)) == g.n_edges
    # a component count on random subsets identifies the cycle matroid
    rng = np.random.default_rng(0)
    for _ in range(20):
        w = rng.integers(0, 2, g.n_edges)
        assert cluster_decompose(dd, w).k == cluster_decompose(g, w).k


def test_dual_config_examples():
    pair = planar_dual(cycle_graph(3))
    assert list(dual_config(pair, [1, 1, 1])) == [0, 0, 0]
    assert dual_config(pair, [1, 0, 0]).sum() == 2
    w = np.array([1, 0, 1])
    back = dual_config(pair, dual_config(pair, w))
    assert np.array_equal(back, w)


def test_dual_parameter_examples():
    assert dual_parameter(0.5, 1.0) == 0.5
    assert dual_parameter(0.6, 2.0) == pytest.approx(4 / 7, abs=1e-15)
    assert dual_parameter(0.0, 3.0) == 1.0 and dual_parameter(1.0, 3.0) == 0.0
    for q in (0.5, 2.0, 10.0):
        s = self_dual_point(q)
        assert dual_parameter(s, q) == pytest.approx(s, abs=1e-15)


@given(st.floats(0.0, 1.0), st.floats(0.05, 50.0))
def test_dual_parameter_involution(p, q):
    assert abs(dual_parameter(dual_parameter(p, q), q) - p) < 1e-14


def test_self_dual_values():
    assert self_dual_point(1.0) == 0.5
    assert self_dual_point(2.0) == pytest.approx(0.585786, abs=1e-6)
    assert 0.7597 <= self_dual_point(10.0) <= 0.7598


def test_asymmetric_bound():
    assert round(asymmetric_upper_bound(10.0), 3) == 0.769
    assert asymmetric_upper_bound(2.0) == pytest.approx(2 / 3, abs=1e-15)
    assert asymmetric_upper_bound(2.0) >= self_dual_point(2.0)
    assert asymmetric_upper_bound(1e8) > 0.9999
    with pytest.raises(ValueError):
        asymmetric_upper_bound(1.0)


@pytest.mark.parametrize("name", sorted(PLANAR))
def test_duality_identity(name):
    pair = planar_dual(PLANAR[name])
    for p, q in ((0.3, 2.0), (0.7, 0.5), (0.5, 10.0)):
        assert duality_identity_error(pair, p, q) < 1e-12


def test_triangle_verdict():
    assert duality_identity_check(planar_dual(cycle_graph(3)), 0.3, 2.0)


@pytest.mark.parametrize("name", ["triangle", "square", "box2x3", "k4"])
def test_self_dual_weights(name):
    assert self_dual_weight_error(planar_dual(PLANAR[name]), 3.0) < 1e-12


def test_dual_pair_round_trip():
    pair = planar_dual(build_box_lattice(2, [3, 3], "wired"))
    assert read_dual_pair(write_dual_pair(pair)) == pair
    assert "0 -> 0" in write_dual_pair(pair)
