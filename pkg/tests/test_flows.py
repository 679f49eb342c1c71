import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

import oracles
from conftest import small_graphs
from rcmodel.flows import all_degrees_even, count_mod_q_flows, flows_identity_check, poisson_multigraph
from rcmodel.graph import Graph, cycle_graph
from rcmodel.rng import generator
from rcmodel.tutte import flow_count_from_rank, rank_polynomial


def test_single_edge_has_no_flow():
    assert count_mod_q_flows(Graph(2, ((0, 1),)), 3) == 0


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_cycle_flows(n):
    for q in (2, 3, 4):
        assert count_mod_q_flows(cycle_graph(n), q) == q - 1 == oracles.mod_q_flows(cycle_graph(n).edges, n, q)


def test_bridge_forces_zero():
    g = Graph(6, ((0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)))
    assert count_mod_q_flows(g, 3) == 0


def test_loop_factor():
    g = Graph(2, ((0, 1), (0, 1), (1, 1)))
    assert count_mod_q_flows(g, 4) == 3 * 3


@given(small_graphs(max_vertices=4, max_edges=6), st.integers(2, 4), st.data())
def test_flows_agree_with_oracles_and_orientation(g, q, data):
    n = count_mod_q_flows(g, q)
    assert n == oracles.mod_q_flows(g.edges, g.vertex_count, q)
    assert n == flow_count_from_rank(rank_polynomial(g), q)
    flips = data.draw(st.lists(st.booleans(), min_size=g.n_edges, max_size=g.n_edges))
    h = Graph(g.vertex_count, tuple((v, u) if f else (u, v) for (u, v), f in zip(g.edges, flips)))
    assert count_mod_q_flows(h, q) == n


@given(small_graphs(max_vertices=4, max_edges=6))
def test_two_flows_are_even_subgraph_indicator(g):
    assert count_mod_q_flows(g, 2) == int(all_degrees_even(g))


def test_poisson_multigraph_shape():
    g = cycle_graph(3)
    h = poisson_multigraph(g, [2, 0, 1], (0, 1))
    assert h.edges == ((0, 1), (0, 1), (2, 0), (0, 1))


def test_flows_identity_triangle_moderate():
    rep = flows_identity_check(cycle_graph(3), 2, 0.2, 0, 1, 100_000, seed=7)
    assert rep.truncated == 0
    assert rep.within_3se
    assert rep.p == pytest.approx(-np.expm1(-0.4))


def test_parity_interpretation_on_samples():
    # for q = 2 the flow count of G_pi is the indicator that all degrees are even
    g = cycle_graph(3)
    mult = generator(3, 0).poisson(0.5, size=(300, 3))
    for row in mult:
        h = poisson_multigraph(g, row)
        assert count_mod_q_flows(h, 2) == int(all_degrees_even(h))


def test_small_lambda_ratio_vanishes():
    rep = flows_identity_check(cycle_graph(3), 2, 1e-4, 0, 1, 2000, seed=1)
    assert rep.exact < 1e-3 and rep.ratio < 1e-2
