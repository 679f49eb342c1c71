import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from conftest import small_graphs
from rcmodel.errors import NotCoalesced
from rcmodel.exact import RCParams, exact_distribution, exact_marginal_open, potts_distribution, potts_spin_table
from rcmodel.graph import Graph, build_box_lattice, cycle_graph
from rcmodel.rng import generator
from rcmodel.samplers import (SpinConfig, UpdateDraw, bonds_given_spins, cftp_batch, cftp_sample,
                              closing_threshold, config_to_hex, detailed_balance_error, glauber_rates,
                              heat_bath_chain, heat_bath_kernel, heat_bath_step, hex_to_config, mixing_probe,
                              monotonicity_violations, rows_to_csv, spins_given_bonds, sw_kernel, sw_step,
                              update_draw, update_draws)

EDGE = Graph(2, ((0, 1),))
TRI = cycle_graph(3)


def test_thresholds():
    p = 0.3
    assert closing_threshold(RCParams(p, 1.0), False) == pytest.approx(1 - p)
    assert closing_threshold(RCParams(p, 1.0), True) == pytest.approx(1 - p)
    # single edge, q = 2, p = 1/2: opens with probability 1/3
    assert 1 - closing_threshold(RCParams(0.5, 2.0), False) == pytest.approx(1 / 3)
    assert 1 - closing_threshold(RCParams(0.4, 2.0), True) == pytest.approx(0.4)


def test_heat_bath_step_uses_connectivity():
    prm = RCParams(0.5, 2.0)
    w = heat_bath_step(TRI, prm, [0, 1, 1], UpdateDraw(0, 0.55))
    assert w[0] == 1  # joined: threshold 1/2
    w = heat_bath_step(TRI, prm, [0, 0, 0], UpdateDraw(0, 0.55))
    assert w[0] == 0  # isolated: threshold 2/3


def test_glauber_rates():
    p, q = 0.3, 2.0
    assert glauber_rates(EDGE, RCParams(p, q), [0], 0) == (p, (1 - p) * q)
    assert glauber_rates(TRI, RCParams(p, q), [0, 1, 1], 0) == (p, 1 - p)
    assert glauber_rates(TRI, RCParams(p, 1.0), [0, 0, 0], 0) == (p, 1 - p)


@given(small_graphs(max_edges=6), st.floats(0.05, 0.95), st.sampled_from([0.5, 1.0, 2.0, 4.0]))
def test_detailed_balance(g, p, q):
    assert detailed_balance_error(g, RCParams(p, q)) < 1e-12


def test_heat_bath_kernel_stationary():
    g = build_box_lattice(2, [2, 3])
    prm = RCParams(0.6, 2.0)
    P = heat_bath_kernel(g, prm)
    pi = exact_distribution(g, prm).probs
    assert np.allclose(P.sum(axis=1), 1.0)
    assert np.max(np.abs(pi @ P - pi)) < 1e-14


@pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 10.0])
def test_monotone_for_q_at_least_one(q):
    assert monotonicity_violations(TRI, RCParams(0.5, q)) == 0
    assert monotonicity_violations(TRI, RCParams(0.5, q), us=generator(0).random(10_000)) == 0


def test_violations_below_one():
    assert monotonicity_violations(cycle_graph(4), RCParams(0.4, 0.5)) > 0


def test_cftp_refuses_q_below_one():
    with pytest.raises(ValueError):
        cftp_sample(TRI, RCParams(0.5, 0.5), seed=0)
    with pytest.raises(ValueError):
        cftp_batch(TRI, RCParams(0.5, 0.5), seed=0, n_samples=4)


def test_cftp_p_one_all_open():
    assert np.all(cftp_batch(TRI, RCParams(1.0, 2.0), seed=0, n_samples=20) == 1)
    assert np.all(cftp_sample(build_box_lattice(2, [2, 3]), RCParams(1.0, 3.0), seed=4) == 1)


def test_cftp_horizon_cap():
    with pytest.raises(NotCoalesced):
        cftp_sample(build_box_lattice(2, [3, 3]), RCParams(0.6, 2.0), seed=0, max_doublings=0)


@settings(max_examples=15)
@given(small_graphs(max_edges=6, loops=True), st.floats(0.05, 0.95), st.floats(1.0, 5.0), st.integers(0, 1000))
def test_batch_matches_scalar(g, p, q, seed):
    prm = RCParams(p, q)
    batch = cftp_batch(g, prm, seed, 6, first_stream=3)
    for i in range(6):
        assert np.array_equal(batch[i], cftp_sample(g, prm, seed, stream=3 + i))


def test_cftp_single_edge_marginal():
    n = 200_000
    s = cftp_batch(EDGE, RCParams(0.5, 2.0), seed=1, n_samples=n)
    f = s.mean()
    assert abs(f - 1 / 3) < 3 * np.sqrt((1 / 3) * (2 / 3) / n)


def test_cftp_box_marginals():
    g = build_box_lattice(2, [2, 3])
    prm = RCParams(0.6, 2.0)
    n = 50_000
    s = cftp_batch(g, prm, seed=2, n_samples=n)
    m = exact_marginal_open(g, prm)
    se = np.sqrt(m * (1 - m) / n)
    assert np.all(np.abs(s.mean(axis=0) - m) < 4 * se)


def test_update_draws_vectorised():
    es, us = update_draws(9, np.arange(5), 17, 11)
    for s in range(5):
        d = update_draw(9, s, 17, 11)
        assert (d.edge, d.u) == (es[s], us[s])


def test_heat_bath_chain_resumes():
    g = build_box_lattice(2, [3, 3])
    prm = RCParams(0.5, 2.0)
    w0 = np.zeros(g.n_edges, dtype=np.uint8)
    full, _ = heat_bath_chain(g, prm, w0, 500, seed=3)
    mid, _ = heat_bath_chain(g, prm, w0, 200, seed=3)
    rest, _ = heat_bath_chain(g, prm, mid, 300, seed=3, start=200)
    assert np.array_equal(full, rest)


def test_spins_given_bonds_examples():
    rng = generator(0)
    s = spins_given_bonds(TRI, [1, 1, 1], 3, rng).spins
    assert len(set(s)) == 1
    counts = np.zeros(3)
    for _ in range(3000):
        s = spins_given_bonds(TRI, [1, 0, 0], 3, rng).spins
        assert s[0] == s[1]
        counts[s[2] - 1] += 1
    assert np.all(np.abs(counts / 3000 - 1 / 3) < 0.04)


def test_bonds_given_spins_examples():
    rng = generator(1)
    c4 = cycle_graph(4)
    assert bonds_given_spins(c4, SpinConfig(np.array([1, 2, 1, 2]), 2), 0.9, rng).sum() == 0
    w = bonds_given_spins(TRI, SpinConfig(np.array([1, 1, 2]), 2), 1.0, rng)
    assert list(w) == [1, 0, 0]
    many = np.array([bonds_given_spins(c4, SpinConfig(np.ones(4, dtype=int), 2), 0.3, rng) for _ in range(4000)])
    assert abs(many.mean() - 0.3) < 0.02


@pytest.mark.parametrize("g", [TRI, cycle_graph(4)])
@pytest.mark.parametrize("q", [2, 3])
def test_sw_stationary(g, q):
    bj = 0.7
    P = sw_kernel(g, -np.expm1(-bj), q)
    pi = potts_distribution(g, bj, 1.0, q)
    assert np.allclose(P.sum(axis=1), 1.0)
    assert np.max(np.abs(pi @ P - pi)) < 1e-12


def test_sw_kernel_limits():
    P0 = sw_kernel(TRI, 0.0, 2)
    assert np.allclose(P0, 1 / 8)
    P1 = sw_kernel(TRI, 1.0, 2)
    spins = potts_spin_table(3, 2)
    const = np.flatnonzero(np.all(spins == spins[:, :1], axis=1))
    assert np.allclose(P1[np.ix_(const, const)], 0.5)


def test_sw_step_returns_bonds():
    rng = generator(2)
    sigma, w = sw_step(TRI, 0.5, 2, SpinConfig(np.ones(3, dtype=int), 2), rng, return_bonds=True)
    assert w.shape == (3,) and sigma.spins.shape == (3,)


def test_spin_config_validation():
    with pytest.raises(ValueError):
        SpinConfig(np.array([0, 1]), 2)
    with pytest.raises(ValueError):
        SpinConfig(np.array([1, 1]), 1)


def test_mixing_probe_shapes():
    g = build_box_lattice(2, [4, 4])
    prm = RCParams(0.58, 2.0)
    rows = mixing_probe(g, prm, "heat_bath", "edge_density", 0, 1, seed=0)
    assert rows == [(0, 0.0, 0)]
    rows = mixing_probe(g, prm, "sw", "largest_cluster", 5, 2, seed=0)
    a = [v for _, v, r in rows if r == 0]
    b = [v for _, v, r in rows if r == 1]
    assert len(a) == len(b) == 6 and a != b
    assert rows_to_csv(rows).splitlines()[0] == "step,observable,replica"


def test_mixing_dynamics_agree_on_magnetization():
    g = build_box_lattice(2, [16, 16])
    prm = RCParams(0.58, 2.0)
    series = {}
    for dyn, steps in (("sw", 150), ("heat_bath", 150)):
        rows = mixing_probe(g, prm, dyn, "magnetization", steps, 2, seed=5)
        vals = np.array([v for s, v, _ in rows if s > 50])
        series[dyn] = (vals.mean(), vals.std(ddof=1) / np.sqrt(len(vals) / 25))
    (m1, s1), (m2, s2) = series["sw"], series["heat_bath"]
    assert abs(m1 - m2) < 4 * np.hypot(s1, s2) + 0.05


@given(st.lists(st.integers(0, 1), min_size=1, max_size=30))
def test_hex_round_trip(bits):
    w = np.array(bits, dtype=np.uint8)
    assert np.array_equal(hex_to_config(config_to_hex(w), len(w)), w)
