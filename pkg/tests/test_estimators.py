import numpy as np
import pytest

from rcmodel.estimators import (SCAN_COLUMNS, SamplerSpec, ball_box, batch_means, box_with_origin,
                                cluster_statistics, correlation_length_fit, critical_scan, edge_density_estimate, read_scan,
                                sample_configs, theta_box_estimate, two_point_estimate)
from rcmodel.exact import RCParams, connection_event, event_probability
from rcmodel.graph import Graph, build_box_lattice

EDGE = Graph(2, ((0, 1),))


def test_batch_means():
    m, se = batch_means(np.ones(100))
    assert (m, se) == (1.0, 0.0)
    v = np.random.default_rng(0).normal(size=64_000)
    m, se = batch_means(v)
    assert abs(m) < 4 * se and 0.5 / np.sqrt(64_000) < se < 2 / np.sqrt(64_000)


def test_sampler_spec_validation():
    with pytest.raises(ValueError):
        SamplerSpec("metropolis")
    with pytest.raises(ValueError):
        SamplerSpec("sw", thin=0)


def test_box_origin():
    box = box_with_origin([5, 5])
    assert box.graph.coords[box.origin] == (2, 2) and len(box.boundary) == 16
    wired = ball_box(2, 1)
    assert wired.boundary == (wired.graph.vertex_count - 1,)


@pytest.mark.parametrize("b", [0, 1])
def test_theta_box_extremes(b):
    assert theta_box_estimate(1, b, RCParams(1.0, 2.0), 50, seed=0).estimate == 1.0
    assert theta_box_estimate(1, b, RCParams(0.0, 2.0), 50, seed=0).estimate == 0.0


def test_theta_box_against_independent_sampler():
    prm = RCParams(0.5, 1.0)
    hb = theta_box_estimate(3, 0, prm, 3000, seed=1, sampler=SamplerSpec("heat_bath", burn_in=20))
    ind = theta_box_estimate(3, 0, prm, 20_000, seed=2, sampler=SamplerSpec("independent"))
    assert abs(hb.estimate - ind.estimate) < 3 * np.hypot(hb.stderr, ind.stderr) + 1e-3


def test_two_point_examples():
    prm = RCParams(0.5, 2.0)
    assert two_point_estimate(EDGE, prm, 0, 0, 10, seed=0).estimate == 1.0
    r = two_point_estimate(EDGE, prm, 0, 1, 40_000, seed=3)
    assert abs(r.estimate - 1 / 3) < 3 * r.stderr


def test_two_point_small_box():
    g = build_box_lattice(2, [3, 3])
    prm = RCParams(0.6, 2.0)
    exact = event_probability(g, prm, connection_event(g, 0, 8))
    r = two_point_estimate(g, prm, 0, 8, 40_000, seed=4)
    assert abs(r.estimate - exact) < 3 * r.stderr


def test_edge_density_examples():
    g = build_box_lattice(2, [4, 4])
    r = edge_density_estimate(g, RCParams(0.3, 1.0), 20_000, seed=5, sampler=SamplerSpec("independent"))
    assert abs(r.estimate - 0.3) < 3 * r.stderr
    r = edge_density_estimate(EDGE, RCParams(0.5, 2.0), 40_000, seed=6)
    assert abs(r.estimate - 1 / 3) < 3 * r.stderr


def test_sw_sampler_matches_exact_marginal():
    g = build_box_lattice(2, [2, 3])
    prm = RCParams(0.6, 3.0)
    exact = event_probability(g, prm, connection_event(g, 0, 5))
    r = two_point_estimate(g, prm, 0, 5, 10_000, seed=7, sampler=SamplerSpec("sw", burn_in=10))
    assert abs(r.estimate - exact) < 3 * r.stderr


def test_cluster_statistics_extremes():
    box = box_with_origin([5, 5])
    s0 = cluster_statistics(box, RCParams(0.0, 2.0), 20, seed=0)
    assert np.all(s0["sizes"] == 1) and np.all(s0["radii"] == 0) and s0["norm"] == "L1"
    s1 = cluster_statistics(box, RCParams(1.0, 2.0), 20, seed=0)
    assert np.all(s1["sizes"] == 25) and np.all(s1["radii"] == 4)


def test_subcritical_size_tail_decreases():
    box = box_with_origin([15, 15])
    s = cluster_statistics(box, RCParams(0.3, 1.0), 20_000, seed=8, sampler=SamplerSpec("independent"))
    hist = s["size_hist"]
    tail = hist[5:12]
    assert np.all(np.diff(tail) < 0)


def test_scan_reproducible_and_worker_independent():
    kw = dict(q=2.0, p_grid=[0.4, 0.6], sides=[3], samples=64, seed=9, sampler=SamplerSpec("cftp"))
    a = critical_scan(**kw)
    assert a == critical_scan(**kw)
    assert a == critical_scan(**kw, workers=2)
    rows = read_scan(a)
    assert len(rows) == 2 and list(rows[0]) == SCAN_COLUMNS
    assert "# self_dual_point=" in a and "# asymmetric_upper_bound=" in a and "# config_hash=" in a


def test_scan_single_point_and_zero_row():
    rows = read_scan(critical_scan(2.0, [0.0], [4], 32, seed=1))
    assert len(rows) == 1
    assert float(rows[0]["edge_density"]) == 0.0 and float(rows[0]["theta_proxy"]) == 0.0


def test_scan_monotone_in_p():
    rows = read_scan(critical_scan(1.0, [0.2, 0.4, 0.5, 0.6, 0.8], [8], 2000, seed=2,
                                   sampler=SamplerSpec("independent")))
    h = np.array([float(r["edge_density"]) for r in rows])
    t = np.array([float(r["theta_proxy"]) for r in rows])
    t_se = np.array([float(r["theta_proxy_se"]) for r in rows])
    assert np.all(np.diff(h) > 0)
    assert np.all(np.diff(t) > -3 * (t_se[1:] + t_se[:-1]))
    assert t[-1] - t[0] > 0.5


def test_sample_configs_rejects_bad_combinations():
    with pytest.raises(ValueError):
        sample_configs(EDGE, RCParams(0.5, 2.0), SamplerSpec("independent"), 3, seed=0)
    with pytest.raises(ValueError):
        sample_configs(EDGE, RCParams(0.5, 2.5), SamplerSpec("sw"), 3, seed=0)


def test_correlation_length_fit_both_norms():
    box = box_with_origin([15, 15])
    sub = correlation_length_fit(box, RCParams(0.35, 1.0), 4000, seed=10, sampler=SamplerSpec("independent"))
    sup = correlation_length_fit(box, RCParams(0.45, 1.0), 4000, seed=10, sampler=SamplerSpec("independent"))
    for norm in ("L1", "Linf"):
        assert np.all(np.diff(sub[norm]["tau"][:4]) < 0)
        assert 0 < sub[norm]["xi"] < sup[norm]["xi"]


def test_cluster_radius_norms_ordered():
    s = cluster_statistics(box_with_origin([9, 9]), RCParams(0.5, 1.0), 500, seed=11,
                           sampler=SamplerSpec("independent"))
    assert np.all(s["radii_linf"] <= s["radii"]) and np.all(s["radii"] <= 2 * s["radii_linf"])
