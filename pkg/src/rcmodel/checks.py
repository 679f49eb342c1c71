"""Desk-scale oracle suite behind ``rcmodel check``.

Each check returns ``(passed, detail)``. Sizes are chosen so the whole
suite runs in well under a minute; the acceptance tests run the same
comparisons at their full stated scale.
"""

from __future__ import annotations

import numpy as np
from scipy import stats

from .circuits import outer_circuit_bound_check
from .duality import dual_parameter, duality_identity_error, planar_dual, self_dual_point
from .exact import (RCParams, comparison_pairs, conditional_closed_form_error, connection_event,
                    correlation_connection_error, deletion_contraction_error, exact_distribution,
                    finite_difference_derivative, fkg_gap, holley_margin, partition_enumerate, russo_derivative)
from .flows import count_mod_q_flows, flows_identity_check
from .graph import Graph, build_box_lattice, cycle_graph, random_graph
from .limits import Regime, is_monotone_decreasing, q_to_zero_convergence
from .meanfield import lambda_c, theta_root
from .rng import generator
from .samplers import cftp_batch, detailed_balance_error, monotonicity_violations, sw_kernel
from .tutte import flow_count_from_rank, partition_via_rank, rank_polynomial


def check_partition_rank(seed):
    rng = generator(seed, 1)
    worst = 0.0
    for _ in range(10):
        g = random_graph(rng, int(rng.integers(1, 6)), int(rng.integers(0, 9)))
        for p in (0.1, 0.5, 0.9):
            for q in (0.5, 1.0, 3.0):
                z = partition_enumerate(g, RCParams(p, q))
                worst = max(worst, abs(partition_via_rank(g, RCParams(p, q)) - z) / z)
    return worst < 1e-10, f"max relative gap {worst:.2e}"


def check_conditionals(seed):
    worst = 0.0
    for g in (cycle_graph(3), build_box_lattice(2, [2, 3])):
        for p, q in ((0.3, 2.0), (0.7, 0.5)):
            worst = max(worst, conditional_closed_form_error(g, RCParams(p, q)))
            for e in range(g.n_edges):
                worst = max(worst, deletion_contraction_error(g, RCParams(p, q), e))
    return worst < 1e-12, f"max error {worst:.2e}"


def check_correlation_connection(seed):
    worst = 0.0
    for q in (2, 3):
        for bj in (0.2, 1.0):
            worst = max(worst, correlation_connection_error(cycle_graph(4), bj, 1.0, q, 0, 2))
    return worst < 1e-12, f"max error {worst:.2e}"


def check_russo(seed):
    g = cycle_graph(4)
    worst = 0.0
    for ev in (connection_event(g, 0, 2), lambda w: w.sum() >= 2):
        for p in (0.3, 0.6):
            prm = RCParams(p, 1.5)
            worst = max(worst, abs(russo_derivative(g, prm, ev) - finite_difference_derivative(g, prm, ev)))
    return worst < 1e-6, f"max gap {worst:.2e}"


def check_fkg_holley(seed):
    g = cycle_graph(4)
    prm = RCParams(0.5, 2.0)
    gaps = [fkg_gap(g, prm, connection_event(g, 0, 2), connection_event(g, 1, 3))]
    margins = [holley_margin(exact_distribution(g, prm), exact_distribution(g, prm))]
    for _, big, small in comparison_pairs(g, prm, 3.0, 0.4) + comparison_pairs(g, prm, 2.0, 0.7):
        margins.append(holley_margin(big, small))
    ok = min(gaps) >= -1e-12 and min(margins) >= -1e-12
    return ok, f"min FKG gap {min(gaps):.2e}, min Holley margin {min(margins):.2e}"


def check_duality(seed):
    worst = 0.0
    for g in (cycle_graph(3), cycle_graph(4), build_box_lattice(2, [2, 3]), build_box_lattice(2, [3, 3], "wired")):
        worst = max(worst, duality_identity_error(planar_dual(g), 0.3, 2.0))
    inv = max(abs(dual_parameter(dual_parameter(p, q), q) - p) for p in (0.2, 0.5, 0.9) for q in (0.5, 2.0, 10.0))
    sd = self_dual_point(10.0)
    ok = worst < 1e-12 and inv < 1e-14 and 0.7597 <= sd <= 0.7598
    return ok, f"identity {worst:.2e}, involution {inv:.2e}, p_sd(10) = {sd:.6f}"


def check_detailed_balance(seed):
    worst = max(detailed_balance_error(cycle_graph(4), RCParams(0.4, q)) for q in (0.5, 1.0, 2.0, 4.0))
    return worst < 1e-12, f"max imbalance {worst:.2e}"


def check_sw_stationarity(seed):
    from .exact import potts_distribution

    worst = 0.0
    for g in (cycle_graph(3), cycle_graph(4)):
        for q in (2, 3):
            pi = potts_distribution(g, 0.5, 1.0, q)
            worst = max(worst, float(np.max(np.abs(pi @ sw_kernel(g, -np.expm1(-0.5), q) - pi))))
    return worst < 1e-12, f"max |pi P - pi| {worst:.2e}"


def check_monotonicity(seed):
    v = sum(monotonicity_violations(cycle_graph(4), RCParams(0.4, q)) for q in (1.0, 1.5, 2.0, 10.0))
    return v == 0, f"{v} violations"


def check_flows(seed):
    gs = [cycle_graph(3), Graph(3, ((0, 1), (1, 0), (1, 2), (2, 1))), build_box_lattice(2, [2, 2])]
    ok = True
    for g in gs:
        for q in (2, 3):
            f = count_mod_q_flows(g, q)
            flipped = Graph(g.vertex_count, tuple((v, u) for u, v in g.edges))
            ok &= f == count_mod_q_flows(flipped, q) == flow_count_from_rank(rank_polynomial(g), q)
    rep = flows_identity_check(cycle_graph(3), 2, 0.2, 0, 1, 100_000, seed)
    ok &= rep.within_3se
    return bool(ok), f"ratio {rep.ratio:.5f} vs exact {rep.exact:.5f} (z = {rep.z_score:.2f})"


def check_meanfield(seed):
    t = theta_root(2.0, 1.0)
    ok = abs(t - 0.796812) < 1e-6 and abs(lambda_c(4) - 3 * np.log(3)) < 1e-12
    return ok, f"theta(2, 1) = {t:.9f}"


def check_q_to_zero(seed):
    g = cycle_graph(3)
    details, ok = [], True
    for r in (Regime("fixed_p", 0.5), Regime("ust"), Regime("forest"), Regime("alpha", 2.0)):
        tv = q_to_zero_convergence(g, r)
        good = is_monotone_decreasing(tv) and tv[-1] < 0.01
        ok &= good
        details.append(f"{r.kind} {tv[-1]:.4f}")
    return bool(ok), ", ".join(details)


def check_outer_circuit(seed):
    ok = True
    details = []
    for q in (26.0, 30.0):
        good, rows = outer_circuit_bound_check(1, q)
        ok &= good
        details += [f"q={q:g} |G|={r.length} P={r.probability:.3e} bound={r.bound:.3e}" for r in rows]
    return bool(ok), "; ".join(details)


def check_cftp(seed):
    g = build_box_lattice(2, [2, 3])
    prm = RCParams(0.6, 2.0)
    n = 100_000
    S = cftp_batch(g, prm, seed, n)
    idx = (S.astype(np.int64) << np.arange(g.n_edges)).sum(axis=1)
    counts = np.bincount(idx, minlength=1 << g.n_edges)
    expected = exact_distribution(g, prm).probs * n
    pval = stats.chisquare(counts, expected).pvalue
    return pval > 1e-3, f"chi-square p-value {pval:.3f} over {len(counts)} cells"


CHECKS = {
    "partition_rank": check_partition_rank,
    "conditionals": check_conditionals,
    "correlation_connection": check_correlation_connection,
    "russo": check_russo,
    "fkg_holley": check_fkg_holley,
    "duality": check_duality,
    "detailed_balance": check_detailed_balance,
    "sw_stationarity": check_sw_stationarity,
    "monotonicity": check_monotonicity,
    "flows": check_flows,
    "meanfield": check_meanfield,
    "q_to_zero": check_q_to_zero,
    "outer_circuit": check_outer_circuit,
    "cftp": check_cftp,
}


def run_checks(names, seed: int) -> list[tuple[str, bool, str]]:
    if names in ("all", ["all"]):
        names = list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)}")
    out = []
    for n in names:
        ok, detail = CHECKS[n](seed)
        out.append((n, bool(ok), str(detail)))
    return out
