"""Exhaustive computations for the random-cluster measure on small graphs.

Everything here enumerates the ``2**|E|`` bond configurations (or the
``q**|V|`` spin configurations) and is the reference against which the
samplers and estimators are tested.

Events are boolean arrays indexed by configuration bitmask; most functions
also accept a predicate ``f(omega) -> bool`` and tabulate it.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import CapExceeded
from .graph import (Graph, as_config, cluster_decompose, config_to_index, contract_edge, delete_edge,
                    joined_without)

DEFAULT_CAP = 24
SPIN_CAP = 1 << 20

Event = Union[np.ndarray, Callable[[np.ndarray], bool]]


@dataclass(frozen=True)
class RCParams:
    p: float
    q: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not self.q > 0.0:
            raise ValueError(f"q must be positive, got {self.q}")

    @property
    def p_isolated(self) -> float:
        """Probability an edge opens when its endpoints are otherwise disjoint."""
        return self.p / (self.p + (1.0 - self.p) * self.q)


@dataclass(frozen=True)
class ConfigTable:
    n_edges: int
    n_open: np.ndarray  # number of open edges per configuration
    k: np.ndarray  # number of open clusters
    labels: np.ndarray  # (2**E, V): smallest vertex id in each vertex's cluster


@dataclass(frozen=True)
class ExactDistribution:
    graph: Graph
    params: RCParams
    probs: np.ndarray
    Z: float

    def probability(self, event: Event) -> float:
        return float(self.probs[as_event(self.graph, event)].sum())

    def expectation(self, values: np.ndarray) -> float:
        return float(np.dot(self.probs, values))


def _check_cap(g: Graph, cap: int):
    if g.n_edges > cap:
        raise CapExceeded(f"{g.n_edges} edges exceeds the enumeration cap of {cap}")


@functools.lru_cache(maxsize=64)
def config_table(g: Graph, cap: int = DEFAULT_CAP) -> ConfigTable:
    _check_cap(g, cap)
    E, V = g.n_edges, g.vertex_count
    total = 1 << E
    ldtype = np.int8 if V < 127 else np.int32
    labels = np.empty((total, V), dtype=ldtype)
    edges = [(u, v) for u, v in g.edges]
    chunk = 1 << 16
    for start in range(0, total, chunk):
        masks = np.arange(start, min(total, start + chunk), dtype=np.int64)
        lab = np.tile(np.arange(V, dtype=ldtype), (len(masks), 1))
        bits = [((masks >> e) & 1).astype(bool) for e in range(E)]
        changed = True
        while changed:
            changed = False
            for e, (u, v) in enumerate(edges):
                if u == v:
                    continue
                sel = bits[e] & (lab[:, u] != lab[:, v])
                if sel.any():
                    lo = np.minimum(lab[sel, u], lab[sel, v])
                    lab[sel, u] = lo
                    lab[sel, v] = lo
                    changed = True
        labels[start:start + len(masks)] = lab
    idx = np.arange(total, dtype=np.int64)
    n_open = np.zeros(total, dtype=np.int16)
    for e in range(E):
        n_open += ((idx >> e) & 1).astype(np.int16)
    k = (labels == np.arange(V, dtype=ldtype)).sum(axis=1).astype(np.int16)
    return ConfigTable(E, n_open, k, labels)


def config_weights(g: Graph, params: RCParams, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Unnormalised weights ``p^|open| (1-p)^|closed| q^k`` for every config."""
    t = config_table(g, cap)
    n = t.n_open.astype(np.float64)
    return np.power(params.p, n) * np.power(1.0 - params.p, t.n_edges - n) * np.power(params.q, t.k.astype(np.float64))


def partition_enumerate(g: Graph, params: RCParams, cap: int = DEFAULT_CAP) -> float:
    # numpy's pairwise summation keeps this bit-stable for a fixed graph
    return float(config_weights(g, params, cap).sum())


@functools.lru_cache(maxsize=256)
def exact_distribution(g: Graph, params: RCParams, cap: int = DEFAULT_CAP) -> ExactDistribution:
    w = config_weights(g, params, cap)
    Z = float(w.sum())
    return ExactDistribution(g, params, w / Z, Z)


# --------------------------------------------------------------------------
# events


def all_indices(g: Graph) -> np.ndarray:
    return np.arange(1 << g.n_edges, dtype=np.int64)


def edge_open_event(g: Graph, e: int) -> np.ndarray:
    return ((all_indices(g) >> e) & 1).astype(bool)


def connection_event(g: Graph, x: int, y: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    t = config_table(g, cap)
    return t.labels[:, x] == t.labels[:, y]


def event_from_predicate(g: Graph, predicate: Callable[[np.ndarray], bool]) -> np.ndarray:
    E = g.n_edges
    idx = all_indices(g)
    bits = ((idx[:, None] >> np.arange(E)) & 1).astype(np.uint8)
    return np.fromiter((bool(predicate(row)) for row in bits), dtype=bool, count=len(idx))


def as_event(g: Graph, event: Event) -> np.ndarray:
    if callable(event):
        return event_from_predicate(g, event)
    ev = np.asarray(event, dtype=bool)
    if ev.shape != (1 << g.n_edges,):
        raise ValueError("event array must have one entry per configuration")
    return ev


def is_increasing(event: np.ndarray, n_edges: int) -> bool:
    """Up-set test on the full cube: A(omega) implies A(omega with e opened)."""
    idx = np.arange(1 << n_edges, dtype=np.int64)
    for e in range(n_edges):
        low = idx[((idx >> e) & 1) == 0]
        if np.any(event[low] & ~event[low | (1 << e)]):
            return False
    return True


def event_probability(g: Graph, params: RCParams, event: Event, cap: int = DEFAULT_CAP) -> float:
    return exact_distribution(g, params, cap).probability(event)


# --------------------------------------------------------------------------
# single-edge conditionals and deletion/contraction


def _full_config_from_rest(g: Graph, e: int, rest) -> np.ndarray:
    r = np.asarray(rest, dtype=np.uint8).reshape(-1)
    if r.shape[0] == g.n_edges:
        r = np.delete(r, e)
    if r.shape[0] != g.n_edges - 1:
        raise ValueError("rest must assign every edge other than e")
    return np.insert(r, e, 0)


def conditional_edge_probability(g: Graph, params: RCParams, e: int, rest,
                                 method: str = "closed_form", cap: int = DEFAULT_CAP) -> float:
    """P(edge ``e`` open | states of the other edges).

    ``closed_form`` returns ``p`` when the endpoints of ``e`` are joined off
    ``e`` and ``p / (p + (1-p) q)`` otherwise; ``enumerate`` takes the ratio
    of the two exact configuration probabilities.
    """
    omega = _full_config_from_rest(g, e, rest)
    if method == "closed_form":
        return params.p if joined_without(g, omega, e) else params.p_isolated
    if method == "enumerate":
        dist = exact_distribution(g, params, cap)
        i0 = config_to_index(omega)
        a, b = dist.probs[i0 | (1 << e)], dist.probs[i0]
        return float(a / (a + b))
    raise ValueError(f"unknown method {method!r}")


def conditional_closed_form_error(g: Graph, params: RCParams, cap: int = DEFAULT_CAP) -> float:
    """Largest gap between enumerated and closed-form edge conditionals."""
    dist = exact_distribution(g, params, cap)
    t = config_table(g, cap)
    idx = all_indices(g)
    worst = 0.0
    for e, (u, v) in enumerate(g.edges):
        m0 = idx[((idx >> e) & 1) == 0]
        m1 = m0 | (1 << e)
        enum = dist.probs[m1] / (dist.probs[m1] + dist.probs[m0])
        joined = t.labels[m0, u] == t.labels[m0, v]
        closed = np.where(joined, params.p, params.p_isolated)
        worst = max(worst, float(np.max(np.abs(enum - closed))))
    return worst


def _drop_bit(m: np.ndarray, e: int) -> np.ndarray:
    return (m & ((1 << e) - 1)) | ((m >> (e + 1)) << e)


def deletion_contraction_error(g: Graph, params: RCParams, e: int, cap: int = DEFAULT_CAP) -> float:
    """Max gap between phi_G(. | omega(e)=j) and the measure on G\\e (j=0) or G.e (j=1)."""
    dist = exact_distribution(g, params, cap)
    idx = all_indices(g)
    worst = 0.0
    for j, h in ((0, delete_edge(g, e)), (1, contract_edge(g, e))):
        sel = idx[((idx >> e) & 1) == j]
        cond = dist.probs[sel] / dist.probs[sel].sum()
        other = exact_distribution(h, params, cap).probs[_drop_bit(sel, e)]
        worst = max(worst, float(np.max(np.abs(cond - other))))
    return worst


def deletion_contraction_conditionals_check(g: Graph, params: RCParams, e: int,
                                            tol: float = 1e-12, cap: int = DEFAULT_CAP) -> bool:
    return deletion_contraction_error(g, params, e, cap) < tol


# --------------------------------------------------------------------------
# Potts model and the correlation/connection identity


def potts_spin_table(n_vertices: int, q: int, cap: int = SPIN_CAP) -> np.ndarray:
    total = q ** n_vertices
    if total > cap:
        raise CapExceeded(f"{q}^{n_vertices} spin states exceeds the cap of {cap}")
    idx = np.arange(total, dtype=np.int64)
    return np.stack([(idx // q ** v) % q for v in range(n_vertices)], axis=1).astype(np.int16)


def potts_distribution(g: Graph, beta: float, J: float, q: int, cap: int = SPIN_CAP) -> np.ndarray:
    """Zero-field Potts probabilities, indexed as in :func:`potts_spin_table`."""
    spins = potts_spin_table(g.vertex_count, q, cap)
    ea = g.edge_array()
    agree = (spins[:, ea[:, 0]] == spins[:, ea[:, 1]]).sum(axis=1) if len(ea) else np.zeros(len(spins))
    w = np.exp(beta * J * (agree - g.n_edges))
    return w / w.sum()


def potts_correlation(g: Graph, beta: float, J: float, q: int, x: int, y: int, cap: int = SPIN_CAP) -> float:
    """Two-point function ``P(sigma_x = sigma_y) - 1/q``."""
    if int(q) != q or q < 2:
        raise ValueError("Potts q must be an integer >= 2")
    q = int(q)
    spins = potts_spin_table(g.vertex_count, q, cap)
    pi = potts_distribution(g, beta, J, q, cap)
    return float(pi[spins[:, x] == spins[:, y]].sum()) - 1.0 / q


def coupling_p(beta: float, J: float) -> float:
    return float(-np.expm1(-beta * J))


def correlation_connection_error(g: Graph, beta: float, J: float, q: int, x: int, y: int) -> float:
    tau = potts_correlation(g, beta, J, q, x, y)
    params = RCParams(coupling_p(beta, J), float(q))
    conn = event_probability(g, params, connection_event(g, x, y))
    return abs(tau - (1.0 - 1.0 / q) * conn)


def correlation_connection_check(g: Graph, beta: float, J: float, q: int, x: int, y: int,
                                 tol: float = 1e-12) -> bool:
    return correlation_connection_error(g, beta, J, q, x, y) < tol


# --------------------------------------------------------------------------
# derivative formula


def russo_derivative(g: Graph, params: RCParams, event: Event, cap: int = DEFAULT_CAP) -> float:
    """d/dp phi(A) = [phi(|open| 1_A) - phi(|open|) phi(A)] / (p (1-p))."""
    p = params.p
    if not 0.0 < p < 1.0:
        raise ValueError("the derivative formula needs 0 < p < 1")
    dist = exact_distribution(g, params, cap)
    a = as_event(g, event).astype(np.float64)
    n = config_table(g, cap).n_open.astype(np.float64)
    return (dist.expectation(n * a) - dist.expectation(n) * dist.expectation(a)) / (p * (1.0 - p))


def finite_difference_derivative(g: Graph, params: RCParams, event: Event, h: float = 1e-4) -> float:
    ev = as_event(g, event)
    hi = event_probability(g, RCParams(params.p + h, params.q), ev)
    lo = event_probability(g, RCParams(params.p - h, params.q), ev)
    return (hi - lo) / (2 * h)


# --------------------------------------------------------------------------
# stochastic ordering


def holley_margin(mu1: ExactDistribution, mu2: ExactDistribution, chunk: int = 256) -> float:
    """min over pairs of ``mu1(a|b) mu2(a&b) / (mu1(a) mu2(b)) - 1``.

    A non-negative margin is Holley's condition with ``mu1`` on the maximum,
    which makes ``mu1`` stochastically larger than ``mu2``.
    """
    if mu1.graph.n_edges != mu2.graph.n_edges:
        raise ValueError("measures live on different configuration spaces")
    a1, a2 = mu1.probs, mu2.probs
    if np.any(a1 <= 0) or np.any(a2 <= 0):
        raise ValueError("Holley's condition is stated for strictly positive measures")
    idx = np.arange(len(a1), dtype=np.int64)
    worst = np.inf
    for s in range(0, len(idx), chunk):
        a = idx[s:s + chunk, None]
        lhs = a1[a | idx[None, :]] * a2[a & idx[None, :]]
        rhs = a1[a] * a2[None, :]
        worst = min(worst, float(np.min(lhs / rhs)) - 1.0)
    return worst


def holley_condition_check(mu1: ExactDistribution, mu2: ExactDistribution, tol: float = 1e-12) -> bool:
    """Pointwise ``mu1(w1 v w2) mu2(w1 ^ w2) >= mu1(w1) mu2(w2)`` (relative slack ``tol``)."""
    return holley_margin(mu1, mu2) >= -tol


def fkg_gap(g: Graph, params: RCParams, A: Event, B: Event, cap: int = DEFAULT_CAP) -> float:
    a, b = as_event(g, A), as_event(g, B)
    for ev, name in ((a, "A"), (b, "B")):
        if not is_increasing(ev, g.n_edges):
            raise ValueError(f"event {name} is not increasing")
    dist = exact_distribution(g, params, cap)
    return dist.probability(a & b) - dist.probability(a) * dist.probability(b)


def fkg_check(g: Graph, params: RCParams, A: Event, B: Event, tol: float = 1e-12) -> bool:
    return fkg_gap(g, params, A, B) >= -tol


def principal_upsets(n_edges: int) -> list[np.ndarray]:
    """``{omega >= omega0}`` for every omega0; a generating family of up-sets."""
    idx = np.arange(1 << n_edges, dtype=np.int64)
    return [(idx & m) == m for m in range(1 << n_edges)]


def comparison_pairs(g: Graph, params: RCParams, q_prime: float, p_prime: float, cap: int = DEFAULT_CAP):
    """Exact (larger, smaller) measures for the two comparison regimes.

    Returns a list of ``(label, mu_large, mu_small)`` for every regime whose
    hypotheses hold at ``(p', q')`` versus ``(p, q)``.
    """
    p, q = params.p, params.q
    out = []
    if q_prime >= q and q_prime >= 1:
        mu = exact_distribution(g, params, cap)
        mu_p = exact_distribution(g, RCParams(p_prime, q_prime), cap)
        if p_prime <= p:
            out.append(("decreasing", mu, mu_p))
        if p_prime / (q_prime * (1 - p_prime)) >= p / (q * (1 - p)):
            out.append(("increasing", mu_p, mu))
    return out


def total_variation(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(a) - np.asarray(b)).sum())


def is_connected(g: Graph) -> bool:
    if g.vertex_count == 0:
        return True
    return cluster_decompose(g, np.ones(g.n_edges, dtype=np.uint8)).k == 1


def exact_marginal_open(g: Graph, params: RCParams) -> np.ndarray:
    """phi(e open) for each edge."""
    dist = exact_distribution(g, params)
    idx = all_indices(g)
    return np.array([dist.probs[((idx >> e) & 1) == 1].sum() for e in range(g.n_edges)])


def config_probability(dist: ExactDistribution, omega) -> float:
    return float(dist.probs[config_to_index(as_config(dist.graph, omega))])

