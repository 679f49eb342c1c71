"""Non-zero mod-q flows and the Poisson-graph representation of connectivity."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded
from .exact import RCParams, connection_event, event_probability
from .graph import Graph
from .rng import generator

FLOW_CAP = 20


def count_mod_q_flows(g: Graph, q: int, cap: int = FLOW_CAP) -> int:
    """Number of edge labellings in {1..q-1} with zero net flow mod q at every vertex.

    Edge ``(u, v)`` carries its value out of ``u`` and into ``v``. Loops are
    balanced whatever their value and contribute a factor ``q - 1``. The
    search assigns edges in order and forces the value of the last open edge
    at each vertex.
    """
    q = int(q)
    if q < 2:
        raise ValueError("flows need an integer q >= 2")
    if g.n_edges > cap:
        raise CapExceeded(f"{g.n_edges} edges exceeds the flow cap of {cap}")
    loops = sum(1 for u, v in g.edges if u == v)
    edges = [(u, v) for u, v in g.edges if u != v]
    remaining = np.zeros(g.vertex_count, dtype=np.int64)
    for u, v in edges:
        remaining[u] += 1
        remaining[v] += 1
    balance = [0] * g.vertex_count
    remaining = remaining.tolist()

    def search(i: int) -> int:
        if i == len(edges):
            return 1
        u, v = edges[i]
        remaining[u] -= 1
        remaining[v] -= 1
        if remaining[u] == 0:
            choices = [(-balance[u]) % q]
        elif remaining[v] == 0:
            choices = [balance[v] % q]
        else:
            choices = range(1, q)
        total = 0
        for f in choices:
            if f == 0:
                continue
            if remaining[v] == 0 and (balance[v] - f) % q:
                continue
            if remaining[u] == 0 and (balance[u] + f) % q:
                continue
            balance[u] += f
            balance[v] -= f
            total += search(i + 1)
            balance[u] -= f
            balance[v] += f
        remaining[u] += 1
        remaining[v] += 1
        return total

    return search(0) * (q - 1) ** loops


def all_degrees_even(g: Graph) -> bool:
    deg = np.zeros(g.vertex_count, dtype=np.int64)
    for u, v in g.edges:
        deg[u] += 1
        deg[v] += 1
    return bool(np.all(deg % 2 == 0))


def poisson_multigraph(g: Graph, multiplicity, extra: tuple[int, int] | None = None) -> Graph:
    """Replace edge e by ``multiplicity[e]`` parallel copies; optionally add one edge."""
    edges = [g.edges[e] for e in range(g.n_edges) for _ in range(int(multiplicity[e]))]
    if extra is not None:
        edges.append(tuple(extra))
    return Graph(g.vertex_count, tuple(edges))


@dataclass(frozen=True)
class FlowsReport:
    q: int
    lam: float
    p: float
    exact: float  # (q-1) phi(x <-> y)
    numerator: float  # E F_q(G_pi + xy)
    denominator: float  # E F_q(G_pi)
    ratio: float
    stderr: float
    samples: int
    truncated: int

    @property
    def z_score(self) -> float:
        return (self.ratio - self.exact) / self.stderr if self.stderr > 0 else (0.0 if self.ratio == self.exact else np.inf)

    @property
    def within_3se(self) -> bool:
        return abs(self.z_score) <= 3.0


def flows_identity_check(g: Graph, q: int, lam: float, x: int, y: int, samples: int, seed: int,
                         cap: int = FLOW_CAP) -> FlowsReport:
    """Monte Carlo ratio E F_q(G_pi^{xy}) / E F_q(G_pi) against (q-1) phi(x <-> y).

    Multiplicities are i.i.d. Poisson(lam) per edge and p = 1 - exp(-lam q).
    Multigraphs with more than ``cap - 1`` edges are redrawn and counted as
    truncations. The standard error of the ratio uses the delta method.
    """
    if x == y:
        raise ValueError("x and y must differ")
    q = int(q)
    p = float(-np.expm1(-lam * q))
    rng = generator(seed, stream=5)
    mult = rng.poisson(lam, size=(samples, g.n_edges))
    truncated = 0
    while True:
        bad = mult.sum(axis=1) + 1 > cap
        nb = int(bad.sum())
        if nb == 0:
            break
        truncated += nb
        mult[bad] = rng.poisson(lam, size=(nb, g.n_edges))
    if truncated:
        warnings.warn(f"{truncated} Poisson multigraphs exceeded the flow cap and were redrawn")
    rows, inverse = np.unique(mult, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    base = np.array([count_mod_q_flows(poisson_multigraph(g, r), q, cap) for r in rows], dtype=np.float64)
    added = np.array([count_mod_q_flows(poisson_multigraph(g, r, (x, y)), q, cap) for r in rows], dtype=np.float64)
    A, B = added[inverse], base[inverse]
    a, b = A.mean(), B.mean()
    ratio = a / b
    cov = np.cov(np.vstack([A, B]))
    var = (cov[0, 0] - 2 * ratio * cov[0, 1] + ratio ** 2 * cov[1, 1]) / (b * b * samples)
    exact = (q - 1) * event_probability(g, RCParams(p, float(q)), connection_event(g, x, y))
    return FlowsReport(q, lam, p, exact, float(a), float(b), float(ratio), float(np.sqrt(max(var, 0.0))),
                       samples, truncated)
