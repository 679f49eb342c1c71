"""Limits of the random-cluster measure as q tends to zero.

Each regime ties p to q; the limiting measure is built directly from its
combinatorial description (connected subgraphs, spanning trees, forests)
and compared with the exact measure at small q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import DEFAULT_CAP, RCParams, config_table, exact_distribution, is_connected, total_variation
from .graph import Graph

REGIMES = ("fixed_p", "ust", "forest", "alpha")
DEFAULT_QS = (1e-1, 1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class Regime:
    """``fixed_p``: p = value; ``ust``: p = sqrt(q); ``forest``: p = q; ``alpha``: p = value * q."""

    kind: str
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in REGIMES:
            raise ValueError(f"unknown regime {self.kind!r}")
        if self.kind in ("fixed_p", "alpha") and not self.value > 0:
            raise ValueError(f"regime {self.kind} needs a positive parameter")
        if self.kind == "fixed_p" and self.value > 1:
            raise ValueError("fixed p must be at most 1")

    def p_of_q(self, q: float) -> float:
        if self.kind == "fixed_p":
            return self.value
        if self.kind == "ust":
            return float(np.sqrt(q))
        if self.kind == "forest":
            return float(q)
        return float(self.value * q)


def q_to_zero_limit_measure(g: Graph, regime: Regime, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Probability vector of the limit, indexed like :func:`exact_distribution`."""
    if regime.kind in ("fixed_p", "ust") and not is_connected(g):
        raise ValueError(f"regime {regime.kind} needs a connected graph")
    t = config_table(g, cap)
    n_open = t.n_open.astype(np.float64)
    k = t.k.astype(np.int64)
    corank = t.n_open.astype(np.int64) - g.vertex_count + k
    if regime.kind == "fixed_p":
        p = regime.value
        w = np.where(k == 1, p ** n_open * (1 - p) ** (g.n_edges - n_open), 0.0)
    elif regime.kind == "ust":
        w = ((k == 1) & (corank == 0)).astype(np.float64)
    elif regime.kind == "forest":
        w = (corank == 0).astype(np.float64)
    else:
        w = np.where(corank == 0, regime.value ** n_open, 0.0)
    total = w.sum()
    if total <= 0:
        raise ValueError("limit measure has empty support")
    return w / total


def q_to_zero_convergence(g: Graph, regime: Regime, qs=DEFAULT_QS, cap: int = DEFAULT_CAP) -> list[float]:
    """TV distance between phi_{p(q), q} and the limit, for each q."""
    limit = q_to_zero_limit_measure(g, regime, cap)
    out = []
    for q in qs:
        dist = exact_distribution(g, RCParams(regime.p_of_q(q), float(q)), cap)
        out.append(total_variation(dist.probs, limit))
    return out


def is_monotone_decreasing(values) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) < 0))
