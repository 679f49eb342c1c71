"""Rank-generating function W_G(u, v) by enumeration and by deletion-contraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded
from .exact import DEFAULT_CAP, RCParams, config_table
from .graph import Graph, UnionFind


@dataclass(frozen=True)
class RankPolynomial:
    """Integer coefficients ``coeffs[i, j]`` of ``u^i v^j`` (rank i, corank j)."""

    coeffs: np.ndarray
    n_vertices: int
    n_edges: int

    def coefficient_map(self) -> dict[tuple[int, int], int]:
        return {(int(i), int(j)): int(self.coeffs[i, j]) for i, j in zip(*np.nonzero(self.coeffs))}

    @property
    def total_mass(self) -> int:
        return int(sum(self.coefficient_map().values()))

    def __call__(self, u: float, v: float) -> float:
        return float(np.polynomial.polynomial.polyval2d(u, v, self.coeffs.astype(np.float64)))

    def evaluate_exact(self, u: int, v: int) -> int:
        return sum(c * u ** i * v ** j for (i, j), c in self.coefficient_map().items())

    def dichromatic(self, u: float, v: float) -> float:
        """``(u-1)^{|V|-1} W((u-1)^{-1}, v-1)``, the Tutte polynomial of a connected graph."""
        return (u - 1.0) ** (self.n_vertices - 1) * self(1.0 / (u - 1.0), v - 1.0)

    def __eq__(self, other):
        return (isinstance(other, RankPolynomial) and self.n_vertices == other.n_vertices
                and self.coefficient_map() == other.coefficient_map())

    def __hash__(self):
        return hash(tuple(sorted(self.coefficient_map().items())))


def _times_one_plus_v(a: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        b = a.copy()
        b[:, 1:] += a[:, :-1]
        a = b
    return a


def _times_one_plus_u(a: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        b = a.copy()
        b[1:, :] += a[:-1, :]
        a = b
    return a


def _is_bridge(n: int, edges: list[tuple[int, int]], i: int) -> bool:
    uf = UnionFind(n)
    for j, (a, b) in enumerate(edges):
        if j != i:
            uf.union(a, b)
    x, y = edges[i]
    return uf.find(x) != uf.find(y)


def _contract(n: int, edges: list[tuple[int, int]], i: int):
    a, b = edges[i]
    lo, hi = min(a, b), max(a, b)

    def m(v):
        if v == hi:
            v = lo
        return v - 1 if v > hi else v

    return n - 1, [(m(x), m(y)) for j, (x, y) in enumerate(edges) if j != i]


def _rank_dc(n: int, edges: list[tuple[int, int]], shape, counter: list[int], budget: int) -> np.ndarray:
    counter[0] += 1
    if counter[0] > budget:
        raise BudgetExceeded(f"deletion-contraction exceeded {budget} calls")
    loops = sum(1 for a, b in edges if a == b)
    rest = [(a, b) for a, b in edges if a != b]
    out = np.zeros(shape, dtype=np.int64)
    split = next((i for i in range(len(rest)) if not _is_bridge(n, rest, i)), None)
    if split is None:
        out[0, 0] = 1
        out = _times_one_plus_u(out, len(rest))
    else:
        deleted = _rank_dc(n, rest[:split] + rest[split + 1:], shape, counter, budget)
        n2, contracted_edges = _contract(n, rest, split)
        contracted = _rank_dc(n2, contracted_edges, shape, counter, budget)
        out = deleted.copy()
        out[1:, :] += contracted[:-1, :]
    return _times_one_plus_v(out, loops)


def rank_polynomial(g: Graph, method: str = "deletion_contraction", budget: int = 1 << 22,
                    cap: int = DEFAULT_CAP) -> RankPolynomial:
    """W_G(u, v) = sum over spanning subgraphs of u^rank v^corank.

    ``deletion_contraction`` splits on a non-loop non-bridge edge via
    ``W(G) = W(G\\e) + u W(G.e)``; loops contribute ``(1+v)`` and, once only
    bridges remain, each contributes ``(1+u)``.
    """
    shape = (max(g.vertex_count, 1), g.n_edges + 1)
    if method == "enumerate":
        t = config_table(g, cap)
        V = g.vertex_count
        r = V - t.k.astype(np.int64)
        c = t.n_open.astype(np.int64) - V + t.k.astype(np.int64)
        coeffs = np.zeros(shape, dtype=np.int64)
        np.add.at(coeffs, (r, c), 1)
    elif method == "deletion_contraction":
        coeffs = _rank_dc(g.vertex_count, list(g.edges), shape, [0], budget)
    else:
        raise ValueError(f"unknown method {method!r}")
    return RankPolynomial(coeffs, g.vertex_count, g.n_edges)


def partition_via_rank(g: Graph, params: RCParams, W: RankPolynomial | None = None) -> float:
    """Z = q^|V| (1-p)^|E| W(p / (q (1-p)), p / (1-p)); undefined at p = 1."""
    p, q = params.p, params.q
    if p >= 1.0:
        raise ValueError("p = 1 is outside the rank-function identity; use partition_enumerate")
    if W is None:
        W = rank_polynomial(g)
    return q ** g.vertex_count * (1 - p) ** g.n_edges * W(p / (q * (1 - p)), p / (1 - p))


def flow_count_from_rank(W: RankPolynomial, q: int) -> int:
    """Non-zero mod-q flows as ``(-1)^|E| W(-1, -q)``."""
    return (-1) ** W.n_edges * W.evaluate_exact(-1, -q)
