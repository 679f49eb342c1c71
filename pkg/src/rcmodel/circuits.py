"""Dual circuits of the wired box B(n) and their outer-circuit probabilities.

B(n) is the (2n+1) x (2n+1) box with its boundary wired. The dual is the
free 2n x 2n box of half-integer points; every dual edge crosses exactly one
primal edge having an interior endpoint. Primal edges between boundary
vertices become loops after wiring, are crossed by no dual circuit, and are
independent of everything else, so they are dropped before enumerating.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .duality import self_dual_point
from .exact import DEFAULT_CAP, RCParams, exact_distribution
from .graph import BoundarySpec, Graph, build_box_lattice


@dataclass(frozen=True)
class DualCircuit:
    dual_vertices: tuple[tuple[int, int], ...]  # cyclic order, index (i, j) is the point (i + 1/2, j + 1/2)
    primal_edges: frozenset[int]  # edges of B(n) crossed by the circuit
    interior: frozenset[tuple[int, int]]  # enclosed primal vertices

    @property
    def length(self) -> int:
        return len(self.dual_vertices)


def wired_box(n: int) -> Graph:
    return build_box_lattice(2, [2 * n + 1, 2 * n + 1], BoundarySpec("wired"))


def _grid_cycles(m: int) -> list[tuple[tuple[int, int], ...]]:
    """All simple cycles of the m x m grid graph, each listed once."""
    verts = [(i, j) for i in range(m) for j in range(m)]
    order = {v: k for k, v in enumerate(verts)}

    def nbrs(v):
        i, j = v
        for a, b in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
            if 0 <= a < m and 0 <= b < m:
                yield (a, b)

    cycles = []
    for s in verts:
        path, on_path = [s], {s}

        def extend(v):
            for w in nbrs(v):
                if w == s and len(path) >= 4 and order[path[1]] < order[path[-1]]:
                    cycles.append(tuple(path))
                elif order[w] > order[s] and w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    extend(w)
                    path.pop()
                    on_path.discard(w)

        extend(s)
    return cycles


def _inside(point, polygon) -> bool:
    x, y = point
    hit = False
    k = len(polygon)
    for t in range(k):
        (x1, y1), (x2, y2) = polygon[t], polygon[(t + 1) % k]
        if (y1 > y) != (y2 > y):
            if x < x1 + (y - y1) * (x2 - x1) / (y2 - y1):
                hit = not hit
    return hit


def dual_circuits(n: int) -> list[DualCircuit]:
    side = 2 * n + 1
    free = build_box_lattice(2, [side, side], BoundarySpec("free"))
    index = {c: i for i, c in enumerate(free.coords)}
    edge_id = {}
    for e, (u, v) in enumerate(free.edges):
        edge_id[frozenset((free.coords[u], free.coords[v]))] = e
    out = []
    for cyc in _grid_cycles(2 * n):
        crossed = set()
        for t in range(len(cyc)):
            (i1, j1), (i2, j2) = cyc[t], cyc[(t + 1) % len(cyc)]
            if j1 == j2:  # horizontal dual edge crosses a vertical primal edge
                x = max(i1, i2)
                crossed.add(edge_id[frozenset(((x, j1), (x, j1 + 1)))])
            else:
                y = max(j1, j2)
                crossed.add(edge_id[frozenset(((i1, y), (i1 + 1, y)))])
        poly = [(i + 0.5, j + 0.5) for i, j in cyc]
        interior = frozenset(c for c in index if _inside(c, poly))
        out.append(DualCircuit(cyc, frozenset(crossed), interior))
    return out


def outer_circuit_probabilities(n: int, q: float, p: float | None = None, circuits=None,
                                cap: int = DEFAULT_CAP) -> list[tuple[DualCircuit, float]]:
    """Exact probability that each dual circuit is an outer circuit under the wired measure.

    A circuit is outer when all primal edges it crosses are closed and no
    circuit enclosing a strictly larger region has the same property.
    """
    if p is None:
        p = self_dual_point(q)
    g = wired_box(n)
    circuits = dual_circuits(n) if circuits is None else circuits
    keep = [e for e, (u, v) in enumerate(g.edges) if u != v]
    reduced = Graph(g.vertex_count, tuple(g.edges[e] for e in keep))
    pos = {e: i for i, e in enumerate(keep)}
    dist = exact_distribution(reduced, RCParams(p, q), cap)
    idx = np.arange(len(dist.probs), dtype=np.int64)
    masks = [sum(1 << pos[e] for e in c.primal_edges) for c in circuits]
    dual_open = [(idx & m) == 0 for m in masks]
    out = []
    for a, ca in enumerate(circuits):
        outer = dual_open[a].copy()
        for b, cb in enumerate(circuits):
            if b != a and ca.interior < cb.interior:
                outer &= ~dual_open[b]
        out.append((ca, float(dist.probs[outer].sum())))
    return out


def outer_circuit_bound(q: float, length: int) -> float:
    """(1/q) (q / (1 + sqrt q)^4)^(length/4)."""
    return (1.0 / q) * (q / (1.0 + np.sqrt(q)) ** 4) ** (length / 4.0)


@dataclass(frozen=True)
class CircuitBoundRow:
    length: int
    probability: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.probability <= self.bound


def outer_circuit_bound_check(n: int, q: float, circuits=None, p: float | None = None) -> tuple[bool, list[CircuitBoundRow]]:
    rows = [CircuitBoundRow(c.length, prob, outer_circuit_bound(q, c.length))
            for c, prob in outer_circuit_probabilities(n, q, p, circuits)]
    return all(r.holds for r in rows), rows
