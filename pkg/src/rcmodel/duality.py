"""Planar duality: dual graphs from rotation systems, dual configurations and parameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import DEFAULT_CAP, RCParams, config_table, exact_distribution, is_connected
from .graph import Graph, as_config, read_edge_list, trace_faces, write_edge_list


@dataclass(frozen=True)
class DualPair:
    primal: Graph
    dual: Graph
    bijection: tuple[int, ...]  # primal edge id -> dual edge id

    def __post_init__(self):
        if self.primal.n_edges != self.dual.n_edges:
            raise ValueError("primal and dual must have the same number of edges")
        if sorted(self.bijection) != list(range(self.primal.n_edges)):
            raise ValueError("bijection must be a permutation of the edge ids")


def planar_dual(g: Graph) -> DualPair:
    """One dual vertex per face, one dual edge crossing each primal edge.

    The dual edge of ``e`` joins the face on the side of dart ``(e, 0)`` to
    the face on the side of ``(e, 1)``; it is a loop when the two coincide.
    The dual rotation at a face lists the darts in the order the face is
    traced, so tracing the dual recovers the primal vertices.
    """
    if g.embedding is None:
        raise ValueError("planar_dual needs an embedded graph")
    if not is_connected(g):
        raise ValueError("planar_dual needs a connected graph")
    faces = trace_faces(g)
    isolated = g.n_edges == 0
    n_faces = 1 if isolated else len(faces)
    if g.vertex_count - g.n_edges + n_faces != 2:
        raise ValueError("rotation system is not planar (Euler's formula fails)")
    face_of = {}
    for f, orbit in enumerate(faces):
        for d in orbit:
            face_of[d] = f
    edges = tuple((face_of[(e, 0)], face_of[(e, 1)]) for e in range(g.n_edges))
    rotation = tuple(tuple(orbit) for orbit in faces) if not isolated else ((),)
    dual = Graph(n_faces, edges, rotation)
    return DualPair(g, dual, tuple(range(g.n_edges)))


def dual_config(pair: DualPair, omega) -> np.ndarray:
    """omega^d(e^d) = 1 - omega(e)."""
    w = as_config(pair.primal, omega)
    out = np.empty_like(w)
    out[list(pair.bijection)] = 1 - w
    return out


def dual_parameter(p: float, q: float) -> float:
    """p^d with p^d / (1 - p^d) = q (1 - p) / p; p = 0 maps to 1."""
    if not 0.0 <= p <= 1.0 or q <= 0:
        raise ValueError("need 0 <= p <= 1 and q > 0")
    if p == 0.0:
        return 1.0
    return q * (1.0 - p) / (q * (1.0 - p) + p)


def self_dual_point(q: float) -> float:
    if q <= 0:
        raise ValueError("q must be positive")
    s = np.sqrt(q)
    return float(s / (1.0 + s))


def asymmetric_upper_bound(q: float) -> float:
    """sqrt(q) / (sqrt(1 - 1/q) + sqrt(q)), defined for q > 1."""
    if q <= 1:
        raise ValueError("the bound is stated for q > 1")
    s = np.sqrt(q)
    return float(s / (np.sqrt(1.0 - 1.0 / q) + s))


def duality_identity_error(pair: DualPair, p: float, q: float, cap: int = DEFAULT_CAP) -> float:
    """max over omega of |phi_{G,p,q}(omega) - phi_{G^d,p^d,q}(omega^d)|."""
    primal = exact_distribution(pair.primal, RCParams(p, q), cap)
    dual = exact_distribution(pair.dual, RCParams(dual_parameter(p, q), q), cap)
    E = pair.primal.n_edges
    idx = np.arange(1 << E, dtype=np.int64)
    full = (1 << E) - 1
    perm = np.asarray(pair.bijection, dtype=np.int64)
    # image of each primal mask under the bijection, then complemented
    mapped = np.zeros_like(idx)
    for e in range(E):
        mapped |= ((idx >> e) & 1) << perm[e]
    return float(np.max(np.abs(primal.probs - dual.probs[full ^ mapped])))


def duality_identity_check(pair: DualPair, p: float, q: float, tol: float = 1e-12) -> bool:
    return duality_identity_error(pair, p, q) < tol


def self_dual_weight_error(pair: DualPair, q: float, cap: int = DEFAULT_CAP) -> float:
    """At the self-dual point, phi(omega) is proportional to q^((k(omega) + k(omega^d)) / 2)."""
    p = self_dual_point(q)
    primal = exact_distribution(pair.primal, RCParams(p, q), cap)
    E = pair.primal.n_edges
    idx = np.arange(1 << E, dtype=np.int64)
    k = config_table(pair.primal, cap).k.astype(np.float64)
    kd = config_table(pair.dual, cap).k.astype(np.float64)
    mapped = np.zeros_like(idx)
    for e in range(E):
        mapped |= ((idx >> e) & 1) << pair.bijection[e]
    w = np.power(q, 0.5 * (k + kd[((1 << E) - 1) ^ mapped]))
    return float(np.max(np.abs(primal.probs - w / w.sum())))


def write_dual_pair(pair: DualPair) -> str:
    out = ["[primal]", write_edge_list(pair.primal).rstrip("\n"), "[dual]",
           write_edge_list(pair.dual).rstrip("\n"), "[bijection]"]
    out += [f"{e} -> {d}" for e, d in enumerate(pair.bijection)]
    return "\n".join(out) + "\n"


def read_dual_pair(text: str) -> DualPair:
    sections: dict[str, list[str]] = {}
    current = None
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1]
            sections[current] = []
        elif s and current is not None:
            sections[current].append(s)
    primal = read_edge_list("\n".join(sections["primal"]))
    dual = read_edge_list("\n".join(sections["dual"]))
    bij = [0] * primal.n_edges
    for row in sections["bijection"]:
        a, b = row.split("->")
        bij[int(a)] = int(b)
    return DualPair(primal, dual, tuple(bij))
