"""Mean-field random-cluster model on the complete graph K_n with p = lambda / n."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .exact import RCParams
from .graph import Graph, build_complete_graph, fast_labels
from .rng import generator
from .samplers import heat_bath_chain

KN_CAP = 100_000
HEAT_BATH_CAP = 200


@dataclass(frozen=True)
class MeanFieldParams:
    n: int
    lam: float
    q: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.lam < 0 or self.lam > self.n:
            raise ValueError("need 0 <= lambda <= n so that p = lambda / n is a probability")
        if self.q < 1:
            raise ValueError("mean-field sampling needs q >= 1")

    @property
    def p(self) -> float:
        return self.lam / self.n


def lambda_c(q: float) -> float:
    if q <= 0:
        raise ValueError("q must be positive")
    if q <= 2:
        return float(q)
    return float(2.0 * (q - 1.0) / (q - 2.0) * np.log(q - 1.0))


def fixed_point_gap(theta, lam: float, q: float):
    """lam*theta - log((1 + (q-1) theta) / (1 - theta)); zero at a fixed point."""
    theta = np.asarray(theta, dtype=float)
    return lam * theta - np.log1p((q - 1.0) * theta) + np.log1p(-theta)


def theta_root(lam: float, q: float, grid: int = 10_000) -> float:
    """Largest root in [0, 1) of the mean-field equation; exactly 0.0 if none is positive.

    A sign scan on a uniform grid (plus log-spaced points near 0, where the
    root emerges continuously) brackets the largest root, then bisection.
    """
    if lam <= 0:
        return 0.0
    top = 1.0 - 1e-9
    xs = np.unique(np.concatenate([np.linspace(0.0, top, grid + 1)[1:], np.logspace(-12, -2, 400)]))
    gs = fixed_point_gap(xs, lam, q)
    pos = np.flatnonzero(gs > 0)
    if len(pos) == 0:
        return 0.0
    i = pos[-1]
    if i == len(xs) - 1:
        return float(xs[-1])
    a, b = xs[i], xs[i + 1]
    # bisect to float resolution: near theta = 1 the gap is steep, so a
    # 1e-12 bracket alone would leave |gap| around 1e-10
    while True:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if fixed_point_gap(mid, lam, q) > 0:
            a = mid
        else:
            b = mid
    return float(a if abs(fixed_point_gap(a, lam, q)) <= abs(fixed_point_gap(b, lam, q)) else b)


def theta_mean_field(lam: float, q: float) -> float:
    """Giant-component density: 0 below lambda_c, the largest root from lambda_c on.

    For q > 2 the equation keeps a positive root slightly below lambda_c; that
    root is metastable and not the order parameter, hence the cut.
    """
    return 0.0 if lam < lambda_c(q) else theta_root(lam, q)


def _pair_from_index(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Invert the row-major enumeration of pairs i < j of range(n)."""
    k = np.asarray(k, dtype=np.int64)
    # number of pairs with first element < i is i*n - i(i+1)/2
    b = 2 * n - 1
    i = np.floor((b - np.sqrt(b * b - 8.0 * k)) / 2.0).astype(np.int64)
    start = i * n - i * (i + 1) // 2
    fix = start > k
    i[fix] -= 1
    start = i * n - i * (i + 1) // 2
    over = k - start >= n - 1 - i
    i[over] += 1
    start = i * n - i * (i + 1) // 2
    j = k - start + i + 1
    return i, j


def erdos_renyi_edges(m: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Open edges of G(m, p) as an (M, 2) array, via a binomial count and a uniform subset."""
    pairs = m * (m - 1) // 2
    if pairs == 0 or p <= 0:
        return np.zeros((0, 2), dtype=np.int64)
    M = rng.binomial(pairs, p)
    k = rng.choice(pairs, size=M, replace=False) if M < pairs else np.arange(pairs)
    i, j = _pair_from_index(np.sort(k), m)
    return np.stack([i, j], axis=1)


def _components(n: int, edges: np.ndarray):
    m = coo_matrix((np.ones(len(edges), dtype=np.int8), (edges[:, 0], edges[:, 1])), shape=(n, n))
    return connected_components(m, directed=False)


def largest_fraction(n: int, edges: np.ndarray) -> float:
    k, labels = _components(n, edges)
    return float(np.bincount(labels).max() / n)


@dataclass
class MeanFieldResult:
    params: MeanFieldParams
    dynamics: str
    fractions: np.ndarray
    approximate: bool
    theta_prediction: float = field(init=False)

    def __post_init__(self):
        self.theta_prediction = theta_mean_field(self.params.lam, self.params.q)

    @property
    def mean_fraction(self) -> float:
        return float(np.mean(self.fractions))

    @property
    def stderr(self) -> float:
        f = self.fractions
        return float(np.std(f, ddof=1) / np.sqrt(len(f))) if len(f) > 1 else 0.0


def _sw_bonds_on_kn(n: int, p: float, spins: np.ndarray, rng) -> np.ndarray:
    """Bonds given spins on K_n: independent G(m, p) inside each colour class."""
    parts = []
    for c in np.unique(spins):
        members = np.flatnonzero(spins == c)
        e = erdos_renyi_edges(len(members), p, rng)
        parts.append(members[e])
    return np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)


def simulate_Kn(params: MeanFieldParams, dynamics: str, burn_in: int, samples: int, seed: int,
                start: str = "ordered", thin: int = 1) -> MeanFieldResult:
    """Largest-cluster fraction of the random-cluster measure on K_n.

    q = 1 draws independent Erdos-Renyi graphs. ``sw`` (integer q) runs
    Swendsen-Wang, sampling each colour class as an Erdos-Renyi graph.
    ``heat_bath`` runs single-edge updates on an explicit K_n and is only
    approximately in equilibrium; it is flagged as such.
    """
    n, p, q = params.n, params.p, params.q
    if n > KN_CAP:
        raise ValueError(f"n = {n} exceeds the cap of {KN_CAP}")
    rng = generator(seed, stream=3)
    fr = np.empty(samples)
    if q == 1 and dynamics != "heat_bath":
        for s in range(samples):
            fr[s] = largest_fraction(n, erdos_renyi_edges(n, p, rng))
        return MeanFieldResult(params, "bernoulli", fr, False)
    if dynamics == "sw":
        if not float(q).is_integer():
            raise ValueError("Swendsen-Wang needs an integer q")
        qi = int(q)
        spins = np.ones(n, dtype=np.int64) if start == "ordered" else rng.integers(1, qi + 1, size=n)
        for it in range(burn_in + samples * thin):
            edges = _sw_bonds_on_kn(n, p, spins, rng)
            k, labels = _components(n, edges)
            spins = rng.integers(1, qi + 1, size=k)[labels]
            s = it - burn_in
            if s >= 0 and s % thin == 0:
                fr[s // thin] = np.bincount(labels).max() / n
        return MeanFieldResult(params, "sw", fr, False)
    if dynamics == "heat_bath":
        if n > HEAT_BATH_CAP:
            raise ValueError(f"heat bath on K_n is limited to n <= {HEAT_BATH_CAP}")
        g = build_complete_graph(n)
        E = g.n_edges
        w = np.ones(E, dtype=np.uint8) if start == "ordered" else np.zeros(E, dtype=np.uint8)
        w, _ = heat_bath_chain(g, RCParams(p, q), w, burn_in * E, seed, stream=0)
        for s in range(samples):
            w, _ = heat_bath_chain(g, RCParams(p, q), w, thin * E, seed, stream=0, start=(burn_in + s * thin) * E)
            k, labels = fast_labels(n, g.edge_array(), w)
            fr[s] = np.bincount(labels).max() / n
        return MeanFieldResult(params, "heat_bath", fr, True)
    raise ValueError(f"unknown dynamics {dynamics!r}")


def color_reduction_sample(g: Graph, omega, rho: float, rng: np.random.Generator):
    """Colour each open cluster red with probability rho; keep the red part.

    Returns ``(kept_vertices, induced_graph, induced_omega)`` where the
    induced graph is relabelled to ``0..len(kept)-1``.
    """
    w = np.asarray(omega, dtype=np.uint8)
    k, labels = fast_labels(g.vertex_count, g.edge_array(), w)
    red = rng.random(k) < rho
    kept = np.flatnonzero(red[labels])
    new = -np.ones(g.vertex_count, dtype=np.int64)
    new[kept] = np.arange(len(kept))
    keep_e = [e for e, (u, v) in enumerate(g.edges) if new[u] >= 0 and new[v] >= 0]
    sub = Graph(len(kept), tuple((int(new[g.edges[e][0]]), int(new[g.edges[e][1]])) for e in keep_e))
    return kept, sub, w[keep_e]


def results_to_csv(results, header_lines=()) -> str:
    buf = io.StringIO()
    for h in header_lines:
        buf.write(f"# {h}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["lambda", "q", "n", "mean_fraction", "stderr", "theta_prediction"])
    for r in results:
        wr.writerow([repr(float(r.params.lam)), repr(float(r.params.q)), r.params.n,
                     repr(r.mean_fraction), repr(r.stderr), repr(r.theta_prediction)])
    return buf.getvalue()
