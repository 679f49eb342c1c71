"""Heat-bath dynamics, monotone coupling from the past, and Swendsen-Wang.

Heat-bath updates are driven by (edge, uniform) pairs drawn from the keyed
generator in :mod:`rcmodel.rng`, indexed by time. An edge is open after the
update iff ``U > threshold``; the tie ``U == threshold`` closes it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import NotCoalesced
from .exact import DEFAULT_CAP, RCParams, config_table, exact_distribution, potts_spin_table
from .graph import Graph, as_config, fast_labels, joined_without
from .rng import generator, keyed_index, keyed_uniform

MAX_DOUBLINGS = 30
TABLE_EDGE_LIMIT = 20
BATCH_CHUNK = 1 << 17


@dataclass(frozen=True)
class SpinConfig:
    spins: np.ndarray  # values in 1..q
    q: int

    def __post_init__(self):
        s = np.asarray(self.spins)
        if int(self.q) != self.q or self.q < 2:
            raise ValueError("spin q must be an integer >= 2")
        if s.size and (s.min() < 1 or s.max() > self.q):
            raise ValueError("spins must lie in 1..q")


@dataclass(frozen=True)
class UpdateDraw:
    edge: int
    u: float


def update_draw(seed: int, stream: int, t: int, n_edges: int) -> UpdateDraw:
    """The draw used at time index ``t`` (``t = m`` for time ``-m`` in CFTP)."""
    return UpdateDraw(int(keyed_index(seed, stream, t, n_edges)), float(keyed_uniform(seed, stream, t)))


def update_draws(seed: int, streams, t: int, n_edges: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised over streams; agrees element-wise with :func:`update_draw`."""
    return keyed_index(seed, streams, t, n_edges), keyed_uniform(seed, streams, t)


# --------------------------------------------------------------------------
# heat bath


def closing_threshold(params: RCParams, joined):
    """P(closed | rest): 1-p if the endpoints are joined off e, else (1-p)q / (p + (1-p)q)."""
    p, q = params.p, params.q
    iso = (1.0 - p) * q / (p + (1.0 - p) * q)
    return np.where(joined, 1.0 - p, iso) if np.ndim(joined) else ((1.0 - p) if joined else iso)


def heat_bath_step(g: Graph, params: RCParams, omega, draw: UpdateDraw) -> np.ndarray:
    w = as_config(g, omega).copy()
    joined = joined_without(g, w, draw.edge)
    w[draw.edge] = 1 if draw.u > closing_threshold(params, joined) else 0
    return w


def joined_table(g: Graph, cap: int = TABLE_EDGE_LIMIT) -> np.ndarray:
    """``J[m, e]``: endpoints of e joined in configuration m with e forced closed."""
    t = config_table(g, cap)
    idx = np.arange(1 << g.n_edges, dtype=np.int64)
    J = np.empty((len(idx), g.n_edges), dtype=bool)
    for e, (u, v) in enumerate(g.edges):
        m0 = idx & ~(1 << e)
        J[:, e] = t.labels[m0, u] == t.labels[m0, v]
    return J


def heat_bath_kernel(g: Graph, params: RCParams, cap: int = 12) -> np.ndarray:
    """Dense one-step kernel of the random-edge heat bath on all 2^|E| states."""
    E = g.n_edges
    J = joined_table(g, cap)
    idx = np.arange(1 << E, dtype=np.int64)
    P = np.zeros((len(idx), len(idx)))
    for e in range(E):
        thr = closing_threshold(params, J[:, e])
        np.add.at(P, (idx, idx | (1 << e)), (1.0 - thr) / E)
        np.add.at(P, (idx, idx & ~(1 << e)), thr / E)
    return P


def detailed_balance_error(g: Graph, params: RCParams, cap: int = 12) -> float:
    """max |phi(a) P(a,b) - phi(b) P(b,a)| over all pairs."""
    pi = exact_distribution(g, params).probs
    F = pi[:, None] * heat_bath_kernel(g, params, cap)
    return float(np.max(np.abs(F - F.T)))


def glauber_rates(g: Graph, params: RCParams, omega, e: int) -> tuple[float, float]:
    """(rate of acquiring e, rate of losing e) = (p, (1-p) q^D), D = 1 iff e's endpoints are split without e."""
    w = as_config(g, omega)
    D = 0 if joined_without(g, w, e) else 1
    return params.p, (1.0 - params.p) * params.q ** D


def monotonicity_violations(g: Graph, params: RCParams, us=None, cap: int = 10) -> int:
    """Count (w <= w', e, U) with psi(w, e, U) not <= psi(w', e, U).

    Without ``us`` the scan uses every distinct outcome class of U: the
    update depends on U only through its order relative to the two
    thresholds, so those values, their midpoints and the ends of [0, 1)
    cover every case.
    """
    E = g.n_edges
    J = joined_table(g, cap)
    if us is None:
        t = sorted({float(closing_threshold(params, True)), float(closing_threshold(params, False))})
        pts = [0.0] + t + [1.0 - 1e-15]
        us = sorted(set(pts + [0.5 * (a + b) for a, b in zip(pts, pts[1:])]))
    idx = np.arange(1 << E, dtype=np.int64)
    below = (idx[:, None] & ~idx[None, :]) == 0  # below[a, b]: a <= b
    count = 0
    for e in range(E):
        thr = closing_threshold(params, J[:, e])
        for u in us:
            opens = u > thr
            count += int(np.sum(below & opens[:, None] & ~opens[None, :]))
    return count


# --------------------------------------------------------------------------
# coupling from the past


def _check_cftp(params: RCParams):
    if params.q < 1:
        raise ValueError("coupling from the past needs q >= 1: the heat bath is not monotone for q < 1")


def cftp_sample(g: Graph, params: RCParams, seed: int, stream: int = 0,
                max_doublings: int = MAX_DOUBLINGS) -> np.ndarray:
    """One exact sample by monotone coupling from the past.

    Horizons T = 1, 2, 4, ...; the update at time -m always uses the draw
    keyed by (seed, stream, m), so restarts reuse the same randomness.
    """
    _check_cftp(params)
    E = g.n_edges
    if E == 0:
        return np.zeros(0, dtype=np.uint8)
    T = 1
    for _ in range(max_doublings + 1):
        lower = np.zeros(E, dtype=np.uint8)
        upper = np.ones(E, dtype=np.uint8)
        for m in range(T, 0, -1):
            d = update_draw(seed, stream, m, E)
            lower[d.edge] = d.u > closing_threshold(params, joined_without(g, lower, d.edge))
            upper[d.edge] = d.u > closing_threshold(params, joined_without(g, upper, d.edge))
            if np.any(lower > upper):
                raise AssertionError("sandwich property violated")
        if np.array_equal(lower, upper):
            return lower
        T *= 2
    raise NotCoalesced(f"no coalescence by horizon {T // 2}")


def _cftp_table_chunk(E, J, thr_pair, seed, streams, max_doublings):
    n = len(streams)
    result = np.zeros(n, dtype=np.int64)
    pending = np.arange(n)
    T = 1
    for _ in range(max_doublings + 1):
        s = streams[pending]
        lo = np.zeros(len(pending), dtype=np.int64)
        hi = np.full(len(pending), (1 << E) - 1, dtype=np.int64)
        for m in range(T, 0, -1):
            e, u = update_draws(seed, s, m, E)
            bit = np.left_shift(1, e)
            for state in (lo, hi):
                thr = np.where(J[state, e], thr_pair[0], thr_pair[1])
                state[:] = np.where(u > thr, state | bit, state & ~bit)
            if np.any(lo & ~hi):
                raise AssertionError("sandwich property violated")
        done = lo == hi
        result[pending[done]] = lo[done]
        pending = pending[~done]
        if len(pending) == 0:
            return result
        T *= 2
    raise NotCoalesced(f"{len(pending)} samples did not coalesce by horizon {T // 2}")


def cftp_batch(g: Graph, params: RCParams, seed: int, n_samples: int, first_stream: int = 0,
               max_doublings: int = MAX_DOUBLINGS) -> np.ndarray:
    """``n_samples`` exact samples; sample i is bit-identical to ``cftp_sample(..., stream=first_stream + i)``.

    Up to ``TABLE_EDGE_LIMIT`` edges the connectivity test is a table lookup
    and all samples advance together; beyond that each sample runs alone.
    """
    _check_cftp(params)
    E = g.n_edges
    out = np.zeros((n_samples, E), dtype=np.uint8)
    if E == 0 or n_samples == 0:
        return out
    if E > TABLE_EDGE_LIMIT:
        for i in range(n_samples):
            out[i] = cftp_sample(g, params, seed, first_stream + i, max_doublings)
        return out
    J = joined_table(g)
    thr_pair = (float(closing_threshold(params, True)), float(closing_threshold(params, False)))
    streams = np.arange(first_stream, first_stream + n_samples, dtype=np.int64)
    masks = np.empty(n_samples, dtype=np.int64)
    for s in range(0, n_samples, BATCH_CHUNK):
        masks[s:s + BATCH_CHUNK] = _cftp_table_chunk(E, J, thr_pair, seed, streams[s:s + BATCH_CHUNK], max_doublings)
    for e in range(E):
        out[:, e] = (masks >> e) & 1
    return out


def heat_bath_chain(g: Graph, params: RCParams, omega0, n_steps: int, seed: int, stream: int = 0,
                    start: int = 0, record_every: int = 0) -> tuple[np.ndarray, list[np.ndarray]]:
    """Forward heat bath for steps start+1 .. start+n_steps; step t uses the draw keyed (seed, stream, t)."""
    w = as_config(g, omega0).copy()
    E = g.n_edges
    kept = []
    if E == 0:
        return w, kept
    block = 4096
    for b in range(start + 1, start + n_steps + 1, block):
        ts = np.arange(b, min(start + n_steps, b + block - 1) + 1, dtype=np.int64)
        es, us = keyed_index(seed, stream, ts, E), keyed_uniform(seed, stream, ts)
        for t, e, u in zip(ts, es, us):
            w[e] = u > closing_threshold(params, joined_without(g, w, int(e)))
            if record_every and (t - start) % record_every == 0:
                kept.append(w.copy())
    return w, kept


# --------------------------------------------------------------------------
# Edwards-Sokal coupling and Swendsen-Wang


def spins_given_bonds(g: Graph, omega, q: int, rng: np.random.Generator) -> SpinConfig:
    """Independent uniform label in 1..q for each open cluster."""
    w = as_config(g, omega)
    k, labels = fast_labels(g.vertex_count, g.edge_array(), w)
    colours = rng.integers(1, int(q) + 1, size=k)
    return SpinConfig(colours[labels], int(q))


def bonds_given_spins(g: Graph, sigma: SpinConfig, p: float, rng: np.random.Generator) -> np.ndarray:
    """Closed on disagreeing edges, else open with probability p, independently."""
    s = np.asarray(sigma.spins)
    ea = g.edge_array()
    agree = s[ea[:, 0]] == s[ea[:, 1]] if len(ea) else np.zeros(0, dtype=bool)
    return (agree & (rng.random(g.n_edges) < p)).astype(np.uint8)


def sw_step(g: Graph, p: float, q: int, sigma: SpinConfig, rng: np.random.Generator,
            return_bonds: bool = False):
    omega = bonds_given_spins(g, sigma, p, rng)
    new = spins_given_bonds(g, omega, q, rng)
    return (new, omega) if return_bonds else new


def sw_kernel(g: Graph, p: float, q: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Exact Swendsen-Wang kernel on the q^|V| spin states (indexed as in potts_spin_table)."""
    spins = potts_spin_table(g.vertex_count, q)
    t = config_table(g, cap)
    ea = g.edge_array()
    E = g.n_edges
    idx = np.arange(1 << E, dtype=np.int64)
    bits = ((idx[:, None] >> np.arange(E)) & 1).astype(bool)  # (2^E, E)
    agree = spins[:, ea[:, 0]] == spins[:, ea[:, 1]]  # (S, E)
    # P(omega | sigma): zero if omega opens a disagreeing edge
    allowed = ~np.any(bits[None, :, :] & ~agree[:, None, :], axis=2)
    n_open = bits.sum(axis=1)
    n_agree = agree.sum(axis=1)
    bond = np.where(allowed, p ** n_open[None, :] * (1 - p) ** np.maximum(n_agree[:, None] - n_open[None, :], 0), 0.0)
    # P(sigma' | omega): q^{-k} if sigma' is constant on every cluster
    lab = t.labels.astype(np.int64)
    const = np.all(spins[:, lab] == spins[:, None, :], axis=2).T  # (2^E, S)
    relabel = np.where(const, np.power(float(q), -t.k.astype(np.float64))[:, None], 0.0)
    return bond @ relabel


# --------------------------------------------------------------------------
# mixing diagnostics


def _observable(name: str, g: Graph, omega: np.ndarray, q: int | None, rng) -> float:
    if name == "edge_density":
        return float(omega.mean()) if len(omega) else 0.0
    k, labels = fast_labels(g.vertex_count, g.edge_array(), omega)
    sizes = np.bincount(labels, minlength=k)
    if name == "largest_cluster":
        return float(sizes.max() / g.vertex_count)
    if name == "magnetization":
        # Potts magnetisation of spins drawn given the bonds
        s = spins_given_bonds(g, omega, q, rng).spins
        frac = np.bincount(s, minlength=q + 1)[1:].max() / g.vertex_count
        return float((q * frac - 1.0) / (q - 1.0))
    raise ValueError(f"unknown observable {name!r}")


def mixing_probe(g: Graph, params: RCParams, dynamics: str, observable: str, steps: int, replicas: int,
                 seed: int, sweep: bool = True) -> list[tuple[int, float, int]]:
    """Observable after each step (a sweep of |E| heat-bath updates, or one SW step).

    Replica r uses stream r; chains start from all-closed bonds (heat bath)
    or constant spins (SW).
    """
    rows = []
    E = g.n_edges
    q = int(params.q) if float(params.q).is_integer() else None
    if observable == "magnetization" and (q is None or q < 2):
        raise ValueError("magnetization needs an integer q >= 2")
    if dynamics == "sw" and (q is None or q < 2):
        raise ValueError("Swendsen-Wang needs an integer q >= 2")
    for r in range(replicas):
        obs_rng = generator(seed, stream=10_000 + r)
        if dynamics == "heat_bath":
            w = np.zeros(E, dtype=np.uint8)
            rows.append((0, _observable(observable, g, w, q, obs_rng), r))
            per = E if sweep else 1
            for step in range(1, steps + 1):
                w, _ = heat_bath_chain(g, params, w, per, seed, r, start=(step - 1) * per)
                rows.append((step, _observable(observable, g, w, q, obs_rng), r))
        elif dynamics == "sw":
            rng = generator(seed, stream=r)
            sigma = SpinConfig(np.ones(g.vertex_count, dtype=np.int64), q)
            w = bonds_given_spins(g, sigma, params.p, rng)
            rows.append((0, _observable(observable, g, w, q, obs_rng), r))
            for step in range(1, steps + 1):
                sigma, w = sw_step(g, params.p, q, sigma, rng, return_bonds=True)
                rows.append((step, _observable(observable, g, w, q, obs_rng), r))
        else:
            raise ValueError(f"unknown dynamics {dynamics!r}")
    return rows


def rows_to_csv(rows, header_lines=()) -> str:
    buf = io.StringIO()
    for h in header_lines:
        buf.write(f"# {h}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["step", "observable", "replica"])
    for step, val, rep in rows:
        wr.writerow([step, repr(float(val)), rep])
    return buf.getvalue()


def config_to_hex(omega) -> str:
    """Bond configuration as hex of its bitmask (edge e is bit e)."""
    m = sum(int(b) << e for e, b in enumerate(np.asarray(omega).reshape(-1)))
    width = max(1, (len(omega) + 3) // 4)
    return format(m, f"0{width}x")


def hex_to_config(text: str, n_edges: int) -> np.ndarray:
    m = int(text, 16)
    return np.array([(m >> e) & 1 for e in range(n_edges)], dtype=np.uint8)
