"""Monte Carlo estimators: boundary connection, two-point function, edge density, clusters, scans.

Error bars are batch means over 32 batches. Heat-bath and Swendsen-Wang
samples are taken every ``thin`` steps after ``burn_in``; CFTP samples are
independent.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .duality import asymmetric_upper_bound, self_dual_point
from .exact import RCParams
from .graph import BoundarySpec, Graph, batch_labels, build_box_lattice, fast_labels
from .rng import generator
from .samplers import SpinConfig, bonds_given_spins, cftp_batch, heat_bath_chain, sw_step

N_BATCHES = 32
SAMPLERS = ("cftp", "heat_bath", "sw", "independent")


@dataclass(frozen=True)
class SamplerSpec:
    kind: str = "cftp"
    burn_in: int = 100  # sweeps (heat bath) or steps (SW)
    thin: int = 1
    start: str = "ordered"  # ordered: all open / constant spins; disordered: all closed / random spins

    def __post_init__(self):
        if self.kind not in SAMPLERS:
            raise ValueError(f"unknown sampler {self.kind!r}")
        if self.start not in ("ordered", "disordered"):
            raise ValueError("start must be 'ordered' or 'disordered'")
        if self.burn_in < 0 or self.thin < 1:
            raise ValueError("need burn_in >= 0 and thin >= 1")


@dataclass
class EstimatorReport:
    quantity: str
    estimate: float
    stderr: float
    n_samples: int
    seed: int
    parameters: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def batch_means(values, n_batches: int = N_BATCHES) -> tuple[float, float]:
    """Mean and batch-means standard error."""
    v = np.asarray(values, dtype=float)
    if len(v) == 0:
        return float("nan"), float("nan")
    nb = min(n_batches, len(v))
    if nb < 2:
        return float(v.mean()), 0.0
    size = len(v) // nb
    means = v[: nb * size].reshape(nb, size).mean(axis=1)
    return float(v.mean()), float(means.std(ddof=1) / np.sqrt(nb))


def sample_configs(g: Graph, params: RCParams, sampler: SamplerSpec, n_samples: int, seed: int,
                   stream: int = 0) -> np.ndarray:
    """(n_samples, |E|) bond configurations from the chosen sampler."""
    E = g.n_edges
    if sampler.kind == "cftp":
        return cftp_batch(g, params, seed, n_samples, first_stream=stream << 32)
    if sampler.kind == "independent":
        if params.q != 1:
            raise ValueError("independent sampling is exact only at q = 1")
        rng = generator(seed, stream)
        return (rng.random((n_samples, E)) < params.p).astype(np.uint8)
    out = np.zeros((n_samples, E), dtype=np.uint8)
    if sampler.kind == "heat_bath":
        w = np.full(E, 1 if sampler.start == "ordered" else 0, dtype=np.uint8)
        w, _ = heat_bath_chain(g, params, w, sampler.burn_in * E, seed, stream)
        t = sampler.burn_in * E
        for i in range(n_samples):
            w, _ = heat_bath_chain(g, params, w, sampler.thin * E, seed, stream, start=t)
            t += sampler.thin * E
            out[i] = w
        return out
    if not float(params.q).is_integer() or params.q < 2:
        raise ValueError("Swendsen-Wang needs an integer q >= 2")
    q = int(params.q)
    rng = generator(seed, stream)
    spins = np.ones(g.vertex_count, dtype=np.int64) if sampler.start == "ordered" else \
        rng.integers(1, q + 1, size=g.vertex_count)
    sigma = SpinConfig(spins, q)
    for _ in range(sampler.burn_in):
        sigma = sw_step(g, params.p, q, sigma, rng)
    for i in range(n_samples):
        for _ in range(sampler.thin - 1):
            sigma = sw_step(g, params.p, q, sigma, rng)
        out[i] = bonds_given_spins(g, sigma, params.p, rng)
        sigma = SpinConfig(_respin(g, out[i], q, rng), q)
    return out


def _respin(g, omega, q, rng):
    k, labels = fast_labels(g.vertex_count, g.edge_array(), omega)
    return rng.integers(1, q + 1, size=k)[labels]


# --------------------------------------------------------------------------
# boxes


@dataclass(frozen=True)
class Box:
    graph: Graph
    origin: int
    boundary: tuple[int, ...]  # vertices counted as the boundary (the super-vertex when wired)
    kind: str


def box_with_origin(sides, boundary: str = "free") -> Box:
    """Box lattice with the origin at coordinate side // 2 on each axis."""
    sides = [int(s) for s in sides]
    g = build_box_lattice(len(sides), sides, BoundarySpec(boundary))
    centre = tuple(s // 2 for s in sides)
    origin = g.coords.index(centre)
    if boundary == "wired":
        bnd = (g.vertex_count - 1,)
    else:
        bnd = tuple(i for i, c in enumerate(g.coords) if any(x == 0 or x == s - 1 for x, s in zip(c, sides)))
    return Box(g, origin, bnd, boundary)


def ball_box(n: int, b: int, d: int = 2) -> Box:
    """B(n) = [-n, n]^d with free (b=0) or wired (b=1) boundary."""
    return box_with_origin([2 * n + 1] * d, "wired" if b else "free")


def connects(g: Graph, samples: np.ndarray, x: int, targets) -> np.ndarray:
    """Per sample: is x joined to some vertex of ``targets``."""
    targets = np.asarray(list(targets), dtype=np.int64)
    return np.concatenate([np.any(lab[:, targets] == lab[:, [x]], axis=1)
                           for lab in _labels_chunked(g, samples)] or [np.zeros(0, dtype=bool)])


def _labels_chunked(g: Graph, samples: np.ndarray, chunk: int = 4096):
    for s in range(0, len(samples), chunk):
        yield batch_labels(g, samples[s:s + chunk])


def _report(quantity, values, seed, **params) -> EstimatorReport:
    est, se = batch_means(values)
    return EstimatorReport(quantity, est, se, len(values), seed, params)


def theta_box_estimate(n: int, b: int, params: RCParams, samples: int, seed: int,
                       sampler: SamplerSpec = SamplerSpec(), d: int = 2) -> EstimatorReport:
    """phi^b_{B(n)}(0 <-> boundary of B(n))."""
    box = ball_box(n, b, d)
    S = sample_configs(box.graph, params, sampler, samples, seed)
    hit = connects(box.graph, S, box.origin, box.boundary)
    return _report("theta_box", hit.astype(float), seed, n=n, b=b, d=d, p=params.p, q=params.q,
                   sampler=sampler.kind)


def box_connection_estimate(box: Box, params: RCParams, samples: int, seed: int,
                            sampler: SamplerSpec = SamplerSpec(), stream: int = 0) -> EstimatorReport:
    S = sample_configs(box.graph, params, sampler, samples, seed, stream)
    hit = connects(box.graph, S, box.origin, box.boundary)
    return _report("boundary_connection", hit.astype(float), seed, boundary=box.kind, p=params.p,
                   q=params.q, sampler=sampler.kind, start=sampler.start)


def two_point_estimate(g: Graph, params: RCParams, x: int, y: int, samples: int, seed: int,
                       sampler: SamplerSpec = SamplerSpec()) -> EstimatorReport:
    if x == y:
        return EstimatorReport("two_point", 1.0, 0.0, samples, seed, {"x": x, "y": y})
    S = sample_configs(g, params, sampler, samples, seed)
    return _report("two_point", connects(g, S, x, [y]).astype(float), seed, x=x, y=y, p=params.p,
                   q=params.q, sampler=sampler.kind)


def edge_density_estimate(g: Graph, params: RCParams, samples: int, seed: int,
                          sampler: SamplerSpec = SamplerSpec()) -> EstimatorReport:
    S = sample_configs(g, params, sampler, samples, seed)
    return _report("edge_density", S.mean(axis=1), seed, p=params.p, q=params.q, sampler=sampler.kind)


def cluster_statistics(box: Box, params: RCParams, samples: int, seed: int,
                       sampler: SamplerSpec = SamplerSpec()) -> dict:
    """Histograms of |C(0)| and rad(C(0)) = max L1 distance from the origin.

    The wired super-vertex has no coordinates and is left out of the radius.
    """
    g = box.graph
    S = sample_configs(g, params, sampler, samples, seed)
    coords = [c for c in g.coords]
    d1, dinf = _distances(coords, box.origin)
    sizes, radii, radii_inf = [], [], []
    for lab in _labels_chunked(g, S):
        members = lab == lab[:, [box.origin]]
        sizes.extend(members.sum(axis=1).tolist())
        radii.extend(np.where(members, d1[None, :], -1).max(axis=1).tolist())
        radii_inf.extend(np.where(members, dinf[None, :], -1).max(axis=1).tolist())
    return {"size_hist": np.bincount(sizes), "radius_hist": np.bincount(radii), "norm": "L1",
            "radius_hist_linf": np.bincount(radii_inf),
            "sizes": np.asarray(sizes), "radii": np.asarray(radii), "radii_linf": np.asarray(radii_inf)}


def _distances(coords, origin):
    """L1 and L-infinity distance from the origin; -1 for the wired super-vertex."""
    o = np.asarray(coords[origin])
    d1 = np.array([-1 if c is None else int(np.abs(np.asarray(c) - o).sum()) for c in coords])
    dinf = np.array([-1 if c is None else int(np.abs(np.asarray(c) - o).max()) for c in coords])
    return d1, dinf


def correlation_length_fit(box: Box, params: RCParams, samples: int, seed: int,
                           sampler: SamplerSpec = SamplerSpec(), min_distance: int = 1) -> dict:
    """Fit log phi(0 <-> x) = a - r / xi against r in both the L1 and L-infinity norm.

    Connection probabilities are averaged over all vertices at each distance.
    Distances with no observed connection are dropped. Nothing is asserted
    about the fitted lengths; they are finite-box summaries only.
    """
    g = box.graph
    S = sample_configs(g, params, sampler, samples, seed)
    hits = np.zeros(g.vertex_count)
    for lab in _labels_chunked(g, S):
        hits += (lab == lab[:, [box.origin]]).sum(axis=0)
    tau = hits / len(S)
    out = {"samples": len(S)}
    for name, dist in zip(("L1", "Linf"), _distances(g.coords, box.origin)):
        rs = np.arange(min_distance, dist.max() + 1)
        prof = np.array([tau[dist == r].mean() for r in rs])
        keep = prof > 0
        fit = np.polyfit(rs[keep], np.log(prof[keep]), 1) if keep.sum() >= 2 else (np.nan, np.nan)
        slope = fit[0]
        out[name] = {"r": rs, "tau": prof, "xi": float(-1.0 / slope) if slope < 0 else float("inf"),
                     "intercept": float(fit[1])}
    return out


# --------------------------------------------------------------------------
# scans


def config_hash(config: dict) -> str:
    text = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def header_lines(seed: int, config: dict) -> list[str]:
    return [f"tool=rcmodel {__version__}", f"seed={seed}", f"config_hash={config_hash(config)}",
            "params=" + json.dumps(config, sort_keys=True, default=str)]


SCAN_COLUMNS = ["p", "side", "boundary", "edge_density", "edge_density_se", "theta_proxy", "theta_proxy_se",
                "largest_fraction", "largest_fraction_se", "samples"]


def _scan_cell(q, p, side, boundary, d, sampler, samples, seed, cell) -> list:
    box = box_with_origin([side] * d, boundary)
    g = box.graph
    S = sample_configs(g, RCParams(float(p), q), sampler, samples, seed, stream=cell)
    hit, largest = [], []
    bnd = np.asarray(box.boundary)
    V = g.vertex_count
    for lab in _labels_chunked(g, S):
        hit.append(np.any(lab[:, bnd] == lab[:, [box.origin]], axis=1))
        # cluster sizes per row: count each label value, offsetting rows apart
        counts = np.bincount((lab + V * np.arange(len(lab))[:, None]).ravel(), minlength=V * len(lab))
        largest.append(counts.reshape(len(lab), V).max(axis=1) / V)
    hit = np.concatenate(hit).astype(float) if hit else np.zeros(0)
    largest = np.concatenate(largest) if largest else np.zeros(0)
    h, hse = batch_means(S.mean(axis=1) if g.n_edges else np.zeros(samples))
    t, tse = batch_means(hit)
    lf, lse = batch_means(largest)
    return [repr(float(p)), side, boundary, repr(h), repr(hse), repr(t), repr(tse), repr(lf), repr(lse), samples]


def critical_scan(q: float, p_grid, sides, samples: int, seed: int, sampler: SamplerSpec = SamplerSpec(),
                  boundary: str = "free", d: int = 2, workers: int = 1) -> str:
    """CSV of edge density, boundary-connection proxy and largest-cluster fraction per (p, side).

    Cell c (sides outer, p inner) samples on stream c, so the output does
    not depend on ``workers``.
    """
    config = {"q": q, "p_grid": list(map(float, p_grid)), "sides": list(map(int, sides)), "samples": samples,
              "sampler": asdict(sampler), "boundary": boundary, "d": d}
    buf = io.StringIO()
    for h in header_lines(seed, config):
        buf.write(f"# {h}\n")
    buf.write(f"# self_dual_point={self_dual_point(q)!r}\n")
    if q > 1:
        buf.write(f"# asymmetric_upper_bound={asymmetric_upper_bound(q)!r}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(SCAN_COLUMNS)
    cells = [(q, float(p), int(side), boundary, d, sampler, samples, seed, c)
             for c, (side, p) in enumerate((side, p) for side in sides for p in p_grid)]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_scan_cell, *zip(*cells)))
    else:
        rows = [_scan_cell(*c) for c in cells]
    wr.writerows(rows)
    return buf.getvalue()


def read_scan(text: str) -> list[dict]:
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(rows))


def first_order_gap(q: float = 30.0, side: int = 24, samples: int = 2000, burn_in: int = 200, seed: int = 0,
                    thin: int = 1) -> tuple[EstimatorReport, EstimatorReport]:
    """Wired (ordered start) and free (disordered start) boundary-connection proxies at p_sd(q)."""
    params = RCParams(self_dual_point(q), q)
    wired = box_connection_estimate(box_with_origin([side, side], "wired"), params, samples, seed,
                                    SamplerSpec("sw", burn_in, thin, "ordered"), stream=1)
    free = box_connection_estimate(box_with_origin([side, side], "free"), params, samples, seed,
                                   SamplerSpec("sw", burn_in, thin, "disordered"), stream=2)
    return wired, free
