"""Finite (multi)graphs, bond configurations and open clusters.

A bond configuration is a uint8 array ``omega`` of length ``|E|`` with
``omega[e] == 1`` when edge ``e`` is open. Exhaustive code elsewhere indexes
configurations by the integer bitmask ``sum(omega[e] << e)``.

Planar embeddings are rotation systems. A dart ``(e, s)`` is the end of edge
``e`` sitting at ``edges[e][s]``; the rotation at a vertex lists its darts in
cyclic (counter-clockwise) order. A loop contributes two darts to the same
vertex.
"""

from __future__ import annotations

import functools
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

Dart = tuple[int, int]

BOUNDARY_KINDS = ("free", "wired", "periodic")


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    embedding: tuple[tuple[Dart, ...], ...] | None = None
    boundary_vertices: tuple[int, ...] | None = None
    # lattice coordinates (None for identified super-vertices); metadata only
    coords: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        n = int(self.vertex_count)
        object.__setattr__(self, "vertex_count", n)
        if n < 0:
            raise ValueError("vertex_count must be non-negative")
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if self.boundary_vertices is not None:
            bv = tuple(sorted(set(int(b) for b in self.boundary_vertices)))
            if any(not 0 <= b < n for b in bv):
                raise ValueError("boundary vertex out of range")
            object.__setattr__(self, "boundary_vertices", bv)
        if self.embedding is not None:
            emb = tuple(tuple((int(e), int(s)) for e, s in rot) for rot in self.embedding)
            object.__setattr__(self, "embedding", emb)
            _validate_rotation(n, edges, emb)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    def is_loop(self, e: int) -> bool:
        u, v = self.edges[e]
        return u == v

    def without_embedding(self) -> "Graph":
        return Graph(self.vertex_count, self.edges, None, self.boundary_vertices, self.coords)


def _validate_rotation(n, edges, emb):
    if len(emb) != n:
        raise ValueError("embedding must list a rotation for every vertex")
    seen = set()
    for v, rot in enumerate(emb):
        for e, s in rot:
            if not 0 <= e < len(edges) or s not in (0, 1):
                raise ValueError(f"bad dart ({e}, {s})")
            if edges[e][s] != v:
                raise ValueError(f"dart ({e}, {s}) listed at vertex {v} but belongs to {edges[e][s]}")
            if (e, s) in seen:
                raise ValueError(f"dart ({e}, {s}) appears twice")
            seen.add((e, s))
    if len(seen) != 2 * len(edges):
        raise ValueError("every edge end must appear exactly once in the rotation system")


@dataclass(frozen=True)
class BoundarySpec:
    kind: str = "free"
    dims: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in BOUNDARY_KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}")


@dataclass(frozen=True)
class ClusterDecomposition:
    labels: np.ndarray
    k: int
    sizes: np.ndarray


# --------------------------------------------------------------------------
# union-find


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.components = n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.components -= 1
        return True


def as_config(g: Graph, omega) -> np.ndarray:
    w = np.asarray(omega, dtype=np.uint8).reshape(-1)
    if w.shape[0] != g.n_edges:
        raise ValueError(f"configuration has length {w.shape[0]}, graph has {g.n_edges} edges")
    if np.any(w > 1):
        raise ValueError("bond states must be 0 or 1")
    return w


def config_to_index(omega) -> int:
    return sum(int(b) << e for e, b in enumerate(np.asarray(omega).reshape(-1)))


def index_to_config(index: int, n_edges: int) -> np.ndarray:
    return np.array([(index >> e) & 1 for e in range(n_edges)], dtype=np.uint8)


def cluster_decompose(g: Graph, omega) -> ClusterDecomposition:
    """Open clusters of ``omega``; isolated vertices are clusters of size one.

    Labels are dense and ordered by the smallest vertex id in each cluster.
    """
    w = as_config(g, omega)
    uf = UnionFind(g.vertex_count)
    for e, (u, v) in enumerate(g.edges):
        if w[e]:
            uf.union(u, v)
    labels = np.empty(g.vertex_count, dtype=np.int64)
    root_label: dict[int, int] = {}
    for v in range(g.vertex_count):
        r = uf.find(v)
        if r not in root_label:
            root_label[r] = len(root_label)
        labels[v] = root_label[r]
    k = len(root_label)
    sizes = np.bincount(labels, minlength=k)
    return ClusterDecomposition(labels, k, sizes)


def fast_labels(n: int, edge_array: np.ndarray, open_mask: np.ndarray) -> tuple[int, np.ndarray]:
    """Component count and labels via scipy; for large samplers."""
    sel = edge_array[np.asarray(open_mask, dtype=bool)]
    m = coo_matrix((np.ones(len(sel), dtype=np.int8), (sel[:, 0], sel[:, 1])), shape=(n, n))
    return connected_components(m, directed=False)


def batch_labels(g: Graph, samples: np.ndarray) -> np.ndarray:
    """(N, V) cluster labels for N bond configurations at once.

    Each vertex ends up labelled by the smallest vertex id in its cluster,
    so two rows agree on a pair of vertices iff they are joined.
    """
    S = np.asarray(samples, dtype=bool)
    if S.ndim == 1:
        S = S[None, :]
    n = len(S)
    lab = np.tile(np.arange(g.vertex_count, dtype=np.int64), (n, 1))
    ea = g.edge_array()
    live = [(e, int(u), int(v)) for e, (u, v) in enumerate(ea) if u != v and S[:, e].any()]
    while True:
        new = lab.copy()
        for e, u, v in live:
            m = np.where(S[:, e], np.minimum(new[:, u], new[:, v]), new[:, u])
            np.minimum(new[:, u], m, out=new[:, u])
            m = np.where(S[:, e], new[:, u], new[:, v])
            np.minimum(new[:, v], m, out=new[:, v])
        # pointer jumping: a label is itself a vertex whose label is at least as small
        while True:
            jumped = np.take_along_axis(new, new, axis=1)
            if np.array_equal(jumped, new):
                break
            new = jumped
        if np.array_equal(new, lab):
            return lab
        lab = new


@functools.lru_cache(maxsize=64)
def adjacency(g: Graph) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Per vertex, the (neighbour, edge id) pairs; loops appear once."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.vertex_count)]
    for e, (u, v) in enumerate(g.edges):
        adj[u].append((v, e))
        if u != v:
            adj[v].append((u, e))
    return tuple(tuple(a) for a in adj)


def joined_without(g: Graph, omega, e: int) -> bool:
    """True iff the endpoints of ``e`` are joined by an open path avoiding ``e``."""
    x, y = g.edges[e]
    if x == y:
        return True
    adj = adjacency(g)
    seen = {x}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for w, f in adj[v]:
            if f != e and omega[f] and w not in seen:
                if w == y:
                    return True
                seen.add(w)
                queue.append(w)
    return False


# --------------------------------------------------------------------------
# builders


def build_box_lattice(d: int, side_lengths: Sequence[int], boundary: BoundarySpec | str = "free") -> Graph:
    """Nearest-neighbour box of Z^d with free, wired or periodic boundary.

    Vertices are numbered in C order of their coordinates ``0..side-1``.
    Wired boxes merge every boundary vertex into one super-vertex placed
    last; edges between boundary vertices survive as loops.
    """
    if isinstance(boundary, str):
        boundary = BoundarySpec(boundary)
    sides = tuple(int(s) for s in side_lengths)
    if d < 1 or len(sides) != d:
        raise ValueError("need d >= 1 side lengths")
    if any(s < 1 for s in sides):
        raise ValueError("side lengths must be >= 1")
    coords = list(itertools.product(*[range(s) for s in sides]))
    index = {c: i for i, c in enumerate(coords)}
    edges: list[tuple[int, int]] = []
    for c in coords:
        for axis in range(d):
            nb = list(c)
            nb[axis] += 1
            if nb[axis] < sides[axis]:
                edges.append((index[c], index[tuple(nb)]))
            elif boundary.kind == "periodic":
                nb[axis] = 0
                edges.append((index[c], index[tuple(nb)]))
    n = len(coords)
    if boundary.kind == "periodic":
        return Graph(n, tuple(edges), None, None, tuple(coords))

    bnd = tuple(i for i, c in enumerate(coords) if any(x == 0 or x == s - 1 for x, s in zip(c, sides)))
    emb = _grid_rotation(coords, index, edges, sides) if d == 2 else None
    free = Graph(n, tuple(edges), emb, bnd, tuple(coords))
    if boundary.kind == "free":
        return free
    if not bnd:
        raise ValueError("wired boundary requires a nonempty boundary")
    return identify_vertices(free, bnd)


def _grid_rotation(coords, index, edges, sides):
    # counter-clockwise order of directions: +x, +y, -x, -y
    darts_at: dict[tuple[int, int], Dart] = {}
    for e, (u, v) in enumerate(edges):
        cu, cv = coords[u], coords[v]
        axis = 0 if cu[0] != cv[0] else 1
        darts_at[(u, 2 * axis)] = (e, 0)  # u -> v is the + direction
        darts_at[(v, 2 * axis + 1)] = (e, 1)
    order = (0, 2, 1, 3)  # +x, +y, -x, -y
    return tuple(tuple(darts_at[(v, o)] for o in order if (v, o) in darts_at) for v in range(len(coords)))


def identify_vertices(g: Graph, group: Iterable[int]) -> Graph:
    """Merge ``group`` into one vertex, keeping parallel edges and loops.

    The merged vertex is numbered last; the others keep their relative order.
    When ``g`` is embedded and the group is connected through edges inside
    it, the embedding is carried along by contracting those edges (each is
    kept as an empty loop), which preserves planarity.
    """
    group = sorted(set(group))
    gset = set(group)
    keep = [v for v in range(g.vertex_count) if v not in gset]
    new_id = {v: i for i, v in enumerate(keep)}
    sup = len(keep)
    for v in group:
        new_id[v] = sup
    edges = tuple((new_id[u], new_id[v]) for u, v in g.edges)
    coords = None
    if g.coords is not None:
        coords = tuple(g.coords[v] for v in keep) + (None,)
    emb = _contract_rotation(g, gset, new_id, sup) if g.embedding is not None else None
    return Graph(sup + 1, edges, emb, (sup,), coords)


def _contract_rotation(g: Graph, gset: set, new_id: dict, sup: int):
    rot = {v: list(r) for v, r in enumerate(g.embedding)}
    owner = {v: v for v in range(g.vertex_count)}  # representative of merged blobs

    def rep(v):
        while owner[v] != v:
            v = owner[v]
        return v

    inner = [e for e, (u, v) in enumerate(g.edges) if u in gset and v in gset]
    for e in inner:
        a, b = rep(g.edges[e][0]), rep(g.edges[e][1])
        if a == b:
            continue
        ra, rb = rot[a], rot[b]
        i, j = ra.index((e, 0)), rb.index((e, 1))
        seq = rb[j + 1:] + rb[:j]
        rot[a] = ra[:i] + seq + [(e, 0), (e, 1)] + ra[i + 1:]
        del rot[b]
        owner[b] = a
    reps = {rep(v) for v in gset}
    if len(reps) != 1:
        return None  # group not connected inside itself; leave unembedded
    (r,) = reps
    out: list[tuple[Dart, ...]] = [()] * (sup + 1)
    for v, lst in rot.items():
        if v in gset and v != r:
            continue
        out[sup if v == r else new_id[v]] = tuple(lst)
    return tuple(out)


def build_complete_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("n must be >= 1")
    return Graph(n, tuple(itertools.combinations(range(n), 2)))


def build_regular_tree(branching: int, depth: int) -> Graph:
    """Rooted tree in breadth-first numbering; root is vertex 0."""
    if branching < 1 or depth < 0:
        raise ValueError("need branching >= 1 and depth >= 0")
    edges = []
    level = [0]
    n = 1
    for _ in range(depth):
        nxt = []
        for parent in level:
            for _ in range(branching):
                edges.append((parent, n))
                nxt.append(n)
                n += 1
        level = nxt
    return Graph(n, tuple(edges))


def cycle_graph(n: int) -> Graph:
    """Embedded n-cycle (n >= 1; n=1 is a loop, n=2 a digon)."""
    edges = tuple((i, (i + 1) % n) for i in range(n))
    emb = tuple(((i, 0), ((i - 1) % n, 1)) for i in range(n))
    return Graph(n, edges, emb)


def path_graph(n: int) -> Graph:
    edges = tuple((i, i + 1) for i in range(n - 1))
    emb = tuple(tuple(d for d in ((i, 0), (i - 1, 1)) if 0 <= d[0] < n - 1) for i in range(n))
    return Graph(n, edges, emb)


def embedded_from_positions(n: int, edges: Sequence[tuple[int, int]], positions) -> Graph:
    """Rotation system of a straight-line drawing (simple graphs only)."""
    pos = np.asarray(positions, dtype=float)
    darts: list[list[tuple[float, Dart]]] = [[] for _ in range(n)]
    for e, (u, v) in enumerate(edges):
        if u == v:
            raise ValueError("straight-line drawings cannot have loops")
        du, dv = pos[v] - pos[u], pos[u] - pos[v]
        darts[u].append((float(np.arctan2(du[1], du[0])), (e, 0)))
        darts[v].append((float(np.arctan2(dv[1], dv[0])), (e, 1)))
    emb = tuple(tuple(d for _, d in sorted(lst)) for lst in darts)
    return Graph(n, tuple(edges), emb)


def delete_edge(g: Graph, e: int) -> Graph:
    edges = g.edges[:e] + g.edges[e + 1:]
    return Graph(g.vertex_count, edges)


def contract_edge(g: Graph, e: int) -> Graph:
    """G.e; contracting a loop is the same as deleting it."""
    a, b = g.edges[e]
    if a == b:
        return delete_edge(g, e)
    lo, hi = min(a, b), max(a, b)

    def m(v):
        if v == hi:
            v = lo
        return v - 1 if v > hi else v

    edges = tuple((m(u), m(v)) for f, (u, v) in enumerate(g.edges) if f != e)
    return Graph(g.vertex_count - 1, edges)


# --------------------------------------------------------------------------
# faces and Euler's formula


def _rotation_successor(g: Graph, open_mask) -> dict[Dart, Dart]:
    succ = {}
    for rot in g.embedding:
        live = [d for d in rot if open_mask[d[0]]]
        for i, d in enumerate(live):
            succ[d] = live[(i + 1) % len(live)]
    return succ


def trace_faces(g: Graph, omega=None) -> list[list[Dart]]:
    """Face boundaries (dart cycles) of the open subgraph under the embedding.

    The face following dart ``(e, s)`` continues with the dart after
    ``(e, 1-s)`` in the rotation at the far endpoint. Vertices with no open
    darts contribute no cycle.
    """
    if g.embedding is None:
        raise ValueError("graph has no embedding")
    w = np.ones(g.n_edges, dtype=np.uint8) if omega is None else as_config(g, omega)
    succ = _rotation_successor(g, w)
    faces, seen = [], set()
    for start in succ:
        if start in seen:
            continue
        face, d = [], start
        while d not in seen:
            seen.add(d)
            face.append(d)
            d = succ[(d[0], 1 - d[1])]
        faces.append(face)
    return faces


def face_count(g: Graph, omega) -> int:
    """Faces of ``(V, open edges)`` in the plane, the infinite face included."""
    w = as_config(g, omega)
    orbits = trace_faces(g, w)
    touched = np.zeros(g.vertex_count, dtype=bool)
    for e in np.flatnonzero(w):
        touched[list(g.edges[e])] = True
    k = cluster_decompose(g, w).k
    # each component is drawn separately; their outer faces merge into one
    return len(orbits) + int((~touched).sum()) - (k - 1)


def euler_identity_check(g: Graph, omega) -> bool:
    """``k = |V| - |open| + f - 1``; fails for non-planar rotation systems."""
    w = as_config(g, omega)
    k = cluster_decompose(g, w).k
    return k == g.vertex_count - int(w.sum()) + face_count(g, w) - 1


# --------------------------------------------------------------------------
# text format


def write_edge_list(g: Graph) -> str:
    lines = [f"{g.vertex_count} {g.n_edges}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    if g.boundary_vertices is not None:
        lines.append("boundary " + " ".join(map(str, g.boundary_vertices)))
    if g.embedding is not None:
        lines.append("rotation")
        for v, rot in enumerate(g.embedding):
            lines.append(f"{v}:" + "".join(f" {e}.{s}" for e, s in rot))
    return "\n".join(lines) + "\n"


def read_edge_list(text: str) -> Graph:
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [r for r in rows if r and not r.startswith("#")]
    n, m = map(int, rows[0].split())
    edges = [tuple(map(int, r.split())) for r in rows[1:1 + m]]
    if any(len(e) != 2 for e in edges):
        raise ValueError("edge lines must contain exactly two endpoints")
    boundary, emb = None, None
    rest = rows[1 + m:]
    i = 0
    while i < len(rest):
        r = rest[i]
        if r.startswith("boundary"):
            boundary = tuple(map(int, r.split()[1:]))
            i += 1
        elif r == "rotation":
            rot: list[tuple[Dart, ...]] = [()] * n
            for r2 in rest[i + 1:i + 1 + n]:
                head, _, tail = r2.partition(":")
                rot[int(head)] = tuple(tuple(map(int, tok.split("."))) for tok in tail.split())
            emb = tuple(rot)
            i += 1 + n
        else:
            raise ValueError(f"unexpected line {r!r}")
    return Graph(n, tuple(edges), emb, boundary)


def graph_hash(g: Graph) -> str:
    import hashlib

    return hashlib.sha256(write_edge_list(g).encode()).hexdigest()[:16]


def random_graph(rng: np.random.Generator, n_vertices: int, n_edges: int, allow_loops: bool = True) -> Graph:
    """Uniform endpoints for each edge; parallel edges allowed."""
    if n_edges and n_vertices < 2 and not allow_loops:
        raise ValueError("a loopless graph with edges needs two vertices")
    edges = []
    while len(edges) < n_edges:
        u, v = (int(x) for x in rng.integers(0, n_vertices, size=2))
        if u == v and not allow_loops:
            continue
        edges.append((u, v))
    return Graph(n_vertices, tuple(edges))
