"""Seeded random-graph generators and tree samplers.

All generators are pure functions of (params, seed): the same call always
returns the same graph, byte-identical under serialization.  Randomness comes
from Philox streams keyed by (seed, generator tag), so different generators
never share a stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import stream
from .distributions import DegreeDistribution, WeightSpec, size_biased_offspring

_REGULAR_MAX_TRIES = 1000


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1.

    edges holds each undirected edge once as (u, v) with u < v, sorted
    lexicographically.
    """

    n: int
    edges: tuple

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be >= 0")
        seen = set()
        for e in self.edges:
            u, v = e
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge {e}: need 0 <= u < v < n={self.n}")
            if e in seen:
                raise ValueError(f"repeated edge {e}")
            seen.add(e)
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        norm = {(min(u, v), max(u, v)) for u, v in edges}
        return cls(n, tuple(sorted(norm)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_array(self) -> np.ndarray:
        if not self.edges:
            return np.zeros((0, 2), dtype=np.int64)
        return np.asarray(self.edges, dtype=np.int64)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        ea = self.edge_array()
        if ea.size:
            np.add.at(deg, ea[:, 0], 1)
            np.add.at(deg, ea[:, 1], 1)
        return deg

    def adjacency_lists(self) -> list:
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def to_edge_list(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str) -> "Graph":
        rows = text.strip().split("\n") if text.strip() else []
        if not rows:
            raise ValueError("empty edge-list document")
        n, m = (int(t) for t in rows[0].split())
        edges = []
        for row in rows[1 : m + 1]:
            u, v = (int(t) for t in row.split())
            edges.append((u, v))
        if len(edges) != m:
            raise ValueError(f"edge list declares {m} edges but has {len(edges)}")
        return cls(n, tuple(edges))


@dataclass(frozen=True)
class WeightedGraph:
    """Graph plus one real weight per edge (stored once per undirected edge)."""

    graph: Graph
    weights: tuple

    def __post_init__(self):
        if len(self.weights) != self.graph.m:
            raise ValueError("need exactly one weight per edge")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    def weight_of(self, u: int, v: int) -> float:
        e = (min(u, v), max(u, v))
        return self.weights[self.graph.edges.index(e)]

    def to_edge_list(self) -> str:
        g = self.graph
        lines = [f"{g.n} {g.m}"]
        lines.extend(
            f"{u} {v} {w:.17g}" for (u, v), w in zip(g.edges, self.weights)
        )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str) -> "WeightedGraph":
        rows = text.strip().split("\n")
        n, m = (int(t) for t in rows[0].split())
        edges, weights = [], []
        for row in rows[1 : m + 1]:
            su, sv, sw = row.split()
            edges.append((int(su), int(sv)))
            weights.append(float(sw))
        return cls(Graph(n, tuple(edges)), tuple(weights))


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree as a parent array; root is node 0 with parent -1.

    truncated is set when sampling stopped at max_nodes before exhausting
    the requested depth.
    """

    parents: tuple
    depths: tuple
    truncated: bool = False

    def __post_init__(self):
        if not self.parents or self.parents[0] != -1 or self.depths[0] != 0:
            raise ValueError("node 0 must be the root")
        for i, p in enumerate(self.parents[1:], start=1):
            if not 0 <= p < i:
                raise ValueError("parents must precede children (BFS order)")
            if self.depths[i] != self.depths[p] + 1:
                raise ValueError("depth must be parent depth + 1")

    @property
    def n(self) -> int:
        return len(self.parents)

    def to_graph(self) -> Graph:
        return Graph.from_edges(
            self.n, ((p, i) for i, p in enumerate(self.parents) if p >= 0)
        )


def validate_graph(g: Graph) -> None:
    """Re-check the Graph invariants (used by the test suite)."""
    Graph(g.n, g.edges)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def _pair_stubs(stubs: np.ndarray) -> set:
    """Pair consecutive entries of a shuffled stub array into candidate edges."""
    pairs = stubs.reshape(-1, 2)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    keep = lo != hi
    return set(zip(lo[keep].tolist(), hi[keep].tolist()))


def gen_regular(n: int, k: int, seed: int) -> Graph:
    """Uniform simple k-regular graph via the pairing model with rejection.

    The whole pairing is rejected on any self-loop or multi-edge, which makes
    the accepted graph exactly uniform over simple k-regular graphs.  Raises
    if n*k is odd, k >= n, or acceptance stalls.
    """
    if k < 0 or k >= max(n, 1):
        raise ValueError(f"need 0 <= k < n, got k={k}, n={n}")
    if (n * k) % 2 != 0:
        raise ValueError(f"n*k must be even, got n={n}, k={k}")
    if k == 0:
        return Graph(n, ())
    rng = stream(seed, "regular", n, k)
    stubs0 = np.repeat(np.arange(n, dtype=np.int64), k)
    for _ in range(_REGULAR_MAX_TRIES):
        stubs = stubs0.copy()
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        edges = _pair_stubs(stubs)
        if len(edges) == n * k // 2:
            return Graph(n, tuple(sorted(edges)))
    raise RuntimeError(
        f"pairing-model rejection stalled after {_REGULAR_MAX_TRIES} tries "
        f"(n={n}, k={k}); this ensemble is too dense for rejection sampling"
    )


def gen_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p/n): each of the n(n-1)/2 pairs appears independently w.p. p/n."""
    if p < 0 or p > n:
        raise ValueError(f"need 0 <= p <= n, got p={p}, n={n}")
    rng = stream(seed, "erdos-renyi", n)
    prob = p / n if n > 0 else 0.0
    edges = []
    # Row blocks keep peak memory at O(n) while preserving draw order.
    for u in range(n - 1):
        mask = rng.random(n - 1 - u) < prob
        if mask.any():
            vs = np.nonzero(mask)[0] + u + 1
            edges.extend((u, int(v)) for v in vs)
    return Graph(n, tuple(edges))


def _parity_fix(degrees: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if degrees.sum() % 2 == 1:
        degrees = degrees.copy()
        degrees[rng.integers(0, degrees.shape[0])] += 1
    return degrees


def gen_configuration(n: int, fstar: DegreeDistribution, seed: int) -> Graph:
    """Erased configuration model with iid degrees from fstar.

    Degrees are drawn iid, parity-fixed by incrementing one uniform vertex,
    stubs matched uniformly, then self-loops dropped and multi-edges
    collapsed.  The erasure is o(n), so the empirical degree law still
    converges to fstar.
    """
    rng = stream(seed, "configuration", n)
    degrees = _parity_fix(fstar.sample(rng, n), rng)
    stubs = np.repeat(np.arange(n, dtype=np.int64), degrees)
    rng.shuffle(stubs)
    return Graph(n, tuple(sorted(_pair_stubs(stubs))))


def gen_uniform_tree(n: int, seed: int) -> Graph:
    """Uniform labeled tree on n vertices by decoding a uniform Prufer sequence."""
    if n < 1:
        raise ValueError("need n >= 1")
    if n == 1:
        return Graph(1, ())
    if n == 2:
        return Graph(2, ((0, 1),))
    rng = stream(seed, "uniform-tree", n)
    seq = rng.integers(0, n, size=n - 2)
    degree = np.ones(n, dtype=np.int64)
    np.add.at(degree, seq, 1)
    edges = []
    # Standard linear-time decode: sweep a pointer over candidate leaves,
    # reusing a freshly exposed leaf immediately when it sits behind the
    # pointer.  Consumed leaves drop to degree 0.
    ptr = 0
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    for a in seq:
        a = int(a)
        edges.append((min(leaf, a), max(leaf, a)))
        degree[leaf] = 0
        degree[a] -= 1
        if degree[a] == 1 and a < ptr:
            leaf = a
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    rest = np.nonzero(degree == 1)[0]
    u, v = int(rest[0]), int(rest[-1])
    edges.append((min(u, v), max(u, v)))
    return Graph(n, tuple(sorted(edges)))


def gen_bipartite_configuration(
    na: int, nb: int, fstar: DegreeDistribution, gstar: DegreeDistribution, seed: int
) -> Graph:
    """Bipartite configuration model; vertices 0..na-1 are side a.

    Side degrees are iid from fstar / gstar; the deficient side has degrees
    incremented at uniformly chosen vertices until stub totals agree; stubs
    are then matched uniformly across sides and multi-edges collapsed.
    """
    if na < 1 or nb < 1:
        raise ValueError("need na, nb >= 1")
    rng = stream(seed, "bipartite", na, nb)
    da = fstar.sample(rng, na)
    db = gstar.sample(rng, nb)
    gap = int(da.sum() - db.sum())
    if gap > 0:
        np.add.at(db, rng.integers(0, nb, size=gap), 1)
    elif gap < 0:
        np.add.at(da, rng.integers(0, na, size=-gap), 1)
    stubs_a = np.repeat(np.arange(na, dtype=np.int64), da)
    stubs_b = np.repeat(np.arange(nb, dtype=np.int64), db) + na
    rng.shuffle(stubs_b)
    edges = set(zip(stubs_a.tolist(), stubs_b.tolist()))
    return Graph(na + nb, tuple(sorted(edges)))


def attach_weights(g: Graph, dist: WeightSpec, seed: int) -> WeightedGraph:
    """Attach one iid weight per edge (symmetric by construction)."""
    rng = stream(seed, "weights", g.n, g.m)
    return WeightedGraph(g, tuple(dist.sample(rng, g.m)))


def sample_gwt(
    fstar: DegreeDistribution,
    depth: int,
    max_nodes: int,
    seed: int,
    rng: np.random.Generator | None = None,
) -> RootedTree:
    """Galton-Watson tree with degree distribution fstar, stopped at `depth`.

    The root draws its child count from fstar, every later node from the
    size-biased offspring law.  Sampling aborts cleanly at max_nodes with
    the truncated flag set.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if rng is None:
        rng = stream(seed, "gwt", depth)
    offspring = size_biased_offspring(fstar) if fstar.mean() > 0 else None
    parents = [-1]
    depths = [0]
    frontier = [0]
    truncated = False
    for d in range(depth):
        if not frontier or truncated:
            break
        law = fstar if d == 0 else offspring
        counts = law.sample(rng, len(frontier))
        nxt = []
        for node, c in zip(frontier, counts):
            for _ in range(int(c)):
                if len(parents) >= max_nodes:
                    truncated = True
                    break
                parents.append(node)
                depths.append(d + 1)
                nxt.append(len(parents) - 1)
            if truncated:
                break
        frontier = nxt
    return RootedTree(tuple(parents), tuple(depths), truncated)
