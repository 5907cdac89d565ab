"""Rooted-ball statistics for checking local weak convergence assumptions.

A radius-r ball around a vertex is coded by a byte string that two balls
share exactly when they are rooted-isomorphic.  The code concatenates one
canonical segment per radius s = 0..r, so codes at different radii never
collide and distinctions present at radius s persist at every larger radius.
Tree-shaped segments use the classical bottom-up (AHU) encoding; cyclic
segments fall back to an exact minimum-adjacency-string canonical form over
root-fixing labelings, pruned by color refinement.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._rng import stream
from .distributions import DegreeDistribution
from .graphs import Graph, RootedTree, sample_gwt

#: Largest ball (vertex count) the canonical coder accepts.
BALL_CAP = 64

_SEARCH_BUDGET = 200_000


class BallCapError(ValueError):
    """Ball exceeded the canonicalization size cap."""


@dataclass(frozen=True)
class RootedBall:
    """Canonical code of the rooted-isomorphism class of a radius-r ball."""

    code: bytes
    r: int


@dataclass(frozen=True)
class BallDistribution:
    """Frequencies of ball codes; counts are exact over sample_count roots."""

    r: int
    counts: tuple  # tuple of (code, count), sorted by code
    sample_count: int

    @classmethod
    def from_counter(cls, r: int, counter: Counter, sample_count: int) -> "BallDistribution":
        return cls(r, tuple(sorted(counter.items())), sample_count)

    def frequencies(self) -> dict:
        return {code: cnt / self.sample_count for code, cnt in self.counts}

    def to_json_dict(self) -> dict:
        return {
            "r": self.r,
            "sample_count": self.sample_count,
            "entries": [
                {"code_hex": code.hex(), "freq": cnt / self.sample_count}
                for code, cnt in self.counts
            ],
        }


# ---------------------------------------------------------------------------
# canonical codes
# ---------------------------------------------------------------------------


def _ahu_code(children: list, root: int) -> bytes:
    """Bottom-up canonical string of a rooted tree: leaves are b"()", inner
    nodes wrap the sorted concatenation of child codes."""
    code: dict[int, bytes] = {}
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            parts = sorted(code[c] for c in children[node])
            code[node] = b"(" + b"".join(parts) + b")"
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in children[node])
    return code[root]


def _refine(colors: list, adj: list) -> list:
    """One-dimensional color refinement to a stable partition."""
    m = len(colors)
    while True:
        sig = [
            (colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(m)
        ]
        remap = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [remap[s] for s in sig]
        if new == colors:
            return colors
        colors = new


def _adjacency_string(adj: list, order: list) -> bytes:
    """Upper-triangle adjacency bits of the relabeled graph, packed bytes."""
    m = len(order)
    pos = {v: i for i, v in enumerate(order)}
    bits = bytearray((m * (m - 1) // 2 + 7) // 8)
    for v in range(m):
        i = pos[v]
        for u in adj[v]:
            j = pos[u]
            if i < j:
                k = i * (2 * m - i - 1) // 2 + (j - i - 1)
                bits[k >> 3] |= 1 << (k & 7)
    return bytes(bits)


def _twin_representatives(cell: list, adj_sets: list) -> list:
    """One vertex per twin class of the cell.  u and v are twins when
    adj(u) - {v} == adj(v) - {u}; swapping twins is an automorphism, so
    branching on one representative keeps the canonical minimum exact."""
    reps: list = []
    for v in cell:
        for u in reps:
            if adj_sets[u] - {v} == adj_sets[v] - {u}:
                break
        else:
            reps.append(v)
    return reps


def _canonical_graph_code(adj: list, init_colors: list) -> bytes:
    """Exact canonical form: minimum adjacency string over labelings that
    respect the refinement-stable partition, with individualization on
    ambiguous cells.  The root carries a unique initial color, so only
    root-fixing labelings compete."""
    adj_sets = [set(a) for a in adj]
    best: list = [None]
    budget = [_SEARCH_BUDGET]

    def search(colors):
        if budget[0] <= 0:
            raise RuntimeError("canonicalization budget exhausted")
        colors = _refine(list(colors), adj)
        cells: dict[int, list] = {}
        for v, c in enumerate(colors):
            cells.setdefault(c, []).append(v)
        split = next(
            (vs for _, vs in sorted(cells.items()) if len(vs) > 1), None
        )
        if split is None:
            budget[0] -= 1
            order = [v for _, v in sorted((c, v) for v, c in enumerate(colors))]
            cand = _adjacency_string(adj, order)
            if best[0] is None or cand < best[0]:
                best[0] = cand
            return
        fresh = max(colors) + 1
        for v in _twin_representatives(split, adj_sets):
            branched = list(colors)
            branched[v] = fresh
            search(branched)

    search(init_colors)
    return best[0]


def _ball_segment(adj: list, dist: list) -> bytes:
    """Canonical segment for one induced ball (local indices, root 0)."""
    m = len(adj)
    n_edges = sum(len(a) for a in adj) // 2
    if n_edges == m - 1:
        children = [[] for _ in range(m)]
        seen = [False] * m
        seen[0] = True
        queue = [0]
        for v in queue:
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    children[v].append(u)
                    queue.append(u)
        return b"T" + _ahu_code(children, 0)
    # Cyclic ball: distance-from-root joins degree as the initial invariant.
    init = [(dist[v], len(adj[v])) for v in range(m)]
    remap = {s: i for i, s in enumerate(sorted(set(init)))}
    return b"G" + _canonical_graph_code(adj, [remap[s] for s in init])


def _bfs_ball(adj_full: list, v: int, r: int, ball_cap: int):
    """Vertices within distance r of v, their local adjacency, and distances."""
    dist = {v: 0}
    order = [v]
    head = 0
    while head < len(order):
        node = order[head]
        head += 1
        if dist[node] == r:
            continue
        for u in adj_full[node]:
            if u not in dist:
                dist[u] = dist[node] + 1
                order.append(u)
                if len(order) > ball_cap:
                    raise BallCapError(
                        f"ball of radius {r} at vertex {v} exceeds cap {ball_cap}"
                    )
    local = {u: i for i, u in enumerate(order)}
    adj = [
        sorted(local[u] for u in adj_full[node] if u in local) for node in order
    ]
    return adj, [dist[u] for u in order]


def _code_from_shells(adj: list, dist: list, r: int) -> bytes:
    segments = []
    for s in range(r + 1):
        keep = [i for i, d in enumerate(dist) if d <= s]
        remap = {v: i for i, v in enumerate(keep)}
        sub_adj = [[remap[u] for u in adj[v] if dist[u] <= s] for v in keep]
        sub_dist = [dist[v] for v in keep]
        segments.append(_ball_segment(sub_adj, sub_dist))
    return f"r{r}:".encode() + b"|".join(segments)


def extract_ball(g: Graph, v: int, r: int, ball_cap: int = BALL_CAP) -> RootedBall:
    """Canonical code of the radius-r ball around v (induced subgraph)."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range")
    if r < 0:
        raise ValueError("radius must be >= 0")
    adj, dist = _bfs_ball(g.adjacency_lists(), v, r, ball_cap)
    return RootedBall(_code_from_shells(adj, dist, r), r)


def _tree_ball_code(tree: RootedTree, r: int) -> bytes:
    """Fast path for sampled trees: same bytes as extract_ball on the graph."""
    adj = [[] for _ in range(tree.n)]
    for i, p in enumerate(tree.parents):
        if p >= 0:
            adj[p].append(i)
            adj[i].append(p)
    return _code_from_shells(adj, list(tree.depths), r)


# ---------------------------------------------------------------------------
# distributions and statistics
# ---------------------------------------------------------------------------


def ball_distribution(g: Graph, r: int, ball_cap: int = BALL_CAP) -> BallDistribution:
    """Exact distribution of ball codes over all n roots of g."""
    adj_full = g.adjacency_lists()
    counter = Counter()
    for v in range(g.n):
        adj, dist = _bfs_ball(adj_full, v, r, ball_cap)
        counter[_code_from_shells(adj, dist, r)] += 1
    return BallDistribution.from_counter(r, counter, g.n)


def pooled_ball_distribution(graphs, r: int, ball_cap: int = BALL_CAP) -> BallDistribution:
    """Ball distribution pooled over the roots of several graphs."""
    counter = Counter()
    total = 0
    for g in graphs:
        d = ball_distribution(g, r, ball_cap)
        counter.update(dict(d.counts))
        total += d.sample_count
    return BallDistribution.from_counter(r, counter, total)


def gwt_ball_distribution(
    fstar: DegreeDistribution,
    r: int,
    samples: int,
    seed: int,
    ball_cap: int = BALL_CAP,
) -> BallDistribution:
    """Monte Carlo over branching-tree draws truncated at depth r."""
    rng = stream(seed, "gwt-balls", r)
    counter = Counter()
    for i in range(samples):
        tree = sample_gwt(fstar, depth=r, max_nodes=ball_cap + 1, seed=0, rng=rng)
        if tree.truncated or tree.n > ball_cap:
            raise BallCapError(
                f"sampled tree {i} exceeds the ball cap {ball_cap} at depth {r}"
            )
        counter[_tree_ball_code(tree, r)] += 1
    return BallDistribution.from_counter(r, counter, samples)


def tv_distance(a: BallDistribution, b: BallDistribution) -> float:
    """Total variation distance between two code distributions (exact
    rational arithmetic over the counts, rounded once at the end)."""
    if a.r != b.r:
        raise ValueError(f"radius mismatch: {a.r} vs {b.r}")
    fa = {code: Fraction(cnt, a.sample_count) for code, cnt in a.counts}
    fb = {code: Fraction(cnt, b.sample_count) for code, cnt in b.counts}
    total = Fraction(0)
    for code in set(fa) | set(fb):
        total += abs(fa.get(code, Fraction(0)) - fb.get(code, Fraction(0)))
    return float(total / 2)


def pair_independence_stat(
    g: Graph, r: int, samples: int, seed: int, ball_cap: int = BALL_CAP
) -> float:
    """TV distance between the joint code distribution of sampled ordered
    root pairs and the product of its marginals.

    Roots are sampled with replacement.  The sum over unobserved cells of
    the product measure is folded in analytically, so the cost is linear in
    the number of observed cells.
    """
    rng = stream(seed, "pairs", r)
    o1 = rng.integers(0, g.n, size=samples)
    o2 = rng.integers(0, g.n, size=samples)
    adj_full = g.adjacency_lists()
    codes: dict[int, bytes] = {}
    for v in set(o1.tolist()) | set(o2.tolist()):
        adj, dist = _bfs_ball(adj_full, v, r, ball_cap)
        codes[v] = _code_from_shells(adj, dist, r)
    joint = Counter((codes[int(a)], codes[int(b)]) for a, b in zip(o1, o2))
    left = Counter()
    right = Counter()
    for (ca, cb), cnt in joint.items():
        left[ca] += cnt
        right[cb] += cnt
    m = samples
    observed_product = 0.0
    deviation = 0.0
    for (ca, cb), cnt in joint.items():
        q = (left[ca] / m) * (right[cb] / m)
        deviation += abs(cnt / m - q)
        observed_product += q
    return 0.5 * (deviation + (1.0 - observed_product))


def uniform_integrability_profile(g: Graph) -> list:
    """Tail functional mean((deg+1) * 1{deg > ell}) on a doubling ell grid."""
    deg = g.degrees()
    max_deg = int(deg.max()) if g.n else 0
    ells = [0]
    while ells[-1] < max_deg:
        ells.append(max(1, ells[-1] * 2))
    out = []
    for ell in ells:
        mask = deg > ell
        tail = float(((deg + 1) * mask).mean()) if g.n else 0.0
        out.append((ell, tail))
    return out
