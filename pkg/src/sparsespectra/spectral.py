"""Empirical spectral measures of adjacency / negative-Laplacian matrices.

The matrix analyzed everywhere is A - alpha*D with alpha in {0, 1}: plain
adjacency for alpha = 0, minus the Laplacian for alpha = 1.  Weighted graphs
replace A by the entrywise weighted adjacency and D by the weighted degree
diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph, WeightedGraph

#: Largest dimension accepted for dense eigendecomposition.
DENSE_CAP = 6000

_MERGE_TOL = 1e-9
_LEVY_BISECTION_TOL = 1e-12


class CapacityError(ValueError):
    """Raised when a graph exceeds the dense-solver capacity."""


@dataclass(frozen=True)
class DeltaMatrix:
    """Dense symmetric A - alpha*D matrix for a (weighted) graph."""

    n: int
    alpha: int
    entries: np.ndarray

    def __post_init__(self):
        if self.alpha not in (0, 1):
            raise ValueError("alpha must be 0 or 1")
        if self.entries.shape != (self.n, self.n):
            raise ValueError("entry matrix shape mismatch")


@dataclass(frozen=True)
class SpectralMeasure:
    """Discrete probability measure on the reals, atoms sorted ascending."""

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        locs = np.asarray(self.locations, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if locs.ndim != 1 or locs.shape != w.shape or locs.size == 0:
            raise ValueError("need matching nonempty location/weight arrays")
        if np.any(np.diff(locs) <= 0):
            raise ValueError("locations must be strictly increasing")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_samples(cls, values, weights=None) -> "SpectralMeasure":
        """Build a measure from raw values, merging near-equal atoms."""
        values = np.asarray(values, dtype=np.float64)
        if weights is None:
            weights = np.full(values.shape, 1.0 / values.size)
        else:
            weights = np.asarray(weights, dtype=np.float64)
        order = np.argsort(values, kind="stable")
        values, weights = values[order], weights[order]
        tol = _MERGE_TOL * np.maximum(1.0, np.abs(values[:-1]))
        cuts = np.nonzero(np.diff(values) > tol)[0] + 1
        groups = np.split(np.arange(values.size), cuts)
        locs = np.array([np.dot(values[g], weights[g]) / weights[g].sum() for g in groups])
        w = np.array([weights[g].sum() for g in groups])
        return cls(locs, w / w.sum())

    @classmethod
    def point_mass(cls, x: float) -> "SpectralMeasure":
        return cls(np.array([float(x)]), np.array([1.0]))

    def mean(self) -> float:
        return float(np.dot(self.locations, self.weights))

    def cdf(self, x, side: str = "right") -> np.ndarray:
        """P(X <= x) for side='right'; the left limit P(X < x) for side='left'."""
        cum = np.concatenate(([0.0], np.cumsum(self.weights)))
        return cum[np.searchsorted(self.locations, np.asarray(x), side=side)]

    def to_csv(self) -> str:
        lines = ["location,weight"]
        lines.extend(
            f"{x:.17g},{w:.17g}" for x, w in zip(self.locations, self.weights)
        )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "SpectralMeasure":
        rows = text.strip().split("\n")
        if rows[0] != "location,weight":
            raise ValueError("bad spectral measure CSV header")
        locs, w = [], []
        for row in rows[1:]:
            a, b = row.split(",")
            locs.append(float(a))
            w.append(float(b))
        return cls(np.array(locs), np.array(w))


def average_measures(measures) -> SpectralMeasure:
    """Equal-weight mixture of measures (seed averaging)."""
    measures = list(measures)
    locs = np.concatenate([m.locations for m in measures])
    w = np.concatenate([m.weights / len(measures) for m in measures])
    return SpectralMeasure.from_samples(locs, w)


# ---------------------------------------------------------------------------
# matrices and eigenvalues
# ---------------------------------------------------------------------------


def delta_matrix(g, alpha: int, dense_cap: int = DENSE_CAP) -> DeltaMatrix:
    """Dense A - alpha*D of a Graph or WeightedGraph."""
    if isinstance(g, WeightedGraph):
        base, weights = g.graph, np.asarray(g.weights)
    elif isinstance(g, Graph):
        base, weights = g, None
    else:
        raise TypeError(f"expected Graph or WeightedGraph, got {type(g)!r}")
    if base.n > dense_cap:
        raise CapacityError(
            f"graph has {base.n} vertices, above the dense eigensolver cap {dense_cap}"
        )
    if alpha not in (0, 1):
        raise ValueError("alpha must be 0 or 1")
    m = np.zeros((base.n, base.n), dtype=np.float64)
    ea = base.edge_array()
    if ea.size:
        vals = weights if weights is not None else np.ones(ea.shape[0])
        m[ea[:, 0], ea[:, 1]] = vals
        m[ea[:, 1], ea[:, 0]] = vals
    if alpha == 1:
        np.fill_diagonal(m, -m.sum(axis=1))
    return DeltaMatrix(base.n, alpha, m)


def esd(m: DeltaMatrix, validate: bool = False) -> SpectralMeasure:
    """Empirical spectral measure: all n eigenvalues with weight 1/n each."""
    if m.n == 0:
        raise ValueError("empty matrix has no spectral measure")
    if validate:
        vals, vecs = np.linalg.eigh(m.entries)
        scale = max(np.abs(vals).max(), 1e-300)
        for j in (0, m.n // 2, m.n - 1):
            r = m.entries @ vecs[:, j] - vals[j] * vecs[:, j]
            if np.linalg.norm(r) > 1e-8 * scale:
                raise RuntimeError(f"eigensolver residual too large at index {j}")
    else:
        vals = np.linalg.eigvalsh(m.entries)
    if not np.all(np.isfinite(vals)):
        raise RuntimeError("eigensolver returned non-finite eigenvalues")
    return SpectralMeasure.from_samples(vals)


def stieltjes_empirical(mu: SpectralMeasure, z: complex) -> complex:
    """Stieltjes transform sum w_i / (x_i - z) for Im z > 0."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    return complex(np.sum(mu.weights / (mu.locations - z)))


def resolvent_diag(m: DeltaMatrix, z: complex) -> np.ndarray:
    """Diagonal of (Delta - z)^-1 via a complex dense solve."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    a = m.entries.astype(np.complex128)
    a[np.diag_indices(m.n)] -= z
    diag = np.diagonal(np.linalg.inv(a)).copy()
    if not np.all(np.isfinite(diag)):
        raise RuntimeError("resolvent solve failed")
    return diag


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def _levy_feasible(mu: SpectralMeasure, nu: SpectralMeasure, h: float) -> bool:
    fa = mu.cdf(mu.locations, side="right")
    fl = mu.cdf(mu.locations, side="left")
    if np.any(nu.cdf(mu.locations + h, side="right") < fa - h):
        return False
    if np.any(nu.cdf(mu.locations - h, side="left") > fl + h):
        return False
    return True


def levy_distance(mu: SpectralMeasure, nu: SpectralMeasure) -> float:
    """Levy metric inf{h : F(x-h)-h <= G(x) <= F(x+h)+h for all x}.

    Feasibility of a candidate h is exact for step CDFs (checked at the
    breakpoints); the infimum is then located by bisection on [0, 1].
    """
    if _levy_feasible(mu, nu, 0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > _LEVY_BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if _levy_feasible(mu, nu, mid):
            hi = mid
        else:
            lo = mid
    return hi


def kolmogorov_distance(mu: SpectralMeasure, nu: SpectralMeasure) -> float:
    """Sup-norm distance between the two CDFs."""
    xs = np.union1d(mu.locations, nu.locations)
    right = np.abs(mu.cdf(xs, "right") - nu.cdf(xs, "right")).max()
    left = np.abs(mu.cdf(xs, "left") - nu.cdf(xs, "left")).max()
    return float(max(right, left))


# ---------------------------------------------------------------------------
# degree truncation and identity checks
# ---------------------------------------------------------------------------


def truncate_high_degree(g: Graph, ell: int) -> Graph:
    """Drop every edge touching a vertex of degree > ell (degrees in g)."""
    if ell < 0:
        raise ValueError("ell must be >= 0")
    deg = g.degrees()
    kept = tuple(e for e in g.edges if deg[e[0]] <= ell and deg[e[1]] <= ell)
    return Graph(g.n, kept)


def rank_bound_check(g: Graph, ell: int, alpha: int) -> tuple:
    """Levy distance between the spectra of Delta and its truncation, and the
    rank bound rank(difference)/n that must dominate it."""
    full = delta_matrix(g, alpha)
    trunc = delta_matrix(truncate_high_degree(g, ell), alpha)
    levy = levy_distance(esd(full), esd(trunc))
    diff = full.entries - trunc.entries
    svals = np.linalg.svd(diff, compute_uv=False)
    rank = int(np.count_nonzero(svals > _MERGE_TOL * g.n))
    return levy, rank / g.n


def schur_check(m: DeltaMatrix, z: complex) -> float:
    """Max over i of the defect in the one-row Schur complement identity
    R(z)_ii = (Delta_ii - z - b_i^T (Delta_(i) - z)^-1 b_i)^-1."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    if m.n == 1:
        return 0.0
    diag = resolvent_diag(m, z)
    worst = 0.0
    for i in range(m.n):
        keep = np.arange(m.n) != i
        sub = m.entries[np.ix_(keep, keep)].astype(np.complex128)
        sub[np.diag_indices(m.n - 1)] -= z
        beta = m.entries[keep, i].astype(np.complex128)
        denom = m.entries[i, i] - z - beta @ np.linalg.solve(sub, beta)
        worst = max(worst, abs(diag[i] - 1.0 / denom))
    return worst


# ---------------------------------------------------------------------------
# histogram export
# ---------------------------------------------------------------------------


def histogram(mu: SpectralMeasure, lo: float, hi: float, bins: int) -> tuple:
    """Binned masses on [lo, hi); returns (bin_left, bin_right, mass)."""
    edges = np.linspace(lo, hi, bins + 1)
    mass, _ = np.histogram(mu.locations, bins=edges, weights=mu.weights)
    return edges[:-1], edges[1:], mass


def histogram_csv(bin_left, bin_right, mass) -> str:
    lines = ["bin_left,bin_right,mass"]
    lines.extend(
        f"{a:.17g},{b:.17g},{m:.17g}" for a, b, m in zip(bin_left, bin_right, mass)
    )
    return "\n".join(lines) + "\n"
