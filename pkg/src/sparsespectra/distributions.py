"""Finite-support degree distributions and edge-weight specifications."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Infinite-support laws are truncated at this quantile and renormalized.
#: Shared by the graph samplers and the RDE solver so both see the same law.
TRUNCATION_QUANTILE = 1.0 - 1e-12

_PMF_ATOL = 1e-12


@dataclass(frozen=True)
class DegreeDistribution:
    """Probability mass function on nonnegative integers with finite support.

    Parameters
    ----------
    ks : tuple of int
        Support points, strictly increasing, all >= 0.
    ps : tuple of float
        Probabilities, all > 0, summing to 1 within 1e-12.
    """

    ks: tuple
    ps: tuple
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ks = np.asarray(self.ks, dtype=np.int64)
        ps = np.asarray(self.ps, dtype=np.float64)
        if ks.ndim != 1 or ps.shape != ks.shape or ks.size == 0:
            raise ValueError("pmf must be a nonempty list of (k, p) pairs")
        if np.any(ks < 0):
            raise ValueError("degrees must be nonnegative")
        if np.any(np.diff(ks) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(ps <= 0):
            raise ValueError("probabilities must be positive")
        if abs(ps.sum() - 1.0) > _PMF_ATOL:
            raise ValueError(f"pmf sums to {ps.sum()!r}, not 1")
        object.__setattr__(self, "ks", tuple(int(k) for k in ks))
        object.__setattr__(self, "ps", tuple(float(p) for p in ps))
        object.__setattr__(self, "_cdf", np.cumsum(ps))

    @classmethod
    def from_pairs(cls, pairs) -> "DegreeDistribution":
        pairs = sorted((int(k), float(p)) for k, p in pairs if p != 0.0)
        ks = tuple(k for k, _ in pairs)
        ps = np.array([p for _, p in pairs])
        return cls(ks, tuple(ps / ps.sum()))

    @classmethod
    def delta(cls, k: int) -> "DegreeDistribution":
        return cls((int(k),), (1.0,))

    @classmethod
    def poisson(cls, lam: float) -> "DegreeDistribution":
        """Poisson(lam) truncated at the TRUNCATION_QUANTILE quantile."""
        if lam < 0:
            raise ValueError("Poisson intensity must be >= 0")
        if lam == 0:
            return cls.delta(0)
        ks, ps = [], []
        p = math.exp(-lam)
        acc = 0.0
        k = 0
        while acc < TRUNCATION_QUANTILE:
            if p > 0:
                ks.append(k)
                ps.append(p)
            acc += p
            p *= lam / (k + 1)
            k += 1
            if k > 400:  # safety for absurd intensities
                break
        ps = np.array(ps)
        return cls(tuple(ks), tuple(ps / ps.sum()))

    @classmethod
    def uniform(cls, ks) -> "DegreeDistribution":
        ks = sorted(set(int(k) for k in ks))
        return cls(tuple(ks), tuple([1.0 / len(ks)] * len(ks)))

    def mean(self) -> float:
        return float(np.dot(self.ks, self.ps))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw iid values by inverse CDF on uniforms (vectorized)."""
        u = rng.random(size)
        pos = np.searchsorted(self._cdf, u, side="right")
        pos = np.minimum(pos, len(self.ks) - 1)
        return np.asarray(self.ks, dtype=np.int64)[pos]

    def tv_distance(self, other: "DegreeDistribution") -> float:
        ks = sorted(set(self.ks) | set(other.ks))
        a = dict(zip(self.ks, self.ps))
        b = dict(zip(other.ks, other.ps))
        return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in ks)


def size_biased_offspring(fstar: DegreeDistribution) -> DegreeDistribution:
    """Offspring law seen along an edge: shift the size-biased degree law.

    F(k-1) is proportional to k * fstar(k); a degree-k endpoint reached by
    an edge has k-1 further neighbours.
    """
    mean = fstar.mean()
    if mean <= 0:
        raise ValueError("size biasing requires a degree distribution with positive mean")
    ks = np.asarray(fstar.ks)
    ps = np.asarray(fstar.ps)
    keep = ks >= 1
    return DegreeDistribution.from_pairs(zip(ks[keep] - 1, ks[keep] * ps[keep] / mean))


@dataclass(frozen=True)
class WeightSpec:
    """Edge-weight law: one of constant(c), gaussian(mu, sigma), uniform(a, b),
    rademacher."""

    kind: str
    params: tuple = ()

    _KINDS = ("constant", "gaussian", "uniform", "rademacher")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown weight law {self.kind!r}; expected one of {self._KINDS}")
        want = {"constant": 1, "gaussian": 2, "uniform": 2, "rademacher": 0}[self.kind]
        if len(self.params) != want:
            raise ValueError(f"{self.kind} takes {want} parameter(s), got {len(self.params)}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    @classmethod
    def constant(cls, c: float) -> "WeightSpec":
        return cls("constant", (c,))

    @classmethod
    def gaussian(cls, mu: float, sigma: float) -> "WeightSpec":
        return cls("gaussian", (mu, sigma))

    @classmethod
    def uniform(cls, a: float, b: float) -> "WeightSpec":
        return cls("uniform", (a, b))

    @classmethod
    def rademacher(cls) -> "WeightSpec":
        return cls("rademacher")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "constant":
            return np.full(size, self.params[0])
        if self.kind == "gaussian":
            mu, sigma = self.params
            return mu + sigma * rng.standard_normal(size)
        if self.kind == "uniform":
            a, b = self.params
            return a + (b - a) * rng.random(size)
        return rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0

    def second_moment(self) -> float:
        if self.kind == "constant":
            return self.params[0] ** 2
        if self.kind == "gaussian":
            mu, sigma = self.params
            return mu**2 + sigma**2
        if self.kind == "uniform":
            a, b = self.params
            return (a * a + a * b + b * b) / 3.0
        return 1.0
