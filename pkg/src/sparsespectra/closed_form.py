"""Exact limiting laws used as oracles for the Monte Carlo routes.

Implements the random-regular (McKay) density and transform, the semicircle
law, pointwise Stieltjes-to-density inversion at fixed imaginary offset, and
the discretization of a density curve into a comparable atomic measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralMeasure


@dataclass(frozen=True)
class DensityCurve:
    """Sampled density on an increasing grid.

    eta_used records the imaginary offset the curve was produced at
    (0 for exact formulas).  Finite grids leak a little mass; mass() reports
    the trapezoid integral, which should stay within [0.9, 1.05].
    """

    xs: np.ndarray
    density: np.ndarray
    eta_used: float

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64)
        d = np.asarray(self.density, dtype=np.float64)
        if xs.ndim != 1 or xs.shape != d.shape or xs.size < 2:
            raise ValueError("need matching grids with at least two points")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(d < 0):
            raise ValueError("density must be nonnegative")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "density", d)

    def mass(self) -> float:
        return float(np.trapezoid(self.density, self.xs))

    def validate_mass(self, lo: float = 0.9, hi: float = 1.05) -> float:
        m = self.mass()
        if not lo <= m <= hi:
            raise ValueError(f"density integrates to {m:.6f}, outside [{lo}, {hi}]")
        return m

    def to_csv(self) -> str:
        lines = ["x,density,eta_used"]
        lines.extend(
            f"{x:.17g},{d:.17g},{self.eta_used:.17g}"
            for x, d in zip(self.xs, self.density)
        )
        return "\n".join(lines) + "\n"


def _upper_half_root(a: complex, b: complex, c: complex) -> complex:
    """Root of a*y^2 + b*y + c = 0 lying in the upper half plane."""
    disc = np.sqrt(complex(b * b - 4 * a * c))
    for s in (disc, -disc):
        y = (-b + s) / (2 * a)
        if y.imag > 0:
            return y
    raise ArithmeticError("no root in the upper half plane")


def semicircle_stieltjes(sigma: float, z: complex) -> complex:
    """Stieltjes transform of the semicircle law of radius 2*sigma: the
    upper-half-plane root of sigma^2 m^2 + z m + 1 = 0."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    return _upper_half_root(sigma * sigma, z, 1.0)


def semicircle_density(sigma: float, x: float):
    """Density sqrt(4 sigma^2 - x^2) / (2 pi sigma^2) on |x| <= 2 sigma."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=np.float64)
    inside = np.clip(4 * sigma * sigma - x * x, 0.0, None)
    out = np.sqrt(inside) / (2 * np.pi * sigma * sigma)
    return out if out.ndim else float(out)


def kesten_mckay_density(k: int, x):
    """Limiting adjacency density of random k-regular graphs,
    (k / 2 pi) * sqrt(4 (k - 1) - x^2) / (k^2 - x^2) on |x| <= 2 sqrt(k-1)."""
    if k < 2:
        raise ValueError("need k >= 2 (k = 1 degenerates to isolated edges)")
    x = np.asarray(x, dtype=np.float64)
    inside = 4.0 * (k - 1) - x * x
    with np.errstate(invalid="ignore", divide="ignore"):
        val = (k / (2 * np.pi)) * np.sqrt(np.clip(inside, 0.0, None)) / (k * k - x * x)
    out = np.where(inside > 0.0, val, 0.0)
    return out if out.ndim else float(out)


def kesten_mckay_stieltjes(k: int, z: complex) -> complex:
    """Transform of the k-regular limit: -2(k-1) / ((k-2) z + k sqrt(z^2 - 4(k-1))),
    square-root branch chosen so the value lands in the upper half plane."""
    if k < 2:
        raise ValueError("need k >= 2")
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    s = np.sqrt(complex(z * z - 4.0 * (k - 1)))
    for cand in (s, -s):
        val = -2.0 * (k - 1) / ((k - 2) * z + k * cand)
        if val.imag > 0:
            return val
    raise ArithmeticError("no Herglotz branch found")


def invert_stieltjes(curve) -> DensityCurve:
    """Pointwise density Im m(x + i eta) / pi at the curve's own eta.

    No extrapolation in eta is attempted; the smoothing bias stays in the
    output and is recorded via eta_used.
    """
    vals = np.asarray(curve.values)
    dens = np.clip(vals.imag, 0.0, None) / np.pi
    return DensityCurve(np.asarray(curve.xs, dtype=np.float64), dens, float(curve.eta))


def exact_density_curve(density_fn, xs) -> DensityCurve:
    """Sample an exact density formula on a grid (eta_used = 0)."""
    xs = np.asarray(xs, dtype=np.float64)
    return DensityCurve(xs, np.asarray(density_fn(xs), dtype=np.float64), 0.0)


def measure_from_density(curve: DensityCurve) -> SpectralMeasure:
    """Discretize a density curve: one atom per grid cell at its midpoint,
    weighted by the trapezoid mass of the cell, renormalized to 1."""
    xs, d = curve.xs, curve.density
    mids = 0.5 * (xs[:-1] + xs[1:])
    masses = 0.5 * (d[:-1] + d[1:]) * np.diff(xs)
    keep = masses > 0
    if not np.any(keep):
        raise ValueError("density is identically zero on the grid")
    return SpectralMeasure.from_samples(mids[keep], masses[keep] / masses[keep].sum())
