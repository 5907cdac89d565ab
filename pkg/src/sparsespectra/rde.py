"""Monte Carlo population dynamics for the recursive distributional equations.

A law on the Herglotz class, evaluated at a fixed z in the upper half plane,
is represented by a population of M complex values.  One sweep rebuilds the
whole population synchronously: each new member draws a child count N from
the offspring law and N values uniformly with replacement from the previous
buffer, then applies

    y_new = -1 / (z + alpha*(N+1) + sum of drawn values).

The update maps the half-plane disk {Im y > 0, |y| <= 1/Im z} into itself, so
population validity is preserved by construction and asserted after every
sweep.  Variants cover edge weights (|w|^2 factors, alpha = 0 only), coupled
two-type populations for bipartite limits, and the two-stage skeleton-tree
system for uniform random trees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from ._kernels import segment_sums, weighted_segment_sums
from ._rng import stream
from .distributions import DegreeDistribution, WeightSpec, size_biased_offspring

__all__ = [
    "RdeParams",
    "Population",
    "StieltjesCurve",
    "convergence_diagnostic",
    "rde_fixed_point",
    "root_expectation",
    "rde_weighted",
    "root_expectation_weighted",
    "rde_bipartite",
    "root_expectation_bipartite",
    "rde_skeleton",
    "skeleton_pools",
    "skeleton_consistency",
    "stieltjes_curve",
    "stieltjes_curve_weighted",
    "stieltjes_curve_bipartite",
    "stieltjes_curve_skeleton",
    "bessel_equation_residual",
]


@dataclass(frozen=True)
class RdeParams:
    """Solver knobs: population size M, sweep cap T, seed, damping in [0, 1),
    and the diagnostic threshold that declares convergence."""

    population_size: int = 100_000
    sweeps: int = 200
    seed: int = 0
    damping: float = 0.0
    convergence_tol: float = 1e-3

    def __post_init__(self):
        if self.population_size < 1000:
            raise ValueError("population_size must be >= 1000")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must lie in [0, 1)")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")


@dataclass
class Population:
    """Empirical law at a fixed z: M values in the half-plane disk."""

    z: complex
    values: np.ndarray
    converged: bool = True
    sweeps_run: int = 0
    diagnostic_trace: tuple = ()

    def validate(self) -> None:
        v = self.values
        if np.any(v.imag <= 0):
            raise RuntimeError("population left the upper half plane")
        bound = 1.0 / self.z.imag
        if np.any(np.abs(v) > bound * (1 + 1e-12)):
            raise RuntimeError("population violated the 1/Im z modulus bound")

    def mean(self) -> complex:
        return complex(self.values.mean())

    def std(self) -> float:
        return float(np.sqrt(self.values.real.var() + self.values.imag.var()))


@dataclass
class StieltjesCurve:
    """Transform values on a real grid, all evaluated at height eta."""

    eta: float
    xs: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    converged: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        vals = np.asarray(self.values)
        if np.any(vals.imag <= 0) or np.any(np.abs(vals) > 1.0 / self.eta * (1 + 1e-12)):
            raise ValueError("curve values must be Herglotz at height eta")

    def to_csv(self) -> str:
        lines = ["x,eta,re_m,im_m,stderr,converged"]
        lines.extend(
            f"{x:.17g},{self.eta:.17g},{v.real:.17g},{v.imag:.17g},{s:.17g},{int(c)}"
            for x, v, s, c in zip(self.xs, self.values, self.stderr, self.converged)
        )
        return "\n".join(lines) + "\n"


def _check_z(z: complex) -> complex:
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    return z


def _diag_arrays(a: np.ndarray, b: np.ndarray) -> float:
    """Sorted-marginal 1-Wasserstein surrogate: real part plus imaginary part."""
    real = np.mean(np.abs(np.sort(a.real) - np.sort(b.real)))
    imag = np.mean(np.abs(np.sort(a.imag) - np.sort(b.imag)))
    return float(real + imag)


def convergence_diagnostic(prev: Population, curr: Population) -> float:
    """Distance between two populations at the same z: the 1-Wasserstein
    distance of each coordinate marginal (computable in O(M log M)), summed.
    A lower bound on the 2D coupling cost, zero exactly at marginal equality.
    """
    if prev.z != curr.z:
        raise ValueError("populations evaluated at different z are not comparable")
    if prev.values.shape != curr.values.shape:
        raise ValueError("populations must have equal size")
    return _diag_arrays(prev.values, curr.values)


# ---------------------------------------------------------------------------
# sweep engine
# ---------------------------------------------------------------------------


def _draw_segments(law: DegreeDistribution, pool_size: int, m: int, rng):
    ns = law.sample(rng, m)
    idx = rng.integers(0, pool_size, size=int(ns.sum()))
    return ns, idx


def _finish(new: np.ndarray, old: np.ndarray, damping: float) -> np.ndarray:
    if damping:
        return (1.0 - damping) * new + damping * old
    return new


def _iterate(step, init: np.ndarray, z: complex, params: RdeParams):
    """Run sweeps until the diagnostic drops below tol or the cap is hit."""
    values = init
    trace = []
    converged = False
    sweeps_run = 0
    for _ in range(params.sweeps):
        new = _finish(step(values), values, params.damping)
        sweeps_run += 1
        diag = _diag_arrays(values, new)
        trace.append(diag)
        values = new
        pop = Population(z, values)
        pop.validate()
        if diag < params.convergence_tol:
            converged = True
            break
    return Population(z, values, converged, sweeps_run, tuple(trace))


def rde_fixed_point(
    f: DegreeDistribution,
    alpha: int,
    z: complex,
    params: RdeParams,
    init: np.ndarray | None = None,
    rng=None,
) -> Population:
    """Solve Y = -(z + alpha*(N+1) + sum_{i<=N} Y_i)^-1 in distribution,
    N drawn from the offspring law f.

    The population starts at the N=0 solution -1/z (or a warm-start buffer)
    and is rebuilt synchronously each sweep.  A result that never brought the
    diagnostic under tol carries converged=False.
    """
    z = _check_z(z)
    if alpha not in (0, 1):
        raise ValueError("alpha must be 0 or 1")
    m = params.population_size
    if rng is None:
        rng = stream(params.seed, "rde-plain")
    if init is None:
        init = np.full(m, -1.0 / z, dtype=np.complex128)

    def step(values):
        ns, idx = _draw_segments(f, m, m, rng)
        sums = segment_sums(values, idx, ns)
        return -1.0 / (z + alpha * (ns + 1) + sums)

    return _iterate(step, init, z, params)


def root_expectation(
    fstar: DegreeDistribution,
    pop: Population,
    alpha: int,
    samples: int,
    seed: int,
) -> tuple:
    """Monte Carlo mean of the root value -(z + alpha*N + sum_{i<=N} Y_i)^-1,
    N from the degree law fstar, Y_i resampled from the solved population.

    Returns (mean, stderr) with stderr = sqrt((var Re + var Im) / samples),
    which dominates the per-component standard errors.
    """
    if alpha not in (0, 1):
        raise ValueError("alpha must be 0 or 1")
    rng = stream(seed, "root-plain")
    z = pop.z
    ns, idx = _draw_segments(fstar, pop.values.shape[0], samples, rng)
    sums = segment_sums(pop.values, idx, ns)
    draws = -1.0 / (z + alpha * ns + sums)
    return _mean_stderr(draws)


def _mean_stderr(draws: np.ndarray) -> tuple:
    mean = complex(draws.mean())
    var = draws.real.var() + draws.imag.var()
    return mean, float(np.sqrt(var / draws.shape[0]))


# --- weighted ---------------------------------------------------------------


def rde_weighted(
    f: DegreeDistribution,
    wdist: WeightSpec,
    z: complex,
    params: RdeParams,
    alpha: int = 0,
    init: np.ndarray | None = None,
    rng=None,
) -> Population:
    """Weighted-adjacency variant: Y = -(z + sum |w_i|^2 Y_i)^-1.

    Only alpha = 0 is supported; the weighted-degree diagonal couples the
    matrix entries and breaks the recursive structure, so there is no RDE to
    solve for alpha = 1.
    """
    z = _check_z(z)
    if alpha != 0:
        raise NotImplementedError(
            "weighted Laplacian (alpha=1) has no recursive fixed-point form; "
            "the weighted-degree diagonal introduces dependence"
        )
    m = params.population_size
    if rng is None:
        rng = stream(params.seed, "rde-weighted")
    if init is None:
        init = np.full(m, -1.0 / z, dtype=np.complex128)

    def step(values):
        ns, idx = _draw_segments(f, m, m, rng)
        w = wdist.sample(rng, idx.shape[0])
        sums = weighted_segment_sums(values, idx, w * w, ns)
        return -1.0 / (z + sums)

    return _iterate(step, init, z, params)


def root_expectation_weighted(
    fstar: DegreeDistribution,
    wdist: WeightSpec,
    pop: Population,
    samples: int,
    seed: int,
) -> tuple:
    """Root mean for the weighted variant: -(z + sum |w_i|^2 Y_i)^-1."""
    rng = stream(seed, "root-weighted")
    z = pop.z
    ns, idx = _draw_segments(fstar, pop.values.shape[0], samples, rng)
    w = wdist.sample(rng, idx.shape[0])
    sums = weighted_segment_sums(pop.values, idx, w * w, ns)
    draws = -1.0 / (z + sums)
    return _mean_stderr(draws)


# --- bipartite --------------------------------------------------------------


def rde_bipartite(
    f: DegreeDistribution,
    g: DegreeDistribution,
    alpha: int,
    z: complex,
    params: RdeParams,
    init: tuple | None = None,
    rng=None,
) -> tuple:
    """Coupled two-type system: side-a values rebuilt from the side-b pool
    with counts from f, and vice versa with counts from g, synchronously.

    Returns (population_a, population_b) sharing one diagnostic trace (the
    sum of both sides' marginal distances).
    """
    z = _check_z(z)
    if alpha not in (0, 1):
        raise ValueError("alpha must be 0 or 1")
    m = params.population_size
    if rng is None:
        rng = stream(params.seed, "rde-bipartite")
    if init is None:
        va = np.full(m, -1.0 / z, dtype=np.complex128)
        vb = va.copy()
    else:
        va, vb = init
    trace = []
    converged = False
    sweeps_run = 0
    for _ in range(params.sweeps):
        ns_a, idx_a = _draw_segments(f, m, m, rng)
        ns_b, idx_b = _draw_segments(g, m, m, rng)
        new_a = -1.0 / (z + alpha * (ns_a + 1) + segment_sums(vb, idx_a, ns_a))
        new_b = -1.0 / (z + alpha * (ns_b + 1) + segment_sums(va, idx_b, ns_b))
        new_a = _finish(new_a, va, params.damping)
        new_b = _finish(new_b, vb, params.damping)
        sweeps_run += 1
        diag = _diag_arrays(va, new_a) + _diag_arrays(vb, new_b)
        trace.append(diag)
        va, vb = new_a, new_b
        Population(z, va).validate()
        Population(z, vb).validate()
        if diag < params.convergence_tol:
            converged = True
            break
    pop_a = Population(z, va, converged, sweeps_run, tuple(trace))
    pop_b = Population(z, vb, converged, sweeps_run, tuple(trace))
    return pop_a, pop_b


def root_expectation_bipartite(
    fstar: DegreeDistribution,
    gstar: DegreeDistribution,
    p: float,
    pops: tuple,
    alpha: int,
    samples: int,
    seed: int,
) -> tuple:
    """Mixture root mean p*E[X_a] + (1-p)*E[X_b]; side-a roots draw their
    children from the side-b pool and vice versa."""
    if not 0.0 < p < 1.0:
        raise ValueError("side fraction p must lie in (0, 1)")
    if alpha not in (0, 1):
        raise ValueError("alpha must be 0 or 1")
    pop_a, pop_b = pops
    if pop_a.z != pop_b.z:
        raise ValueError("populations evaluated at different z")
    rng = stream(seed, "root-bipartite")
    z = pop_a.z
    ns_a, idx_a = _draw_segments(fstar, pop_b.values.shape[0], samples, rng)
    draws_a = -1.0 / (z + alpha * ns_a + segment_sums(pop_b.values, idx_a, ns_a))
    ns_b, idx_b = _draw_segments(gstar, pop_a.values.shape[0], samples, rng)
    draws_b = -1.0 / (z + alpha * ns_b + segment_sums(pop_a.values, idx_b, ns_b))
    mean_a, se_a = _mean_stderr(draws_a)
    mean_b, se_b = _mean_stderr(draws_b)
    mean = p * mean_a + (1 - p) * mean_b
    stderr = math.sqrt((p * se_a) ** 2 + ((1 - p) * se_b) ** 2)
    return mean, stderr


# --- skeleton tree ----------------------------------------------------------

_POI1 = DegreeDistribution.poisson(1.0)


def skeleton_pools(
    z: complex,
    params: RdeParams,
    init: tuple | None = None,
    rng=None,
) -> tuple:
    """Two-stage solve for the uniform-random-tree limit.

    Stage 1 solves the plain RDE with Poisson(1) offspring; its fixed pool W
    is the root resolvent law of a Poisson(1) branching tree.  Stage 2
    iterates X = -(z + X_1 + sum_{i<=N} W_i)^-1 with N ~ Poisson(1), X_1 from
    the X pool and W_i from the fixed W pool.  Returns (w_pop, x_pop).
    """
    z = _check_z(z)
    m = params.population_size
    if rng is None:
        rng = stream(params.seed, "rde-skeleton")
    w_init = x_init = None
    if init is not None:
        w_init, x_init = init
    w_pop = rde_fixed_point(_POI1, 0, z, params, init=w_init, rng=rng)
    if x_init is None:
        x_init = np.full(m, -1.0 / z, dtype=np.complex128)

    def step(values):
        x1 = values[rng.integers(0, m, size=m)]
        ns, idx = _draw_segments(_POI1, m, m, rng)
        sums = segment_sums(w_pop.values, idx, ns)
        return -1.0 / (z + x1 + sums)

    x_pop = _iterate(step, x_init, z, params)
    if not w_pop.converged:
        x_pop.converged = False
    return w_pop, x_pop


def rde_skeleton(p_gwt: float, z: complex, params: RdeParams) -> Population:
    """Root law of the skeleton-tree limit of uniform random trees.

    The branching intensity is fixed at 1 by the limit itself; the parameter
    is kept for API symmetry and any other value is rejected.
    """
    if p_gwt != 1.0:
        raise ValueError("the skeleton-tree limit requires Poisson intensity 1")
    _, x_pop = skeleton_pools(z, params)
    return x_pop


def skeleton_consistency(
    w_pop: Population, x_pop: Population, samples: int, seed: int
) -> tuple:
    """Estimate the root mean through both equivalent update forms.

    Form A resamples -(z + X_1 + sum W_i)^-1; form B resamples the rewritten
    (W^-1 - X_1)^-1, which absorbs z plus the W sum into a single W draw.
    Returns (mean_a, se_a, mean_b, se_b); the two means agree within Monte
    Carlo error when the pools solve the system.
    """
    if w_pop.z != x_pop.z:
        raise ValueError("pools evaluated at different z")
    rng = stream(seed, "skeleton-consistency")
    z = x_pop.z
    mx = x_pop.values.shape[0]
    mw = w_pop.values.shape[0]
    x1 = x_pop.values[rng.integers(0, mx, size=samples)]
    ns, idx = _draw_segments(_POI1, mw, samples, rng)
    sums = segment_sums(w_pop.values, idx, ns)
    direct = -1.0 / (z + x1 + sums)
    w = w_pop.values[rng.integers(0, mw, size=samples)]
    x1b = x_pop.values[rng.integers(0, mx, size=samples)]
    rewritten = 1.0 / (1.0 / w - x1b)
    mean_a, se_a = _mean_stderr(direct)
    mean_b, se_b = _mean_stderr(rewritten)
    return mean_a, se_a, mean_b, se_b


# ---------------------------------------------------------------------------
# transform curves on a real grid
# ---------------------------------------------------------------------------


def _curve_metadata(params: RdeParams, pts: list) -> dict:
    return {
        "population_size": params.population_size,
        "sweeps": params.sweeps,
        "seed": params.seed,
        "damping": params.damping,
        "convergence_tol": params.convergence_tol,
        "points": pts,
    }


def _run_curve(xs, eta, params, solve_one):
    """Shared warm-started sweep over the x grid.

    solve_one(z, carry, rng) returns (mean, stderr, converged, carry, trace);
    carry transports the previous grid point's population(s).
    """
    xs = np.asarray(xs, dtype=np.float64)
    if eta <= 0:
        raise ValueError("eta must be positive")
    values = np.empty(xs.shape, dtype=np.complex128)
    stderr = np.empty(xs.shape, dtype=np.float64)
    converged = np.zeros(xs.shape, dtype=bool)
    pts = []
    carry = None
    for i, x in enumerate(xs):
        z = complex(x, eta)
        rng = stream(params.seed, "curve", i)
        mean, se, conv, carry, trace = solve_one(z, carry, rng, i)
        values[i] = mean
        stderr[i] = se
        converged[i] = conv
        pts.append(
            {
                "x": float(x),
                "converged": bool(conv),
                "sweeps_run": len(trace),
                "diagnostic_trace": [float(d) for d in trace],
            }
        )
    return StieltjesCurve(
        eta=float(eta),
        xs=xs,
        values=values,
        stderr=stderr,
        converged=converged,
        metadata=_curve_metadata(params, pts),
    )


def stieltjes_curve(
    fstar: DegreeDistribution,
    alpha: int,
    xs,
    eta: float,
    params: RdeParams,
    samples: int | None = None,
) -> StieltjesCurve:
    """Limit transform E X on the grid x + i*eta for the tree limit with
    degree law fstar, warm-starting each solve at the neighboring point."""
    f = size_biased_offspring(fstar)
    samples = samples or params.population_size

    def solve_one(z, carry, rng, i):
        pop = rde_fixed_point(f, alpha, z, params, init=carry, rng=rng)
        mean, se = root_expectation(
            fstar, pop, alpha, samples, seed=_point_seed(params.seed, i)
        )
        return mean, se, pop.converged, pop.values, pop.diagnostic_trace

    return _run_curve(xs, eta, params, solve_one)


def stieltjes_curve_weighted(
    fstar: DegreeDistribution,
    wdist: WeightSpec,
    xs,
    eta: float,
    params: RdeParams,
    samples: int | None = None,
) -> StieltjesCurve:
    """Weighted-adjacency transform curve (alpha = 0 only)."""
    f = size_biased_offspring(fstar)
    samples = samples or params.population_size

    def solve_one(z, carry, rng, i):
        pop = rde_weighted(f, wdist, z, params, init=carry, rng=rng)
        mean, se = root_expectation_weighted(
            fstar, wdist, pop, samples, seed=_point_seed(params.seed, i)
        )
        return mean, se, pop.converged, pop.values, pop.diagnostic_trace

    return _run_curve(xs, eta, params, solve_one)


def stieltjes_curve_bipartite(
    fstar: DegreeDistribution,
    gstar: DegreeDistribution,
    p: float,
    alpha: int,
    xs,
    eta: float,
    params: RdeParams,
    samples: int | None = None,
) -> StieltjesCurve:
    """Two-type transform curve p*E[X_a] + (1-p)*E[X_b]."""
    f = size_biased_offspring(fstar)
    g = size_biased_offspring(gstar)
    samples = samples or params.population_size

    def solve_one(z, carry, rng, i):
        pops = rde_bipartite(f, g, alpha, z, params, init=carry, rng=rng)
        mean, se = root_expectation_bipartite(
            fstar, gstar, p, pops, alpha, samples, seed=_point_seed(params.seed, i)
        )
        carry = (pops[0].values, pops[1].values)
        return mean, se, pops[0].converged, carry, pops[0].diagnostic_trace

    return _run_curve(xs, eta, params, solve_one)


def stieltjes_curve_skeleton(
    xs,
    eta: float,
    params: RdeParams,
    samples: int | None = None,
    p_gwt: float = 1.0,
) -> StieltjesCurve:
    """Transform curve of the uniform-random-tree (skeleton) limit."""
    if p_gwt != 1.0:
        raise ValueError("the skeleton-tree limit requires Poisson intensity 1")
    samples = samples or params.population_size

    def solve_one(z, carry, rng, i):
        w_pop, x_pop = skeleton_pools(z, params, init=carry, rng=rng)
        mean, se, _, _ = skeleton_consistency(
            w_pop, x_pop, samples, seed=_point_seed(params.seed, i)
        )
        carry = (w_pop.values, x_pop.values)
        return mean, se, x_pop.converged, carry, x_pop.diagnostic_trace

    return _run_curve(xs, eta, params, solve_one)


def _point_seed(seed: int, i: int) -> int:
    # Stable per-grid-point sub-seed for root expectations along a curve.
    return (int(seed) * 1_000_003 + 7919 * (i + 1)) % (2**31)


# ---------------------------------------------------------------------------
# characteristic-function identity for Poisson limits
# ---------------------------------------------------------------------------


def _tail_cutoff(im_z: float) -> float:
    t = 10.0 / im_z
    for _ in range(3):
        t = max(1.0, math.log(0.6e6 / (im_z * math.sqrt(t))) / im_z)
    return t


def bessel_equation_residual(p: float, u: float, z: complex, pop: Population) -> float:
    """Defect of the characteristic-function identity satisfied by the
    Poisson(p) fixed-point law at alpha = 0:

        f(u,z) = 1 - sqrt(u) * int_0^inf J1(2 sqrt(ut))/sqrt(t) e^{itz}
                 exp(p*(f(t,z) - 1)) dt,

    where f(u,z) is the population mean of e^{iuY}.  The integral is cut at
    T with tail below 1e-6 (the integrand decays like e^{-t Im z}) and done
    by adaptive quadrature.  Returns |LHS - RHS|.
    """
    if u < 0:
        raise ValueError("u must be >= 0")
    if p < 0:
        raise ValueError("p must be >= 0")
    z = _check_z(z)
    vals = pop.values
    if u == 0.0:
        return abs(complex(np.mean(np.exp(1j * 0.0 * vals))) - 1.0)

    def charfn(t: float) -> complex:
        return complex(np.mean(np.exp(1j * t * vals)))

    lhs = charfn(u)
    sqrt_u = math.sqrt(u)

    def integrand(t: float) -> complex:
        if t == 0.0:
            bessel_part = sqrt_u  # limit of J1(2 sqrt(ut))/sqrt(t)
        else:
            bessel_part = special.j1(2.0 * math.sqrt(u * t)) / math.sqrt(t)
        return bessel_part * np.exp(1j * t * z) * np.exp(p * (charfn(t) - 1.0))

    tmax = _tail_cutoff(z.imag)
    re, _ = integrate.quad(lambda t: integrand(t).real, 0.0, tmax, limit=200)
    im, _ = integrate.quad(lambda t: integrand(t).imag, 0.0, tmax, limit=200)
    rhs = 1.0 - sqrt_u * complex(re, im)
    return abs(lhs - rhs)
