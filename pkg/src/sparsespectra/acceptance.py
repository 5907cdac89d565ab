"""Desk-scale acceptance suite cross-validating the three routes.

Each criterion pairs a finite-size experiment with a closed-form or
independent-oracle anchor and a pinned tolerance.  The functions here are
shared by `sparsespectra selftest` and by tests/test_acceptance.py; expensive
intermediates (sampled spectra, solved transform curves) are cached per
context so overlapping criteria reuse them.

Criterion 11's pair-independence clause is implemented exactly as specified
but is expected to fail: for a fixed graph the two sampled roots are
independent by construction, so the statistic measures only the sampling
noise of a plug-in TV over a rich class space, which sits near 0.34 at
10^4 pairs for the Erdos-Renyi instance — far above the 0.05 bound.  See
the expected_fail flag and the README.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .closed_form import (
    exact_density_curve,
    invert_stieltjes,
    kesten_mckay_density,
    kesten_mckay_stieltjes,
    measure_from_density,
    semicircle_stieltjes,
)
from .distributions import DegreeDistribution, WeightSpec
from .graphs import (
    gen_bipartite_configuration,
    gen_erdos_renyi,
    gen_regular,
    gen_uniform_tree,
)
from .localweak import (
    gwt_ball_distribution,
    pair_independence_stat,
    pooled_ball_distribution,
    tv_distance,
)
from .rde import (
    RdeParams,
    bessel_equation_residual,
    rde_fixed_point,
    skeleton_consistency,
    skeleton_pools,
    stieltjes_curve,
    stieltjes_curve_bipartite,
    stieltjes_curve_skeleton,
    stieltjes_curve_weighted,
)
from .spectral import (
    SpectralMeasure,
    average_measures,
    delta_matrix,
    esd,
    levy_distance,
    rank_bound_check,
    schur_check,
)

N_SEEDS = 10
REG_SEEDS = tuple(range(1000, 1000 + N_SEEDS))
ER_SEEDS = tuple(range(500, 500 + N_SEEDS))
BIP_SEEDS = tuple(range(700, 700 + N_SEEDS))
TREE_SEEDS = tuple(range(800, 800 + N_SEEDS))

#: Floating-point floor applied where a criterion's Monte Carlo tolerance is
#: exactly zero because a population collapsed to bit-identical values.
FP_FLOOR = 1e-12


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    expected_fail: bool = False
    seconds: float = 0.0


class AcceptanceContext:
    """Caches the sampled spectra and solved curves shared across criteria."""

    def __init__(self):
        self._cache: dict = {}

    def _get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    # -- sampled graphs and spectra --------------------------------------

    def regular_graphs(self, n: int):
        return self._get(
            ("regular-graphs", n),
            lambda: [gen_regular(n, 3, s) for s in REG_SEEDS],
        )

    def er_graphs(self, n: int):
        return self._get(
            ("er-graphs", n),
            lambda: [gen_erdos_renyi(n, 2.0, s) for s in ER_SEEDS],
        )

    def regular_esd(self, n: int) -> SpectralMeasure:
        return self._get(
            ("regular-esd", n),
            lambda: average_measures(
                esd(delta_matrix(g, 0)) for g in self.regular_graphs(n)
            ),
        )

    def er_esd(self, n: int, alpha: int) -> SpectralMeasure:
        return self._get(
            ("er-esd", n, alpha),
            lambda: average_measures(
                esd(delta_matrix(g, alpha)) for g in self.er_graphs(n)
            ),
        )

    def bipartite_esd(self) -> SpectralMeasure:
        d3, d2 = DegreeDistribution.delta(3), DegreeDistribution.delta(2)
        return self._get(
            ("bipartite-esd",),
            lambda: average_measures(
                esd(delta_matrix(gen_bipartite_configuration(800, 1200, d3, d2, s), 0))
                for s in BIP_SEEDS
            ),
        )

    def tree_esd(self) -> SpectralMeasure:
        return self._get(
            ("tree-esd",),
            lambda: average_measures(
                esd(delta_matrix(gen_uniform_tree(2000, s), 0)) for s in TREE_SEEDS
            ),
        )

    # -- solved limit measures -------------------------------------------

    def regular_rde_measure(self) -> SpectralMeasure:
        # Offspring law delta_2 collapses the population to a point, so a
        # small population suffices; accuracy is set by the sweep tolerance.
        def build():
            xs = np.linspace(-3.2, 3.2, 321)
            params = RdeParams(
                population_size=2000, sweeps=400, seed=71, convergence_tol=1e-9
            )
            curve = stieltjes_curve(
                DegreeDistribution.delta(3), 0, xs, 0.05, params, samples=4000
            )
            return measure_from_density(invert_stieltjes(curve))

        return self._get(("regular-rde-measure",), build)

    def er_rde_measure(self, alpha: int) -> SpectralMeasure:
        def build():
            poi2 = DegreeDistribution.poisson(2.0)
            xs = np.linspace(-5.5, 5.5, 1101) if alpha == 0 else np.linspace(-16.0, 0.5, 1101)
            params = RdeParams(
                population_size=30_000, sweeps=60, seed=21 + alpha, convergence_tol=1.5e-2
            )
            curve = stieltjes_curve(poi2, alpha, xs, 0.05, params, samples=60_000)
            return measure_from_density(invert_stieltjes(curve))

        return self._get(("er-rde-measure", alpha), build)


def _fmt(x: float) -> str:
    return f"{x:.4g}"


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def criterion_1(ctx: AcceptanceContext) -> CriterionResult:
    """Sampled 3-regular spectra against the exact McKay density."""
    avg = ctx.regular_esd(2000)
    edge = 2 * math.sqrt(2)
    grid = np.linspace(-edge, edge, int(round(2 * edge / 0.01)) + 1)
    ref = measure_from_density(
        exact_density_curve(lambda x: kesten_mckay_density(3, x), grid)
    )
    d = levy_distance(avg, ref)
    return CriterionResult(
        1, "regular k=3 ESD vs McKay density", d <= 0.05,
        f"levy={_fmt(d)} (bound 0.05)",
    )


def criterion_2(ctx: AcceptanceContext) -> CriterionResult:
    """Solved transform curve against the closed form for the 3-regular limit."""
    xs = np.linspace(-4, 4, 81)
    params = RdeParams(population_size=100_000, sweeps=300, seed=11, convergence_tol=1e-8)
    curve = stieltjes_curve(DegreeDistribution.delta(3), 0, xs, 0.05, params)
    truth = np.array([kesten_mckay_stieltjes(3, complex(x, 0.05)) for x in xs])
    tol = np.maximum(3 * curve.stderr, 5e-3)
    err_re = np.abs(curve.values.real - truth.real)
    err_im = np.abs(curve.values.imag - truth.imag)
    ok = bool(np.all(err_re <= tol) and np.all(err_im <= tol))
    return CriterionResult(
        2, "RDE curve vs closed form (k=3)", ok,
        f"max|re err|={_fmt(err_re.max())} max|im err|={_fmt(err_im.max())} "
        f"(tol max(3se, 5e-3))",
    )


def criterion_3(ctx: AcceptanceContext) -> CriterionResult:
    """Fixed-point law for offspring delta_2 is the semicircle transform."""
    params = RdeParams(population_size=10_000, sweeps=500, seed=1, convergence_tol=1e-14)
    worst_mean, worst_std = 0.0, 0.0
    ok = True
    for z in (2j, 1 + 1j, -1 + 0.5j):
        pop = rde_fixed_point(DegreeDistribution.delta(2), 0, z, params)
        truth = semicircle_stieltjes(math.sqrt(2), z)
        stderr = pop.std() / math.sqrt(pop.values.shape[0])
        tol_mean = max(3 * stderr, FP_FLOOR)
        tol_std = max(10 * stderr, FP_FLOOR)
        err = abs(pop.mean() - truth)
        ok = ok and err <= tol_mean and pop.std() <= tol_std
        worst_mean = max(worst_mean, err)
        worst_std = max(worst_std, pop.std())
    return CriterionResult(
        3, "Dirac fixed point equals semicircle transform", ok,
        f"max|mean err|={_fmt(worst_mean)} max std={_fmt(worst_std)} (fp floor 1e-12)",
    )


def criterion_4(ctx: AcceptanceContext) -> CriterionResult:
    """Erdos-Renyi p=2 spectra vs inverted Poisson(2) limit, both alphas."""
    details = []
    ok = True
    for alpha in (0, 1):
        d = levy_distance(ctx.er_esd(2000, alpha), ctx.er_rde_measure(alpha))
        details.append(f"alpha={alpha}: levy={_fmt(d)}")
        ok = ok and d <= 0.06
    return CriterionResult(
        4, "ER p=2 ESD vs RDE density (alpha 0 and 1)", ok,
        "; ".join(details) + " (bound 0.06)",
    )


def criterion_5(ctx: AcceptanceContext) -> CriterionResult:
    """Characteristic-function identity for the Poisson(1) fixed point."""
    params = RdeParams(population_size=100_000, sweeps=60, seed=51, convergence_tol=5e-4)
    pop = rde_fixed_point(DegreeDistribution.poisson(1.0), 0, 3j, params)
    residuals = {u: bessel_equation_residual(1.0, u, 3j, pop) for u in (0.5, 1.0, 2.0)}
    ok = all(r <= 0.02 for r in residuals.values())
    return CriterionResult(
        5, "Bessel functional equation (Poisson(1), z=3i)", ok,
        " ".join(f"u={u}: {_fmt(r)}" for u, r in residuals.items()) + " (bound 0.02)",
    )


def criterion_6(ctx: AcceptanceContext) -> CriterionResult:
    """Rademacher weights leave the adjacency limit unchanged."""
    poi2 = DegreeDistribution.poisson(2.0)
    xs = np.linspace(-5, 5, 41)
    params = RdeParams(population_size=100_000, sweeps=60, seed=61, convergence_tol=1e-2)
    plain = stieltjes_curve(poi2, 0, xs, 0.1, params, samples=200_000)
    weighted = stieltjes_curve_weighted(
        poi2, WeightSpec.rademacher(), xs, 0.1, params, samples=200_000
    )
    sig = np.sqrt(plain.stderr**2 + weighted.stderr**2)
    tol = np.maximum(3 * sig, 5e-3)
    dre = np.abs(plain.values.real - weighted.values.real)
    dim = np.abs(plain.values.imag - weighted.values.imag)
    ok = bool(np.all(dre <= tol) and np.all(dim <= tol))
    return CriterionResult(
        6, "rademacher-weighted curve matches unweighted", ok,
        f"max|re diff|={_fmt(dre.max())} max|im diff|={_fmt(dim.max())} "
        f"(tol max(3se, 5e-3))",
    )


def criterion_7(ctx: AcceptanceContext) -> CriterionResult:
    """Bipartite (3,2)-ensemble vs the two-type limit; spectrum symmetry."""
    avg = ctx.bipartite_esd()
    locs, w = avg.locations, avg.weights
    sym_defect = 0.0
    for x, ww in zip(locs, w):
        match = np.where(np.abs(locs + x) < 1e-8)[0]
        if match.size == 0:
            sym_defect = max(sym_defect, ww)
        else:
            sym_defect = max(sym_defect, abs(w[match[0]] - ww))
    xs = np.linspace(-3.0, 3.0, 301)
    params = RdeParams(population_size=10_000, sweeps=150, seed=31, convergence_tol=1e-8)
    curve = stieltjes_curve_bipartite(
        DegreeDistribution.delta(3), DegreeDistribution.delta(2),
        0.4, 0, xs, 0.05, params, samples=50_000,
    )
    d = levy_distance(avg, measure_from_density(invert_stieltjes(curve)))
    ok = d <= 0.06 and sym_defect <= 1e-8
    return CriterionResult(
        7, "bipartite (800,1200,d3,d2) vs two-type RDE", ok,
        f"levy={_fmt(d)} (bound 0.06); symmetry defect={_fmt(sym_defect)} (bound 1e-8)",
    )


def criterion_8(ctx: AcceptanceContext) -> CriterionResult:
    """Uniform random trees vs the skeleton-tree limit; form consistency."""
    avg = ctx.tree_esd()
    xs = np.linspace(-4.5, 4.5, 901)
    params = RdeParams(population_size=50_000, sweeps=60, seed=41, convergence_tol=1.2e-2)
    curve = stieltjes_curve_skeleton(xs, 0.05, params, samples=100_000)
    d = levy_distance(avg, measure_from_density(invert_stieltjes(curve)))
    cons_ok = True
    worst = 0.0
    for z in (2j, 0.7 + 0.3j, -1.2 + 0.1j):
        pools_params = RdeParams(
            population_size=100_000, sweeps=200, seed=43, convergence_tol=1e-3
        )
        w_pop, x_pop = skeleton_pools(z, pools_params)
        ma, sa, mb, sb = skeleton_consistency(w_pop, x_pop, 200_000, seed=5)
        sig = math.hypot(sa, sb)
        cons_ok = cons_ok and abs(ma - mb) <= 3 * sig
        worst = max(worst, abs(ma - mb) / (3 * sig))
    ok = d <= 0.06 and cons_ok
    return CriterionResult(
        8, "uniform trees vs skeleton RDE", ok,
        f"levy={_fmt(d)} (bound 0.06); worst consistency ratio={_fmt(worst)} of 3se",
    )


def criterion_9(ctx: AcceptanceContext) -> CriterionResult:
    """Levy(ESD, RDE measure) drifts down with n for both test ensembles."""
    ns = (250, 500, 1000, 2000)
    details = []
    ok = True
    for label, ref, eachn, bound in (
        ("regular", ctx.regular_rde_measure(), ctx.regular_esd, 0.05),
        ("er", ctx.er_rde_measure(0), lambda n: ctx.er_esd(n, 0), 0.06),
    ):
        dists = [levy_distance(eachn(n), ref) for n in ns]
        for d0, d1 in zip(dists, dists[1:]):
            ok = ok and d1 <= d0 + 0.01
        ok = ok and dists[-1] <= bound
        details.append(label + ": " + " ".join(_fmt(d) for d in dists))
    return CriterionResult(
        9, "ESD-to-limit trend over n", ok,
        "; ".join(details) + " (slack 0.01/step; ends <= 0.05/0.06)",
    )


def criterion_10(ctx: AcceptanceContext) -> CriterionResult:
    """Rank-difference inequality, Schur identity, and Levy metric axioms."""
    rng = np.random.default_rng(0)
    worst_slack = -1.0
    for _ in range(100):
        n = int(rng.integers(10, 80))
        g = gen_erdos_renyi(n, float(rng.uniform(0.5, 4.0)), int(rng.integers(10**6)))
        levy, bound = rank_bound_check(g, int(rng.integers(0, 8)), int(rng.integers(0, 2)))
        worst_slack = max(worst_slack, levy - bound)
    worst_schur = 0.0
    for _ in range(50):
        n = int(rng.integers(5, 40))
        g = gen_erdos_renyi(n, float(rng.uniform(0.5, 4.0)), int(rng.integers(10**6)))
        worst_schur = max(worst_schur, schur_check(delta_matrix(g, int(rng.integers(0, 2))), 1j))

    def rand_measure():
        k = int(rng.integers(1, 8))
        locs = np.unique(rng.normal(0.0, 2.0, k))
        w = rng.random(locs.size) + 0.05
        return SpectralMeasure(locs, w / w.sum())

    worst_tri = -1.0
    sym_ok = True
    for _ in range(100):
        a, b, c = rand_measure(), rand_measure(), rand_measure()
        dab, dba = levy_distance(a, b), levy_distance(b, a)
        sym_ok = sym_ok and dab == dba
        worst_tri = max(worst_tri, levy_distance(a, c) - (dab + levy_distance(b, c)))
    ok = worst_slack <= 1e-9 and worst_schur <= 1e-9 and worst_tri <= 1e-9 and sym_ok
    return CriterionResult(
        10, "rank bound / Schur identity / Levy axioms", ok,
        f"rank slack={_fmt(worst_slack)} schur={_fmt(worst_schur)} "
        f"triangle={_fmt(worst_tri)} symmetric={sym_ok}",
    )


def criterion_11_balls(ctx: AcceptanceContext) -> CriterionResult:
    """Ball-type distributions match the branching-tree reference laws."""
    reg = pooled_ball_distribution(ctx.regular_graphs(2000), 2)
    reg_ref = gwt_ball_distribution(DegreeDistribution.delta(3), 2, 50_000, seed=5)
    tv_reg = tv_distance(reg, reg_ref)
    er = pooled_ball_distribution(ctx.er_graphs(2000), 2)
    er_ref = gwt_ball_distribution(DegreeDistribution.poisson(2.0), 2, 100_000, seed=3)
    tv_er = tv_distance(er, er_ref)
    ok = tv_reg <= 0.05 and tv_er <= 0.08
    return CriterionResult(
        11, "ball types: regular<=0.05, ER<=0.08 (pooled seeds)", ok,
        f"tv regular={_fmt(tv_reg)}; tv er={_fmt(tv_er)}",
    )


def criterion_11_pairs(ctx: AcceptanceContext) -> CriterionResult:
    """Pair-independence statistic at its specified scale (expected fail).

    The statistic is faithfully the plug-in TV between the sampled joint and
    the product of its marginals.  Its population value is exactly 0 for a
    fixed graph (the two roots are drawn independently), but at 10^4 pairs
    over the ~10^3 radius-2 ball classes of ER(2000, 2/n) the plug-in
    estimator's noise floor is ~0.34, so the 0.05 bound cannot be met at the
    specified sample size.  Kept at the stated tolerance as documentation.
    """
    stat = pair_independence_stat(ctx.er_graphs(2000)[0], 2, 10_000, seed=7)
    return CriterionResult(
        11, "pair independence stat <= 0.05 (known spec defect)", stat <= 0.05,
        f"stat={_fmt(stat)} (bound 0.05; plug-in TV noise floor ~0.34 at 1e4 pairs)",
        expected_fail=True,
    )


def criterion_12(ctx: AcceptanceContext) -> CriterionResult:
    """Sweep contraction in the proven region Im z >= sqrt(E N) + 1."""
    z = 1j * (math.sqrt(2) + 1.1)
    params = RdeParams(population_size=100_000, sweeps=11, seed=5, convergence_tol=1e-15)
    pop = rde_fixed_point(DegreeDistribution.poisson(2.0), 0, z, params)
    tr = pop.diagnostic_trace
    # Per-sweep geometric-mean ratio across the 10 sweeps after the first.
    ratio = (tr[10] / tr[0]) ** 0.1
    return CriterionResult(
        12, "contraction diagnostic ratio < 0.9", ratio < 0.9,
        f"geometric per-sweep ratio={_fmt(ratio)} over sweeps 2-11 "
        f"(theory bound {_fmt(2 / z.imag ** 2)})",
    )


CRITERIA = {
    1: (criterion_1,),
    2: (criterion_2,),
    3: (criterion_3,),
    4: (criterion_4,),
    5: (criterion_5,),
    6: (criterion_6,),
    7: (criterion_7,),
    8: (criterion_8,),
    9: (criterion_9,),
    10: (criterion_10,),
    11: (criterion_11_balls, criterion_11_pairs),
    12: (criterion_12,),
}


def run_all(criteria=None, ctx: AcceptanceContext | None = None) -> list:
    ctx = ctx or AcceptanceContext()
    results = []
    for number in sorted(CRITERIA):
        if criteria and number not in criteria:
            continue
        for fn in CRITERIA[number]:
            t0 = time.time()
            res = fn(ctx)
            res.seconds = time.time() - t0
            results.append(res)
    return results


def format_table(results) -> str:
    lines = []
    for r in results:
        if r.passed:
            status = "PASS"
        elif r.expected_fail:
            status = "XFAIL"
        else:
            status = "FAIL"
        lines.append(
            f"[{status:>5}] criterion {r.number:>2}: {r.name} — {r.detail} ({r.seconds:.1f}s)"
        )
    n_pass = sum(r.passed for r in results)
    n_xfail = sum((not r.passed) and r.expected_fail for r in results)
    n_fail = len(results) - n_pass - n_xfail
    lines.append(f"{n_pass} passed, {n_fail} failed, {n_xfail} expected failures")
    return "\n".join(lines)
