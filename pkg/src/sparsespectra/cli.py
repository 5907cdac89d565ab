"""Command-line front end.

Subcommands compose the library: generate graphs, compute spectra, solve the
limit equations, cross-validate the two routes, and check the local-weak
assumptions.  A run is configured by a JSON config file plus flag overrides
(flags win).  All outputs are deterministic functions of config + seeds.

Exit codes: 0 success, 1 assertion/threshold failure, 2 usage/config error.
Per-point solver non-convergence is flagged in the output CSV/metadata and
does not change the exit code; only hard errors abort.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acceptance
from ._kernels import USING_NUMBA, backend_name
from .closed_form import invert_stieltjes, measure_from_density
from .distributions import DegreeDistribution, WeightSpec
from .graphs import (
    attach_weights,
    gen_bipartite_configuration,
    gen_configuration,
    gen_erdos_renyi,
    gen_regular,
    gen_uniform_tree,
)
from .localweak import (
    gwt_ball_distribution,
    pair_independence_stat,
    pooled_ball_distribution,
    tv_distance,
    uniform_integrability_profile,
)
from .rde import (
    RdeParams,
    stieltjes_curve,
    stieltjes_curve_bipartite,
    stieltjes_curve_skeleton,
    stieltjes_curve_weighted,
)
from .spectral import average_measures, delta_matrix, esd, histogram, histogram_csv, levy_distance

ENSEMBLES = ("regular", "er", "configuration", "bipartite", "uniform_tree")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative experiment description; see README for the schema."""

    ensemble: str = "regular"
    k: int = 3
    p: float = 2.0
    fstar: str = "delta:3"
    gstar: str = "delta:2"
    na_frac: float = 0.4
    weights: str = ""
    alpha: int = 0
    n: tuple = (2000,)
    seeds: tuple = (0,)
    seed: int = 0
    eta: float = 0.05
    grid_lo: float = -5.0
    grid_hi: float = 5.0
    grid_step: float = 0.02
    population_size: int = 50_000
    sweeps: int = 100
    damping: float = 0.0
    convergence_tol: float = 1.5e-2
    samples: int = 100_000
    radius: int = 2
    gwt_samples: int = 100_000
    pairs: int = 10_000
    threshold: float = 0.06
    bins: int = 100

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"unknown ensemble {self.ensemble!r}; expected one of {ENSEMBLES}")
        if self.alpha not in (0, 1):
            raise ValueError("alpha must be 0 or 1")
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))
        object.__setattr__(self, "seeds", tuple(int(v) for v in self.seeds))

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - fields
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))


def parse_distribution(spec: str) -> DegreeDistribution:
    """Parse 'delta:K', 'poisson:LAM', 'uniform:K1,K2,...' or 'pmf:K=P,...'."""
    name, _, arg = spec.partition(":")
    if name == "delta":
        return DegreeDistribution.delta(int(arg))
    if name == "poisson":
        return DegreeDistribution.poisson(float(arg))
    if name == "uniform":
        return DegreeDistribution.uniform(int(t) for t in arg.split(","))
    if name == "pmf":
        pairs = []
        for item in arg.split(","):
            key, _, val = item.partition("=")
            pairs.append((int(key), float(val)))
        return DegreeDistribution.from_pairs(pairs)
    raise ValueError(f"unknown degree distribution spec {spec!r}")


def parse_weight_spec(spec: str) -> WeightSpec:
    """Parse 'constant:C', 'gaussian:MU,SIGMA', 'uniform:A,B' or 'rademacher'."""
    name, _, arg = spec.partition(":")
    params = tuple(float(t) for t in arg.split(",")) if arg else ()
    return WeightSpec(name, params)


def build_graph(cfg: ExperimentConfig, n: int, seed: int):
    if cfg.ensemble == "regular":
        g = gen_regular(n, cfg.k, seed)
    elif cfg.ensemble == "er":
        g = gen_erdos_renyi(n, cfg.p, seed)
    elif cfg.ensemble == "configuration":
        g = gen_configuration(n, parse_distribution(cfg.fstar), seed)
    elif cfg.ensemble == "bipartite":
        na = int(round(cfg.na_frac * n))
        g = gen_bipartite_configuration(
            na, n - na, parse_distribution(cfg.fstar), parse_distribution(cfg.gstar), seed
        )
    else:
        g = gen_uniform_tree(n, seed)
    if cfg.weights:
        return attach_weights(g, parse_weight_spec(cfg.weights), seed)
    return g


def limit_degree_distribution(cfg: ExperimentConfig) -> DegreeDistribution:
    if cfg.ensemble == "regular":
        return DegreeDistribution.delta(cfg.k)
    if cfg.ensemble == "er":
        return DegreeDistribution.poisson(cfg.p)
    if cfg.ensemble == "configuration":
        return parse_distribution(cfg.fstar)
    raise ValueError(f"ensemble {cfg.ensemble!r} has no single degree-law limit")


def run_curve_for_config(cfg: ExperimentConfig):
    """The limit transform curve appropriate to the configured ensemble."""
    xs = np.arange(cfg.grid_lo, cfg.grid_hi + 0.5 * cfg.grid_step, cfg.grid_step)
    params = RdeParams(
        population_size=cfg.population_size,
        sweeps=cfg.sweeps,
        seed=cfg.seed,
        damping=cfg.damping,
        convergence_tol=cfg.convergence_tol,
    )
    if cfg.ensemble == "uniform_tree":
        if cfg.alpha != 0:
            raise ValueError("the uniform-tree limit is adjacency-only (alpha = 0)")
        return stieltjes_curve_skeleton(xs, cfg.eta, params, samples=cfg.samples)
    if cfg.ensemble == "bipartite":
        return stieltjes_curve_bipartite(
            parse_distribution(cfg.fstar),
            parse_distribution(cfg.gstar),
            cfg.na_frac,
            cfg.alpha,
            xs,
            cfg.eta,
            params,
            samples=cfg.samples,
        )
    fstar = limit_degree_distribution(cfg)
    if cfg.weights:
        if cfg.alpha != 0:
            raise ValueError("weighted limits exist only for alpha = 0")
        return stieltjes_curve_weighted(
            fstar, parse_weight_spec(cfg.weights), xs, cfg.eta, params, samples=cfg.samples
        )
    return stieltjes_curve(fstar, cfg.alpha, xs, cfg.eta, params, samples=cfg.samples)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(cfg: ExperimentConfig, args) -> int:
    out = _outdir(args)
    files = []
    for n in cfg.n:
        for seed in cfg.seeds:
            g = build_graph(cfg, n, seed)
            name = f"{cfg.ensemble}_n{n}_seed{seed}.edges"
            (out / name).write_text(g.to_edge_list())
            files.append(name)
    manifest = {"config": json.loads(cfg.to_json()), "files": files}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    print(f"wrote {len(files)} graph file(s) to {out}")
    return 0


def cmd_spectrum(cfg: ExperimentConfig, args) -> int:
    out = _outdir(args)
    for n in cfg.n:
        measures = []
        for seed in cfg.seeds:
            g = build_graph(cfg, n, seed)
            mu = esd(delta_matrix(g, cfg.alpha))
            measures.append(mu)
            (out / f"esd_{cfg.ensemble}_n{n}_seed{seed}.csv").write_text(mu.to_csv())
        lo = min(m.locations.min() for m in measures)
        hi = max(m.locations.max() for m in measures)
        span = max(hi - lo, 1e-9)
        lo, hi = lo - 0.05 * span, hi + 0.05 * span
        for seed, mu in zip(cfg.seeds, measures):
            hcsv = histogram_csv(*histogram(mu, lo, hi, cfg.bins))
            (out / f"hist_{cfg.ensemble}_n{n}_seed{seed}.csv").write_text(hcsv)
        avg = average_measures(measures)
        (out / f"esd_{cfg.ensemble}_n{n}_avg.csv").write_text(avg.to_csv())
        acsv = histogram_csv(*histogram(avg, lo, hi, cfg.bins))
        (out / f"hist_{cfg.ensemble}_n{n}_avg.csv").write_text(acsv)
    print(f"wrote spectra for n in {cfg.n} to {out}")
    return 0


def cmd_rde(cfg: ExperimentConfig, args) -> int:
    out = _outdir(args)
    curve = run_curve_for_config(cfg)
    dens = invert_stieltjes(curve)
    (out / "curve.csv").write_text(curve.to_csv())
    (out / "density.csv").write_text(dens.to_csv())
    meta = dict(curve.metadata)
    meta["eta"] = curve.eta
    meta["density_mass"] = dens.mass()
    meta["flagged_points"] = int(np.count_nonzero(~curve.converged))
    (out / "rde_metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    flagged = meta["flagged_points"]
    print(
        f"wrote curve/density ({len(curve.xs)} points, eta={curve.eta}, "
        f"{flagged} flagged) to {out}"
    )
    return 0


def cmd_compare(cfg: ExperimentConfig, args) -> int:
    out = _outdir(args)
    curve = run_curve_for_config(cfg)
    ref = measure_from_density(invert_stieltjes(curve))
    rows = []
    for n in cfg.n:
        measures = [
            esd(delta_matrix(build_graph(cfg, n, seed), cfg.alpha)) for seed in cfg.seeds
        ]
        rows.append((n, levy_distance(average_measures(measures), ref)))
    lines = ["n,levy"]
    lines.extend(f"{n},{d:.17g}" for n, d in rows)
    (out / "compare.csv").write_text("\n".join(lines) + "\n")
    for n, d in rows:
        print(f"n={n:>6d}  levy={d:.6f}")
    failures = []
    for (n0, d0), (n1, d1) in zip(rows, rows[1:]):
        if d1 > d0 + 0.01:
            failures.append(f"distance rose {d0:.4f} -> {d1:.4f} from n={n0} to n={n1}")
    if rows[-1][1] > cfg.threshold:
        failures.append(
            f"final distance {rows[-1][1]:.4f} at n={rows[-1][0]} exceeds threshold {cfg.threshold}"
        )
    for msg in failures:
        print("FAIL:", msg, file=sys.stderr)
    return 1 if failures else 0


def cmd_localweak(cfg: ExperimentConfig, args) -> int:
    out = _outdir(args)
    n = cfg.n[0]
    graphs = [build_graph(cfg, n, seed) for seed in cfg.seeds]
    pooled = pooled_ball_distribution(graphs, cfg.radius)
    ref = gwt_ball_distribution(
        limit_degree_distribution(cfg), cfg.radius, cfg.gwt_samples, cfg.seed
    )
    pair_stats = [
        pair_independence_stat(g, cfg.radius, cfg.pairs, cfg.seed + i)
        for i, g in enumerate(graphs)
    ]
    profiles = [uniform_integrability_profile(g) for g in graphs]
    ells = sorted({ell for prof in profiles for ell, _ in prof})
    tail = {
        str(ell): float(
            np.mean([dict(prof).get(ell, 0.0) for prof in profiles])
        )
        for ell in ells
    }
    report = {
        "n": n,
        "radius": cfg.radius,
        "seeds": list(cfg.seeds),
        "pooled_roots": pooled.sample_count,
        "gwt_samples": cfg.gwt_samples,
        "tv_ball": tv_distance(pooled, ref),
        "pair_independence": {
            "pairs": cfg.pairs,
            "per_seed": pair_stats,
            "mean": float(np.mean(pair_stats)),
        },
        "uniform_integrability_tail": tail,
    }
    (out / "localweak.json").write_text(json.dumps(report, indent=2, sort_keys=True))
    print(f"tv_ball={report['tv_ball']:.5f} pair_mean={report['pair_independence']['mean']:.5f}")
    return 0


def cmd_selftest(cfg: ExperimentConfig, args) -> int:
    results = acceptance.run_all(criteria=args.criteria)
    print(acceptance.format_table(results))
    hard_failures = [r for r in results if not r.passed and not r.expected_fail]
    return 1 if hard_failures else 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_OVERRIDE_FLAGS = [
    ("ensemble", str),
    ("k", int),
    ("p", float),
    ("fstar", str),
    ("gstar", str),
    ("na_frac", float),
    ("weights", str),
    ("alpha", int),
    ("eta", float),
    ("grid_lo", float),
    ("grid_hi", float),
    ("grid_step", float),
    ("population_size", int),
    ("sweeps", int),
    ("damping", float),
    ("convergence_tol", float),
    ("samples", int),
    ("radius", int),
    ("gwt_samples", int),
    ("pairs", int),
    ("threshold", float),
    ("bins", int),
]


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file (flags override it)")
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--seed", type=int, help="base seed for solvers/statistics")
    sub.add_argument("--seeds", help="comma-separated graph seeds, e.g. 0,1,2")
    sub.add_argument("--n", help="comma-separated vertex counts, e.g. 250,500,1000")
    sub.add_argument(
        "--threads", type=int, default=0,
        help="numba thread count (affects runtime only, never results)",
    )
    for name, typ in _OVERRIDE_FLAGS:
        sub.add_argument(f"--{name.replace('_', '-')}", type=typ, dest=name)


def _config_from_args(args) -> ExperimentConfig:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    for name, _ in _OVERRIDE_FLAGS:
        val = getattr(args, name, None)
        if val is not None:
            base[name] = val
    if args.seed is not None:
        base["seed"] = args.seed
    if args.seeds is not None:
        base["seeds"] = [int(t) for t in str(args.seeds).split(",")]
    if args.n is not None:
        base["n"] = [int(t) for t in str(args.n).split(",")]
    return ExperimentConfig.from_dict(base)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sparsespectra",
        description="Spectral measures of sparse random graphs: sampled spectra, "
        "limit-equation solutions, and cross-validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in [
        ("generate", cmd_generate),
        ("spectrum", cmd_spectrum),
        ("rde", cmd_rde),
        ("compare", cmd_compare),
        ("localweak", cmd_localweak),
        ("selftest", cmd_selftest),
    ]:
        p = sub.add_parser(name)
        _add_common(p)
        if name == "selftest":
            p.add_argument(
                "--criteria", help="comma-separated criterion numbers to run (default all)"
            )
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    if getattr(args, "criteria", None):
        args.criteria = [int(t) for t in args.criteria.split(",")]
    else:
        args.criteria = None

    if args.threads and USING_NUMBA:
        import numba

        numba.set_num_threads(args.threads)

    try:
        cfg = _config_from_args(args)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print(f"# sparsespectra ({backend_name()} backend)", file=sys.stderr)
    try:
        return args.fn(cfg, args)
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
