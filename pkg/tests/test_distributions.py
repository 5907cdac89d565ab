import math

import numpy as np
import pytest

from sparsespectra._rng import stream
from sparsespectra.distributions import (
    DegreeDistribution,
    WeightSpec,
    size_biased_offspring,
)


def test_pmf_validation():
    with pytest.raises(ValueError):
        DegreeDistribution((0, 1), (0.5, 0.6))
    with pytest.raises(ValueError):
        DegreeDistribution((1, 0), (0.5, 0.5))
    with pytest.raises(ValueError):
        DegreeDistribution((-1,), (1.0,))
    with pytest.raises(ValueError):
        DegreeDistribution((0, 1), (1.0, -0.0))


def test_poisson_truncation_mass_and_mean():
    d = DegreeDistribution.poisson(2.0)
    assert abs(sum(d.ps) - 1.0) < 1e-12
    # Truncation at the 1-1e-12 quantile barely moves the mean.
    assert abs(d.mean() - 2.0) < 1e-9
    assert max(d.ks) < 30


def test_size_biased_delta_shifts_down():
    # A degree-k tree node reached by an edge has k-1 further children.
    f = size_biased_offspring(DegreeDistribution.delta(5))
    assert f.ks == (4,) and f.ps == (1.0,)


def test_size_biased_poisson_is_poisson():
    fstar = DegreeDistribution.poisson(1.7)
    f = size_biased_offspring(fstar)
    assert fstar.tv_distance(f) < 1e-10


def test_size_biased_hand_example():
    # fstar uniform on {1,2}: weights 1*(1/2) and 2*(1/2), normalized.
    f = size_biased_offspring(DegreeDistribution.uniform([1, 2]))
    assert f.ks == (0, 1)
    assert abs(f.ps[0] - 1 / 3) < 1e-15
    assert abs(f.ps[1] - 2 / 3) < 1e-15


def test_size_biased_rejects_zero_mean():
    with pytest.raises(ValueError):
        size_biased_offspring(DegreeDistribution.delta(0))


def test_sampling_matches_pmf():
    d = DegreeDistribution.from_pairs([(0, 0.25), (2, 0.5), (7, 0.25)])
    draws = d.sample(stream(9, "t"), 200_000)
    for k, p in zip(d.ks, d.ps):
        assert abs(np.mean(draws == k) - p) < 3 * math.sqrt(p * (1 - p) / 2e5)


def test_sampling_deterministic():
    d = DegreeDistribution.poisson(3.0)
    a = d.sample(stream(4, "x"), 1000)
    b = d.sample(stream(4, "x"), 1000)
    assert np.array_equal(a, b)


def test_weight_spec_validation():
    with pytest.raises(ValueError):
        WeightSpec("cauchy", ())
    with pytest.raises(ValueError):
        WeightSpec("gaussian", (1.0,))
    assert WeightSpec.rademacher().params == ()


def test_weight_spec_second_moments():
    rng = np.random.default_rng(0)
    for spec in (
        WeightSpec.constant(2.5),
        WeightSpec.gaussian(0.5, 1.5),
        WeightSpec.uniform(-1.0, 3.0),
        WeightSpec.rademacher(),
    ):
        draws = spec.sample(rng, 400_000)
        assert abs(np.mean(draws**2) - spec.second_moment()) < 0.05


def test_rademacher_support():
    draws = WeightSpec.rademacher().sample(np.random.default_rng(1), 1000)
    assert set(np.unique(draws)) == {-1.0, 1.0}
