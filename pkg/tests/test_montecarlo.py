import math

import numpy as np
import pytest

from ambientrf.analytic import critical_radius_power, expected_harvest, hole_probability, variance_harvest
from ambientrf.model import Architecture, PhysicalParams, SpatialModel, ValidationError
from ambientrf.montecarlo import (BLOCK, estimate_harvest_moments, estimate_optimal_tau_empirical,
                                  estimate_outage, mean_estimate, nearest_stat, outage_indicators,
                                  outage_samples, replicate, variance_estimate)

P = PhysicalParams()
SEP = Architecture.separated()


def test_replicate_bitwise_reproducible():
    model = SpatialModel.ginibre(0.1)
    a = estimate_harvest_moments(P, SEP, model, 10_000, 3)
    b = estimate_harvest_moments(P, SEP, model, 10_000, 3)
    assert a == b
    c = estimate_harvest_moments(P, SEP, model, 10_000, 4)
    assert a[0].mean != c[0].mean


@pytest.mark.parametrize("model", [SpatialModel.ginibre(0.05, 10.0, 2), SpatialModel.ppp(0.05)])
def test_seed_partition_invariance(model):
    n = 3 * BLOCK + 17
    whole = replicate(nearest_stat, model, n, 9)
    parts = [replicate(nearest_stat, model, n, 9, blocks=[b]) for b in (3, 1, 0, 2)]
    pieces = np.concatenate([parts[2], parts[1], parts[3], parts[0]])[:n]
    assert np.array_equal(whole, pieces)
    assert np.array_equal(whole, replicate(nearest_stat, model, n, 9, workers=3))
    # a prefix run is a prefix of the longer run
    assert np.array_equal(replicate(nearest_stat, model, 5000, 9), whole[:5000])


def test_hkpv_sampler_path():
    model = SpatialModel.ginibre(0.1, 3.0)
    a = replicate(nearest_stat, model, 300, 2, sampler="hkpv")
    assert np.array_equal(a, replicate(nearest_stat, model, 300, 2, sampler="hkpv", workers=2))
    p = hole_probability(1.0, model).value
    assert abs(np.mean(a > 1.0) - p) < 4 * math.sqrt(p * (1 - p) / 300)
    with pytest.raises(ValidationError):
        replicate(nearest_stat, model, 10, 0, sampler="nope")


def test_stderr_halves_when_n_quadruples():
    model = SpatialModel.ppp(0.05)
    small = estimate_outage("power", "worst_case", P, SEP, model, n=20_000, master_seed=1)
    big = estimate_outage("power", "worst_case", P, SEP, model, n=80_000, master_seed=1)
    assert big.stderr / small.stderr == pytest.approx(0.5, rel=0.2)


def test_mean_and_variance_estimators():
    x = np.random.default_rng(0).normal(size=100_000)
    m = mean_estimate(x, 0)
    assert m.stderr == pytest.approx(1 / math.sqrt(len(x)), rel=0.02)
    v = variance_estimate(x, 0)
    assert v.stderr == pytest.approx(math.sqrt(2 / (len(x) - 1)), rel=0.05)
    with pytest.raises(ValidationError):
        mean_estimate(x[:1], 0)


def test_harvest_mean_linear_in_rho_and_smaller_dpp_variance():
    n = 100_000
    p = P.with_(epsilon=0.1)
    m1 = estimate_harvest_moments(p, SEP, SpatialModel.ppp(0.05), n, 0)
    m2 = estimate_harvest_moments(p, SEP, SpatialModel.ppp(0.1), n, 1)
    ratio_se = 2 * math.hypot(m1[0].stderr / m1[0].mean, m2[0].stderr / m2[0].mean)
    assert m2[0].mean / m1[0].mean == pytest.approx(2.0, abs=3 * ratio_se)
    g = estimate_harvest_moments(p, SEP, SpatialModel.ginibre(0.1), n, 2)
    assert abs(g[0].mean - m2[0].mean) < 3 * math.hypot(g[0].stderr, m2[0].stderr)
    exact = expected_harvest(p, SEP, SpatialModel.ppp(0.1)).mean
    assert abs(g[0].mean - exact) < 3 * g[0].stderr
    assert g[1].mean < m2[1].mean - 3 * math.hypot(g[1].stderr, m2[1].stderr)
    var_exact = variance_harvest(p, SEP, SpatialModel.ginibre(0.1))
    assert abs(g[1].mean - var_exact) < 3 * g[1].stderr


@pytest.mark.parametrize("rho", [0.01, 0.05, 0.1])
def test_worst_case_frequency_matches_shifted_hole(rho):
    # the simulated event is "no source within gamma - eps"
    model = SpatialModel.ginibre(rho)
    est = estimate_outage("power", "worst_case", P, SEP, model, n=100_000, master_seed=0)
    exact = hole_probability(critical_radius_power(P, SEP) - P.epsilon, model).value
    assert abs(est.mean - exact) < 3 * est.stderr
    assert est.scenario == "worst_case" and est.n == 100_000


@pytest.mark.parametrize("kind, m, arch", [("power", None, SEP), ("transmission", 3000.0, SEP),
                                           ("transmission", 20.0, Architecture.separated(1)),
                                           ("transmission", 2000.0, Architecture.time_switching(0.6))])
def test_worst_case_dominates_general(kind, m, arch):
    p = P if kind == "power" or m > 100 else P.with_(sink_distance=5.0)
    for model in (SpatialModel.ginibre(0.005), SpatialModel.ppp(0.003)):
        samples = outage_samples(p, arch, model, 10_000, 5)
        worst = outage_indicators(samples, kind, "worst_case", p, arch, m)
        general = outage_indicators(samples, kind, "general", p, arch, m)
        assert np.all(worst >= general)
        assert general.any()


def test_dense_sources_eliminate_outage():
    model = SpatialModel.ppp(1.0)
    for scenario in ("worst_case", "general"):
        assert estimate_outage("power", scenario, P, SEP, model, n=20_000).mean < 1e-3


def test_infeasible_worst_case_transmission_is_one():
    est = estimate_outage("transmission", "worst_case", P, Architecture.time_switching(1.0),
                          SpatialModel.ginibre(0.05), m=100.0, n=100)
    assert est.mean == 1.0 and est.stderr == 0.0
    with pytest.raises(ValidationError):
        estimate_outage("transmission", "general", P, SEP, SpatialModel.ppp(0.05), n=100)


def test_empirical_tau_on_grid():
    model = SpatialModel.ginibre(0.05)
    assert estimate_optimal_tau_empirical(P, model, 2000.0, n=100_000, master_seed=0) == 0.68


def test_empirical_tau_validation():
    model = SpatialModel.ginibre(0.05)
    with pytest.raises(ValidationError):
        estimate_optimal_tau_empirical(P, model, 2000.0, tau_grid=[0.0, 0.5], n=100)
    with pytest.raises(ValidationError):
        estimate_optimal_tau_empirical(P, model, 2000.0, tau_grid=[0.1, 0.2, 0.3], n=100)
    with pytest.raises(ValidationError, match="infeasible"):
        estimate_optimal_tau_empirical(P.with_(sink_distance=5.0), model, 5000.0, n=100, xi=1)
