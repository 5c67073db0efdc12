import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from ambientrf.analytic import count_variance, hole_probability
from ambientrf.model import SpatialModel, ValidationError
from ambientrf.pointprocess import (GinibreSpectrum, PointConfiguration, ginibre_eigenvalue, sample,
                                    sample_alpha_dpp, sample_ginibre_dpp, sample_moduli, sample_ppp,
                                    truncation_index, truncation_index_for_mass)


def quad_eigenvalue(n, a):
    # int_0^a e^-t t^n / n! dt
    val, _ = integrate.quad(lambda t: math.exp(-t + n * math.log(t) - math.lgamma(n + 1)) if t > 0 else 0.0,
                            0, a, limit=200, epsabs=1e-15, epsrel=1e-13)
    return val


# --- eigenvalues ------------------------------------------------------------------

@given(st.floats(1e-6, 1.0), st.floats(0.1, 20.0))
def test_eigenvalue_zero_index(rho, R):
    a = math.pi * rho * R * R
    assert ginibre_eigenvalue(0, rho, R) == pytest.approx(-math.expm1(-a), rel=1e-12)


def test_eigenvalue_against_quadrature():
    rho, R = 0.3, 10.0
    a = math.pi * rho * R * R
    assert ginibre_eigenvalue(5, rho, R) == pytest.approx(quad_eigenvalue(5, a), abs=1e-12)
    assert abs(ginibre_eigenvalue(5, rho, R) - 1.0) < 1e-12


@pytest.mark.parametrize("n, rho, R", [(0, 0.05, 2.0), (3, 0.1, 3.0), (10, 0.05, 10.0), (40, 0.3, 5.0),
                                       (80, 0.3, 10.0), (120, 0.3, 10.0), (2, 1e-3, 1.0)])
def test_eigenvalue_against_mpmath(n, rho, R):
    a = math.pi * rho * R * R
    oracle = float(mpmath.gammainc(n + 1, 0, a, regularized=True))
    assert ginibre_eigenvalue(n, rho, R) == pytest.approx(oracle, rel=1e-10, abs=1e-300)
    if n < 60:
        assert ginibre_eigenvalue(n, rho, R) == pytest.approx(quad_eigenvalue(n, a), rel=1e-8, abs=1e-14)


def test_eigenvalue_limit_large_mass():
    assert ginibre_eigenvalue(3, 10.0, 100.0) == 1.0


@given(st.floats(0.01, 1.0), st.floats(0.5, 10.0))
def test_eigenvalues_decrease_in_index(rho, R):
    lam = ginibre_eigenvalue(np.arange(200), rho, R)
    assert np.all(np.diff(lam) <= 0)
    assert np.all((lam >= 0) & (lam <= 1))


@settings(max_examples=30)
@given(st.floats(0.01, 1.0), st.floats(0.5, 10.0))
def test_trace_equals_mean_count(rho, R):
    spec = GinibreSpectrum.build(rho, R, 1e-14)
    total = math.fsum(spec.eigenvalues)
    assert total <= spec.mass * (1 + 1e-12)
    assert total == pytest.approx(spec.mass, abs=1e-9)


def test_truncation_index_zero_mass():
    assert truncation_index(0.1, 0.0) == 0


def test_truncation_index_scan():
    rho, r, tol = 0.05, 2.74, 1e-12
    a = math.pi * rho * r * r
    N = truncation_index(rho, r, tol)
    lam = [float(mpmath.gammainc(n + 1, 0, a, regularized=True)) for n in range(N + 40)]
    first = next(n for n, v in enumerate(lam) if v < tol)
    assert N == first
    assert lam[N] < tol <= lam[N - 1]


def test_truncation_index_median_tol_grows_linearly():
    for a in (50.0, 200.0, 800.0):
        N = truncation_index_for_mass(a, 0.5)
        assert abs(N - a) <= 2


# --- HKPV sampler ---------------------------------------------------------------

def test_points_inside_disc_and_deterministic():
    a = sample_ginibre_dpp(0.3, 10.0, 7)
    b = sample_ginibre_dpp(0.3, 10.0, 7)
    assert np.array_equal(a.points, b.points)
    assert np.all(a.radii <= 10.0)
    assert abs(len(a) - 94.25) < 15
    assert np.array_equal(sample_alpha_dpp(1, 0.3, 10.0, 7).points, a.points)


def test_hkpv_mean_count():
    model = SpatialModel.ginibre(1.0, 3.0)
    counts = np.array([len(sample(model, s)) for s in range(300)])
    lam = GinibreSpectrum.build(1.0, 3.0).eigenvalues
    sd = math.sqrt(math.fsum(lam * (1 - lam)) / len(counts))
    assert abs(counts.mean() - model.mean_count) < 4 * sd


def _disc_overlap(d, R):
    return 2 * R * R * np.arccos(d / (2 * R)) - 0.5 * d * np.sqrt(4 * R * R - d * d)


def test_hkpv_pair_correlation():
    rho, R = 1.0, 3.0
    model = SpatialModel.ginibre(rho, R)
    edges = np.array([0.0, 0.3, 0.6, 0.9, 1.2])
    per_draw = []
    for s in range(300):
        z = sample(model, 1000 + s).points
        d = np.hypot(*(z[:, None, :] - z[None, :, :]).transpose(2, 0, 1))
        d = d[np.triu_indices(len(z), 1)]
        per_draw.append(2 * np.histogram(d, edges)[0])
    per_draw = np.array(per_draw, float)
    mean, se = per_draw.mean(0), per_draw.std(0, ddof=1) / math.sqrt(len(per_draw))
    for k in range(len(edges) - 1):
        want, _ = integrate.quad(lambda t: rho**2 * 2 * math.pi * t * _disc_overlap(t, R)
                                 * (1 - math.exp(-math.pi * rho * t * t)), edges[k], edges[k + 1])
        assert abs(mean[k] - want) < 4 * se[k] + 1e-9, (k, mean[k], want, se[k])


@pytest.mark.parametrize("j, rho, r", [(1, 0.3, 1.0), (2, 0.3, 1.0)])
def test_hkpv_hole_frequency(j, rho, r):
    model = SpatialModel.ginibre(rho, 3.0, j)
    n = 1500
    holes = np.array([sample(model, s).radii.min(initial=np.inf) > r for s in range(n)])
    p = hole_probability(r, model).value
    assert abs(holes.mean() - p) < 4 * math.sqrt(p * (1 - p) / n)


def test_hkpv_matches_radial_sampler():
    model = SpatialModel.ginibre(0.1, 4.0, 2)
    n = 1000
    hk = np.array([np.sum(sample(model, s).radii ** 2) for s in range(n)])
    rad = np.nansum(sample_moduli(model, 200_000, np.random.default_rng(1)) ** 2, axis=1)
    want = model.rho * math.pi * model.R**4 / 2
    assert abs(rad.mean() - want) < 4 * rad.std() / math.sqrt(len(rad))
    se = math.sqrt(hk.var(ddof=1) / n + rad.var() / len(rad))
    assert abs(hk.mean() - rad.mean()) < 4 * se


def test_degenerate_mass():
    counts = [len(sample_alpha_dpp(2, 1e-9, 1.0, s)) for s in range(200)]
    assert max(counts) <= 2 and sum(counts) == 0


# --- radial sampler ---------------------------------------------------------------

@pytest.mark.parametrize("j", [1, 2, 4])
def test_radial_count_variance_matches_pair_integral(j):
    model = SpatialModel.ginibre(0.2, 5.0, j)
    lam = GinibreSpectrum.build(0.2, 5.0).eigenvalues
    exact = math.fsum(lam * (1 - lam / j))
    assert count_variance(model, 5.0) == pytest.approx(exact, rel=1e-7)
    counts = np.sum(~np.isnan(sample_moduli(model, 200_000, np.random.default_rng(j))), axis=1)
    assert counts.mean() == pytest.approx(model.mean_count, abs=4 * math.sqrt(exact / len(counts)))
    assert counts.var() == pytest.approx(exact, rel=0.03)


def test_count_variance_ordering():
    v = [count_variance(SpatialModel.ginibre(0.1, 10.0, j), 3.0) for j in (1, 2, 8)]
    v.append(count_variance(SpatialModel.ppp(0.1), 3.0))
    assert v[0] < v[1] < v[2] < v[3]
    assert v[3] == pytest.approx(0.1 * math.pi * 9)


def test_radial_sampler_deterministic():
    model = SpatialModel.ginibre(0.3, 10.0, 2)
    a = sample_moduli(model, 100, np.random.default_rng(4))
    b = sample_moduli(model, 100, np.random.default_rng(4))
    assert np.array_equal(a, b, equal_nan=True)
    assert np.nanmax(a) <= 10.0


# --- PPP ---------------------------------------------------------------------

def test_ppp_mean_and_variance():
    rho, R = 0.1, 5.0
    counts = np.array([len(sample_ppp(rho, R, s)) for s in range(4000)])
    a = rho * math.pi * R * R
    assert abs(counts.mean() - a) < 4 * math.sqrt(a / len(counts))
    assert counts.var(ddof=1) == pytest.approx(a, rel=0.1)


def test_ppp_hole_frequency():
    model = SpatialModel.ppp(0.05)
    n = 50_000
    nearest = np.nanmin(np.where(np.isnan(m := sample_moduli(model, n, np.random.default_rng(3))), np.inf, m), 1)
    p = math.exp(-math.pi * 0.05 * 4.0)
    assert abs(np.mean(nearest > 2.0) - p) < 4 * math.sqrt(p * (1 - p) / n)


# --- configurations ----------------------------------------------------------------

def test_csv_round_trip():
    cfg = sample_ginibre_dpp(0.2, 5.0, 11)
    back = PointConfiguration.from_csv(cfg.to_csv())
    assert np.array_equal(back.points, cfg.points)
    assert back.R == cfg.R and back.seed == 11 and back.model == cfg.model


def test_empty_configuration_csv():
    cfg = PointConfiguration(np.empty((0, 2)), 1.0, "ppp", 0)
    assert len(PointConfiguration.from_csv(cfg.to_csv())) == 0


def test_invalid_inputs():
    with pytest.raises(ValidationError):
        sample_ppp(-1.0, 1.0)
    with pytest.raises(ValidationError):
        sample_ginibre_dpp(0.1, 0.0)
