import math

import pytest
from hypothesis import given, strategies as st

from ambientrf.model import (Architecture, PhysicalParams, SpatialModel, ValidationError, channel_gain,
                             dbm_to_watts, effective_coefficients, watts_to_dbm)


@pytest.mark.parametrize("dbm, watts", [(0, 1e-3), (-90, 1e-12), (-18, 1.5849e-5), (30, 1.0)])
def test_dbm_to_watts(dbm, watts):
    assert dbm_to_watts(dbm) == pytest.approx(watts, rel=1e-4)


@given(st.floats(-150, 60))
def test_dbm_round_trip(x):
    assert watts_to_dbm(dbm_to_watts(x)) == pytest.approx(x, abs=1e-9)


@pytest.mark.parametrize("d, h0", [(1, 62.5), (5, 0.1), (50, 1e-5)])
def test_channel_gain(d, h0):
    assert channel_gain(d) == pytest.approx(h0, rel=1e-12)


@pytest.mark.parametrize("d", [0.0, -1.0, math.nan])
def test_channel_gain_rejects_bad_distance(d):
    with pytest.raises(ValidationError):
        channel_gain(d)


@given(st.floats(0.1, 1e3), st.floats(1.01, 10))
def test_channel_gain_decreasing(d, k):
    assert channel_gain(k * d) < channel_gain(d)


def test_effective_coefficients():
    assert effective_coefficients(Architecture.separated(0)) == (1, 1, 0)
    assert effective_coefficients(Architecture.time_switching(0.5, 1)) == (0.5, 0.5, 1)
    assert effective_coefficients(Architecture.time_switching(1.0, 0)) == (1, 0, 0)


@pytest.mark.parametrize("tau", [-0.1, 1.1, math.nan])
def test_time_switching_rejects_tau(tau):
    with pytest.raises(ValidationError):
        Architecture.time_switching(tau)


def test_separated_rejects_tau():
    with pytest.raises(ValidationError):
        Architecture("separated", 0.5)


@given(st.floats(0, 1), st.sampled_from([0, 1]))
def test_time_switching_shares_sum_to_one(tau, xi):
    varrho, eta, x = effective_coefficients(Architecture.time_switching(tau, xi))
    assert varrho + eta == pytest.approx(1.0)
    assert x == xi


def test_default_params():
    p = PhysicalParams()
    assert p.P_C == pytest.approx(15.8e-6)
    assert p.sigma2 == pytest.approx(dbm_to_watts(-90))
    assert p.channel == pytest.approx(1e-5)
    assert p.with_(h0=2.0).channel == 2.0
    assert p.with_(sink_distance=5).channel == pytest.approx(0.1)


@pytest.mark.parametrize("field, value", [("beta", 1.5), ("beta", 0.0), ("P_S", -1.0), ("W", 0.0),
                                          ("epsilon", 0.0), ("wavelength", -0.1), ("P_C", math.inf),
                                          ("sigma2", -1e-12), ("sink_distance", 0.0)])
def test_params_validation(field, value):
    with pytest.raises(ValidationError):
        PhysicalParams(**{field: value})


def test_spatial_model():
    g = SpatialModel.ginibre(0.1, 10.0, 2)
    assert g.alpha == -0.5
    assert g.mean_count == pytest.approx(0.1 * math.pi * 100)
    assert SpatialModel.ppp(0.1).alpha == 0.0
    for bad in (dict(rho=0.0), dict(R=-1.0), dict(j=0)):
        with pytest.raises(ValidationError):
            SpatialModel.ginibre(**{"rho": 0.1, "R": 10.0, "j": 1, **bad})
