"""Closed forms and bounds for the ambient-RF-powered sensor.

All functions take SI inputs.  ``model`` is a :class:`~ambientrf.model.SpatialModel`;
its ``alpha`` is ``-1/j`` for the Ginibre family and 0 for the PPP.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import special

from ._optimize import golden_max
from .model import Architecture, PhysicalParams, SpatialModel, ValidationError, effective_coefficients
from .pointprocess import DEFAULT_TOL, PointConfiguration, truncation_index_for_mass
from .quadrature import QuadResult, QuadratureError, adaptive_gl_2d, graded_breaks

MAX_RESIDUAL = 1e-9
VARIANCE_REL_TOL = 1e-3


class InfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class BoundResult:
    value: float
    truncation_N: int
    truncation_residual: float
    critical_radius: Optional[float]

    def to_record(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MomentResult:
    mean: float
    variance: float
    approx_mean: float
    quadrature_error_estimate: float

    def to_record(self) -> dict:
        return asdict(self)


class HarvestMean(NamedTuple):
    mean: float
    approx_mean: float


class RateBound(NamedTuple):
    value: float
    argmax_M: float


# --- harvested power and achievable rate -------------------------------------

def harvest_rate_point(distance_norm, params: PhysicalParams, arch: Architecture):
    """Friis power harvested from a source at ``distance_norm`` metres (vectorised)."""
    varrho, _, _ = effective_coefficients(arch)
    d = params.epsilon + np.asarray(distance_norm, dtype=float)
    out = varrho * params.friis_constant / d**2
    return float(out) if out.ndim == 0 else out


def aggregate_harvest(config, params: PhysicalParams, arch: Architecture) -> float:
    """Total harvested power; ``config`` is a :class:`PointConfiguration` or an array of radii."""
    radii = config.radii if isinstance(config, PointConfiguration) else np.asarray(config, float)
    return math.fsum(np.atleast_1d(harvest_rate_point(radii, params, arch)))


def max_rate(P_H, params: PhysicalParams, arch: Architecture):
    """Achievable rate in bit/s for aggregate harvested power ``P_H`` (vectorised)."""
    _, eta, xi = effective_coefficients(arch)
    P_H = np.asarray(P_H, dtype=float)
    if eta == 0:
        out = np.zeros_like(P_H)
    else:
        snr = params.channel * np.maximum(P_H - params.P_C, 0.0) / (eta * (xi * P_H + params.sigma2))
        out = eta * params.W * np.log2(1.0 + snr)
    return float(out) if out.ndim == 0 else out


# --- moments --------------------------------------------------------------------

def _radial_integral(eps, R):
    # int_0^R r / (eps + r)^2 dr
    return eps / (R + eps) + math.log(R + eps) - 1.0 - math.log(eps)


def expected_harvest(params: PhysicalParams, arch: Architecture, model: SpatialModel) -> HarvestMean:
    """Exact mean harvested power and its small-epsilon approximation; independent of alpha."""
    varrho, _, _ = effective_coefficients(arch)
    k = varrho * params.friis_constant
    eps, R, rho = params.epsilon, model.R, model.rho
    mean = 2 * math.pi * k * rho * _radial_integral(eps, R)
    approx = rho * varrho * params.beta * params.P_S * params.G_S * params.G_H * params.wavelength**2 \
        / (8 * math.pi) * math.log(R / eps)
    return HarvestMean(mean, approx)


def _pair_integrand(rho, eps):
    c = math.pi * rho

    def f(r, s):
        return (4 * math.pi**2 * r * s * np.exp(-c * (r - s) ** 2) * special.i0e(2 * c * r * s)
                / ((eps + r) ** 2 * (eps + s) ** 2))
    return f


def pair_integral(rho: float, eps: float, R: float, rel_tol: float = 1e-8,
                  weight: str = "friis") -> QuadResult:
    """Integral of ``exp(-pi rho |x-y|^2) w(x) w(y)`` over ``B(0,R)^2``.

    ``weight='friis'`` uses ``w(x) = (eps + |x|)^-2``; ``weight='unit'`` uses
    ``w = 1`` (the count-covariance integral).  Rotational symmetry reduces the
    4-D integral to ``(2 pi)^2 int int r s exp(-pi rho (r^2+s^2)) I0(2 pi rho r s)``,
    evaluated with the exponentially scaled Bessel function.
    """
    if weight == "friis":
        f = _pair_integrand(rho, eps)
        scale = eps
    elif weight == "unit":
        c = math.pi * rho

        def f(r, s):
            return 4 * math.pi**2 * r * s * np.exp(-c * (r - s) ** 2) * special.i0e(2 * c * r * s)
        scale = R
    else:
        raise ValueError(f"unknown weight {weight!r}")
    breaks = graded_breaks(R, scale, ridge=0.5 / math.sqrt(math.pi * rho))
    coarse = adaptive_gl_2d(f, breaks, breaks, abs_tol=math.inf)
    return adaptive_gl_2d(f, breaks, breaks, abs_tol=rel_tol * abs(coarse.value))


def _variance_parts(params, arch, model):
    varrho, _, _ = effective_coefficients(arch)
    k2 = (varrho * params.friis_constant) ** 2
    eps, R, rho = params.epsilon, model.R, model.rho
    first = 2 * math.pi * rho * (1 / (6 * eps**2) - (3 * R + eps) / (6 * (R + eps) ** 3))
    return k2, first


def variance_harvest(params: PhysicalParams, arch: Architecture, model: SpatialModel,
                     return_error: bool = False):
    """Variance of the harvested power.

    Raises :class:`QuadratureError` when the pair-integral error estimate
    exceeds ``VARIANCE_REL_TOL`` times the Poisson term.
    """
    k2, first = _variance_parts(params, arch, model)
    alpha = model.alpha
    if alpha == 0:
        var, err = k2 * first, 0.0
    else:
        q = pair_integral(model.rho, params.epsilon, model.R)
        scale = abs(alpha) * model.rho**2
        if q.error * scale > VARIANCE_REL_TOL * first:
            raise QuadratureError(f"pair integral error {q.error:.3g} above tolerance")
        var = k2 * (first + alpha * model.rho**2 * q.value)
        err = k2 * scale * q.error
    return (var, err) if return_error else var


def harvest_moments(params: PhysicalParams, arch: Architecture, model: SpatialModel) -> MomentResult:
    mean, approx = expected_harvest(params, arch, model)
    var, err = variance_harvest(params, arch, model, return_error=True)
    return MomentResult(mean, var, approx, err)


def count_variance(model: SpatialModel, r: float) -> float:
    """Variance of the number of points in ``B(0, min(r, R))``."""
    b = min(r, model.R)
    mean = model.rho * math.pi * b * b
    if model.alpha == 0:
        return mean
    q = pair_integral(model.rho, 0.0, b, weight="unit")
    return mean + model.alpha * model.rho**2 * q.value


# --- hole probabilities and outage bounds -----------------------------------------

def log_fredholm(alpha: float, mass: float, tol: float = DEFAULT_TOL) -> tuple[float, int, float]:
    """``log prod_n (1 + alpha P(n+1, mass))^(-1/alpha)`` with truncation index and residual."""
    if alpha == 0:
        return -mass, 0, 0.0
    if mass <= 0:
        return 0.0, 0, 0.0
    N = truncation_index_for_mass(mass, tol)
    n = np.arange(N) + 1.0
    if alpha == -1.0:
        terms = np.log(special.gammaincc(n, mass))
    else:
        terms = np.log1p(alpha * special.gammainc(n, mass))
    tail = special.gammainc(np.arange(N, N + 64) + 1.0, mass)
    residual = math.fsum(tail) / abs(alpha)
    return -math.fsum(terms) / alpha, N, residual


def hole_probability(r: float, model: SpatialModel, tol: float = DEFAULT_TOL) -> BoundResult:
    """Probability that ``B(0, r)`` holds no source (``r`` is clipped to ``R``)."""
    if r < 0:
        raise ValidationError("radius must be non-negative")
    b = min(r, model.R)
    mass = math.pi * model.rho * b * b
    logp, N, residual = log_fredholm(model.alpha, mass, tol)
    if residual >= MAX_RESIDUAL:
        raise ArithmeticError(f"Fredholm truncation residual {residual:.3g} too large")
    return BoundResult(min(math.exp(logp), 1.0), N, residual, r)


def critical_radius_power(params: PhysicalParams, arch: Architecture) -> float:
    varrho, _, _ = effective_coefficients(arch)
    return params.wavelength / (4 * math.pi) * math.sqrt(
        varrho * params.beta * params.P_S * params.G_S * params.G_H / params.P_C)


def _rate_excess(m, eta, W):
    # 2^(m/(eta W)) - 1 without cancellation; inf on overflow
    if m == 0:
        return 0.0
    if eta == 0:
        return math.inf
    x = m * math.log(2.0) / (eta * W)
    return math.expm1(x) if x < 700 else math.inf


def critical_radius_transmission(params: PhysicalParams, arch: Architecture, m: float) -> Optional[float]:
    """Critical radius for rate ``m`` (bit/s); ``None`` when no single source can meet it."""
    if m < 0:
        raise ValidationError("rate requirement must be non-negative")
    varrho, eta, xi = effective_coefficients(arch)
    if eta == 0 and m > 0:
        return None
    q1 = _rate_excess(m, eta, params.W)
    h0 = params.channel
    num_gain = h0 - eta * xi * q1 if xi else h0
    if not num_gain > 0:
        return None
    den = params.P_C * h0 + eta * params.sigma2 * q1
    if math.isinf(den):
        return 0.0
    return params.wavelength / (4 * math.pi) * math.sqrt(
        params.P_S * varrho * params.beta * params.G_S * params.G_H * num_gain / den)


def _check_epsilon(params, radius):
    if radius is not None and radius > 0 and not params.epsilon < radius / 10:
        warnings.warn(f"epsilon={params.epsilon} is not small against the critical radius "
                      f"{radius:.4g}; the worst-case bound may not hold", RuntimeWarning, stacklevel=3)


def power_outage_bound(params: PhysicalParams, arch: Architecture, model: SpatialModel) -> BoundResult:
    gamma = critical_radius_power(params, arch)
    _check_epsilon(params, gamma)
    return hole_probability(gamma, model)


def transmission_outage_bound(params: PhysicalParams, arch: Architecture, model: SpatialModel,
                              m: float) -> BoundResult:
    gamma_m = critical_radius_transmission(params, arch, m)
    if gamma_m is None:
        return BoundResult(1.0, 0, 0.0, None)
    _check_epsilon(params, gamma_m)
    return hole_probability(gamma_m, model)


# --- optimal time-switching coefficient ---------------------------------------

def tau_objective_log(tau, params: PhysicalParams, m: float, xi: int):
    """Log of the squared quantity maximised by tau*; ``-inf`` where infeasible (vectorised)."""
    tau = np.asarray(tau, dtype=float)
    e = 1.0 - tau
    h0 = params.channel
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        x = m * math.log(2.0) / (e * params.W)
        q1 = np.expm1(np.minimum(x, 700.0))
        q1 = np.where(x >= 700.0, np.inf, q1)
        num = tau * (h0 - e * xi * q1) if xi else tau * h0 + 0.0 * q1
        den = params.P_C * h0 + e * params.sigma2 * q1
        out = np.where((num > 0) & np.isfinite(den) & (tau > 0) & (tau < 1),
                       np.log(np.where(num > 0, num, 1.0)) - np.log(den), -np.inf)
    return float(out) if out.ndim == 0 else out


def optimal_tau(params: PhysicalParams, m: float, xi: int = 0, step: float = 0.005,
                tol: float = 1e-6) -> float:
    """Time-switching share minimising the worst-case transmission outage bound.

    Coarse grid over ``(0, 1)`` followed by golden-section refinement around the
    best grid point.  The optimiser depends on ``h0, xi, m, W, P_C, sigma2`` only.
    """
    if not m > 0:
        raise ValidationError("rate requirement m must be > 0")
    grid = np.arange(step, 1.0, step)
    vals = tau_objective_log(grid, params, m, xi)
    if not np.any(np.isfinite(vals)):
        raise InfeasibleError("rate requirement infeasible for all tau")
    i = int(np.argmax(vals))
    lo = grid[i - 1] if i > 0 else 1e-12
    hi = grid[i + 1] if i + 1 < len(grid) else 1.0 - 1e-12
    tau, _ = golden_max(lambda t: tau_objective_log(t, params, m, xi), lo, hi, tol=tol)
    return float(tau)


# --- expected-rate lower bound -----------------------------------------------

def rate_lower_bound(params: PhysicalParams, arch: Architecture, model: SpatialModel,
                     m_lo: Optional[float] = None, m_hi: Optional[float] = None,
                     points: int = 400) -> RateBound:
    """``sup_M M (1 - transmission outage bound at M)`` by log grid plus golden section."""

    def g(M):
        return M * (1.0 - transmission_outage_bound(params, arch, model, M).value)

    m_lo = m_lo or params.W * 1e-4
    m_hi = m_hi or params.W * 1e3
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        logs = np.linspace(math.log(m_lo), math.log(m_hi), points)
        vals = np.array([g(math.exp(x)) for x in logs])
        if not np.any(vals > 0):
            return RateBound(0.0, math.nan)
        i = int(np.argmax(vals))
        lo = logs[max(i - 1, 0)]
        hi = logs[min(i + 1, points - 1)]
        x, best = golden_max(lambda x: g(math.exp(x)), lo, hi, tol=1e-10)
    if best < vals[i]:
        x, best = logs[i], vals[i]
    return RateBound(float(best), float(math.exp(x)))
