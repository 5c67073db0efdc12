"""Ambient RF energy harvesting under Ginibre alpha-DPP and Poisson source models."""

from .model import (Architecture, PhysicalParams, SpatialModel, ValidationError, channel_gain,
                    dbm_to_watts, effective_coefficients, watts_to_dbm)
from .pointprocess import (GinibreSpectrum, PointConfiguration, ginibre_eigenvalue, sample_alpha_dpp,
                           sample_ginibre_dpp, sample_ppp, truncation_index)
from .analytic import (BoundResult, MomentResult, aggregate_harvest, critical_radius_power,
                       critical_radius_transmission, expected_harvest, harvest_moments, harvest_rate_point,
                       hole_probability, max_rate, optimal_tau, power_outage_bound, rate_lower_bound,
                       transmission_outage_bound, variance_harvest)
from .montecarlo import (MetricEstimate, estimate_harvest_moments, estimate_optimal_tau_empirical,
                         estimate_outage)

__version__ = "0.1.0"
