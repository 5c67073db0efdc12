"""Seeded, replication-based Monte Carlo estimation of every metric.

Random streams
--------------
Replications are grouped in fixed blocks of ``BLOCK`` rows.  Block ``b`` draws
from ``PCG64(SeedSequence(master_seed, spawn_key=(b,)))`` and always generates
all ``BLOCK`` rows, so replication ``i`` (row ``i % BLOCK`` of block
``i // BLOCK``) is a pure function of ``(master_seed, i)``.  Distributing the
blocks over any number of workers therefore reproduces the same per-replication
outcomes, and reductions use ``math.fsum`` so aggregates are bit-stable.

For the HKPV sampler each replication gets its own stream,
``SeedSequence(master_seed, spawn_key=(HKPV_KEY, i))``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial
from typing import Callable, Literal, Optional, Sequence

import numpy as np

from .analytic import critical_radius_power, critical_radius_transmission, max_rate
from .model import TIME_SWITCHING, Architecture, PhysicalParams, SpatialModel, ValidationError, \
    effective_coefficients
from .pointprocess import hkpv_moduli, sample_moduli

BLOCK = 4096
HKPV_KEY = 2**31 - 1
DEFAULT_MOMENT_N = 500_000
DEFAULT_OUTAGE_N = 1_000_000

Scenario = Literal["general", "worst_case"]


@dataclass(frozen=True)
class MetricEstimate:
    mean: float
    stderr: float
    n: int
    master_seed: int
    scenario: str = "general"

    def to_record(self) -> dict:
        return asdict(self)


def block_rng(master_seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(block,))))


def replication_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(HKPV_KEY, index))


def _run_block(block: int, stat: Callable, model: SpatialModel, master_seed: int, sampler: str,
               n: int) -> np.ndarray:
    if sampler == "radial":
        moduli = sample_moduli(model, BLOCK, block_rng(master_seed, block))
    elif sampler == "hkpv":
        start = block * BLOCK
        count = min(BLOCK, n - start)
        seeds = [np.random.default_rng(replication_seed(master_seed, start + i)) for i in range(count)]
        moduli = hkpv_moduli(model, count, seeds)
    else:
        raise ValidationError(f"unknown sampler {sampler!r}")
    return stat(moduli)


def replicate(stat: Callable[[np.ndarray], np.ndarray], model: SpatialModel, n: int,
              master_seed: int, workers: int = 1, sampler: str = "radial",
              blocks: Optional[Sequence[int]] = None) -> np.ndarray:
    """Per-replication outcomes ``stat(moduli)`` for replications ``0..n-1``.

    ``stat`` maps a ``(rows, width)`` array of source distances (NaN = no
    source) to one value per row; it must be picklable when ``workers > 1``.
    """
    if n < 1:
        raise ValidationError("need at least one replication")
    nblocks = -(-n // BLOCK)
    todo = list(range(nblocks)) if blocks is None else list(blocks)
    run = partial(_run_block, stat=stat, model=model, master_seed=master_seed, sampler=sampler, n=n)
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, todo))
    else:
        parts = [run(b) for b in todo]
    out = np.concatenate(parts, axis=0)
    return out[:n] if blocks is None else out


# --- per-row statistics (module level so they pickle) --------------------------

def harvest_stat(moduli: np.ndarray, scale: float, epsilon: float) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        return scale * np.nansum(1.0 / (epsilon + moduli) ** 2, axis=1)


def nearest_stat(moduli: np.ndarray) -> np.ndarray:
    filled = np.where(np.isnan(moduli), np.inf, moduli)
    return filled.min(axis=1) if filled.shape[1] else np.full(len(filled), np.inf)


def _harvest_fn(params: PhysicalParams, arch: Architecture):
    varrho, _, _ = effective_coefficients(arch)
    return partial(harvest_stat, scale=varrho * params.friis_constant, epsilon=params.epsilon)


def mean_estimate(x: np.ndarray, master_seed: int, scenario: str = "general") -> MetricEstimate:
    n = len(x)
    if n < 2:
        raise ValidationError("need n >= 2 for a standard error")
    mean = math.fsum(x) / n
    var = math.fsum((x - mean) ** 2) / (n - 1)
    return MetricEstimate(mean, math.sqrt(var / n), n, master_seed, scenario)


def variance_estimate(x: np.ndarray, master_seed: int) -> MetricEstimate:
    """Unbiased sample variance; standard error from the fourth central moment."""
    n = len(x)
    mean = math.fsum(x) / n
    d2 = (x - mean) ** 2
    s2 = math.fsum(d2) / (n - 1)
    m2 = math.fsum(d2) / n
    m4 = math.fsum(d2 * d2) / n
    var_s2 = max(m4 - (n - 3) / (n - 1) * m2 * m2, 0.0) / n
    return MetricEstimate(s2, math.sqrt(var_s2), n, master_seed, "general")


def frequency_estimate(flags: np.ndarray, master_seed: int, scenario: str) -> MetricEstimate:
    n = len(flags)
    if n < 2:
        raise ValidationError("need n >= 2 for a standard error")
    p = int(np.count_nonzero(flags)) / n
    return MetricEstimate(p, math.sqrt(p * (1 - p) / n), n, master_seed, scenario)


# --- estimators ---------------------------------------------------------------

def sample_harvest(params, arch, model, n, master_seed, workers=1, sampler="radial") -> np.ndarray:
    """Aggregate harvested power of replications ``0..n-1``."""
    return replicate(_harvest_fn(params, arch), model, n, master_seed, workers, sampler)


def estimate_harvest_moments(params: PhysicalParams, arch: Architecture, model: SpatialModel,
                             n: int = DEFAULT_MOMENT_N, master_seed: int = 0, workers: int = 1,
                             sampler: str = "radial") -> tuple[MetricEstimate, MetricEstimate]:
    x = sample_harvest(params, arch, model, n, master_seed, workers, sampler)
    return mean_estimate(x, master_seed), variance_estimate(x, master_seed)


def _both_stat(moduli, harvest):
    return np.column_stack([harvest(moduli), nearest_stat(moduli)])


def outage_samples(params, arch, model, n, master_seed, workers=1, sampler="radial") -> np.ndarray:
    """``(n, 2)`` array of (harvested power, nearest-source distance) per replication."""
    stat = partial(_both_stat, harvest=_harvest_fn(params, arch))
    return replicate(stat, model, n, master_seed, workers, sampler)


def outage_indicators(samples: np.ndarray, kind: str, scenario: Scenario, params: PhysicalParams,
                      arch: Architecture, m: Optional[float] = None) -> np.ndarray:
    """Per-replication outage flags from :func:`outage_samples` output."""
    P_H, nearest = samples[:, 0], samples[:, 1]
    if kind == "power":
        if scenario == "general":
            return P_H < params.P_C
        radius = critical_radius_power(params, arch)
    elif kind == "transmission":
        if m is None:
            raise ValidationError("transmission outage needs a rate requirement m")
        if scenario == "general":
            return max_rate(P_H, params, arch) < m
        radius = critical_radius_transmission(params, arch, m)
        if radius is None:
            return np.ones(len(P_H), dtype=bool)
    else:
        raise ValidationError(f"unknown outage kind {kind!r}")
    if scenario != "worst_case":
        raise ValidationError(f"unknown scenario {scenario!r}")
    return nearest >= max(radius - params.epsilon, 0.0)


def estimate_outage(kind: str, scenario: Scenario, params: PhysicalParams, arch: Architecture,
                    model: SpatialModel, m: Optional[float] = None, n: int = DEFAULT_OUTAGE_N,
                    master_seed: int = 0, workers: int = 1, sampler: str = "radial") -> MetricEstimate:
    """Empirical power or transmission outage frequency with its binomial standard error."""
    if kind == "transmission" and m is None:
        raise ValidationError("transmission outage needs a rate requirement m")
    if kind == "transmission" and scenario == "worst_case" \
            and critical_radius_transmission(params, arch, m) is None:
        return MetricEstimate(1.0, 0.0, n, master_seed, scenario)
    if scenario == "worst_case":
        x = replicate(nearest_stat, model, n, master_seed, workers, sampler)
        samples = np.column_stack([np.zeros_like(x), x])
    else:
        samples = outage_samples(params, arch, model, n, master_seed, workers, sampler)
    flags = outage_indicators(samples, kind, scenario, params, arch, m)
    return frequency_estimate(flags, master_seed, scenario)


def tau_outage_curve(params: PhysicalParams, model: SpatialModel, m: float, tau_grid, n: int,
                     master_seed: int = 0, xi: int = 0, workers: int = 1,
                     sampler: str = "radial") -> np.ndarray:
    """Worst-case transmission outage frequency for each tau, on common random numbers."""
    nearest = replicate(nearest_stat, model, n, master_seed, workers, sampler)
    out = []
    for tau in tau_grid:
        radius = critical_radius_transmission(params, Architecture(TIME_SWITCHING, float(tau), xi), m)
        if radius is None:
            out.append(1.0)
        else:
            out.append(np.count_nonzero(nearest >= max(radius - params.epsilon, 0.0)) / n)
    return np.asarray(out)


def estimate_optimal_tau_empirical(params: PhysicalParams, model: SpatialModel, m: float,
                                   tau_grid=None, n: int = 100_000, master_seed: int = 0,
                                   xi: int = 0, workers: int = 1) -> float:
    """Grid value of tau with the lowest simulated worst-case transmission outage."""
    if tau_grid is None:
        tau_grid = np.round(np.arange(0.02, 1.0, 0.02), 10)
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.size < 2 or np.any((tau_grid <= 0) | (tau_grid >= 1)):
        raise ValidationError("tau grid must lie inside (0, 1)")
    if np.max(np.diff(np.sort(tau_grid))) > 0.02 + 1e-12:
        raise ValidationError("tau grid step must be <= 0.02")
    curve = tau_outage_curve(params, model, m, tau_grid, n, master_seed, xi, workers)
    if np.all(curve >= 1.0):
        raise ValidationError("rate requirement infeasible: outage is 1 over the whole grid")
    return float(tau_grid[int(np.argmin(curve))])
