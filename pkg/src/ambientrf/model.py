"""Physical parameters, receiver architectures and spatial models.

Everything is stored in SI units (W, m, Hz, bit/s). dBm and kbps only
appear in the helper converters and at the command-line / config boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Literal, Optional

SEPARATED = "separated"
TIME_SWITCHING = "time_switching"
GINIBRE = "ginibre"
PPP = "ppp"


class ValidationError(ValueError):
    """Raised for physically meaningless or malformed inputs."""


def dbm_to_watts(x):
    return 10.0 ** ((x - 30.0) / 10.0)


def watts_to_dbm(p):
    return 10.0 * math.log10(p) + 30.0


def channel_gain(d: float) -> float:
    """Sensor-to-sink channel gain ``62.5 * d**-4``."""
    if not d > 0:
        raise ValidationError(f"sink distance must be positive, got {d!r}")
    return 62.5 / d**4


@dataclass(frozen=True)
class PhysicalParams:
    """Radio and circuit constants of the sensor and the ambient sources.

    ``h0`` overrides the channel gain derived from ``sink_distance`` when
    both are given.
    """

    P_S: float = 1.0
    G_S: float = 1.5
    G_H: float = 1.5
    wavelength: float = 0.167
    beta: float = 0.3
    P_C: float = 15.8e-6
    sigma2: float = 1e-12
    W: float = 1000.0
    epsilon: float = 0.01
    sink_distance: float = 50.0
    h0: Optional[float] = None

    def __post_init__(self):
        for name in ("P_S", "G_S", "G_H", "wavelength", "P_C", "sigma2", "W",
                     "epsilon", "sink_distance"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be finite and > 0, got {value!r}")
        if not 0 < self.beta <= 1:
            raise ValidationError(f"beta must lie in (0, 1], got {self.beta!r}")
        if self.h0 is not None and not (math.isfinite(self.h0) and self.h0 > 0):
            raise ValidationError(f"h0 must be finite and > 0, got {self.h0!r}")

    @property
    def channel(self) -> float:
        """Effective channel gain h0."""
        if self.h0 is not None:
            return self.h0
        return channel_gain(self.sink_distance)

    @property
    def friis_constant(self) -> float:
        """``beta P_S G_S G_H lambda**2 / (4 pi)**2``, the per-source gain at unit distance."""
        return self.beta * self.P_S * self.G_S * self.G_H * self.wavelength**2 / (4 * math.pi) ** 2

    def with_(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class Architecture:
    kind: Literal["separated", "time_switching"] = SEPARATED
    tau: Optional[float] = None
    xi: int = 0

    def __post_init__(self):
        if self.kind not in (SEPARATED, TIME_SWITCHING):
            raise ValidationError(f"unknown architecture {self.kind!r}")
        if self.xi not in (0, 1):
            raise ValidationError(f"xi must be 0 or 1, got {self.xi!r}")
        if self.kind == TIME_SWITCHING:
            if self.tau is None or not 0 <= self.tau <= 1:
                raise ValidationError(f"time-switching tau must lie in [0, 1], got {self.tau!r}")
        elif self.tau is not None:
            raise ValidationError("tau is only meaningful for the time-switching architecture")

    @classmethod
    def separated(cls, xi: int = 0) -> "Architecture":
        return cls(SEPARATED, None, xi)

    @classmethod
    def time_switching(cls, tau: float, xi: int = 0) -> "Architecture":
        return cls(TIME_SWITCHING, tau, xi)


def effective_coefficients(arch: Architecture) -> tuple[float, float, int]:
    """Return ``(varrho, eta, xi)``: harvesting share, transmission share, band flag."""
    if arch.kind == SEPARATED:
        return 1.0, 1.0, arch.xi
    tau = float(arch.tau)
    if not 0 <= tau <= 1:
        raise ValidationError(f"tau must lie in [0, 1], got {tau!r}")
    return tau, 1.0 - tau, arch.xi


@dataclass(frozen=True)
class SpatialModel:
    """Point process of the ambient sources on the disc ``B(0, R)``.

    ``kind='ginibre'`` is the Ginibre alpha-DPP with ``alpha = -1/j``;
    ``kind='ppp'`` is the homogeneous Poisson process (the ``j -> inf`` limit).
    """

    kind: Literal["ginibre", "ppp"] = GINIBRE
    rho: float = 0.1
    R: float = 10.0
    j: int = 1

    def __post_init__(self):
        if self.kind not in (GINIBRE, PPP):
            raise ValidationError(f"unknown spatial model {self.kind!r}")
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise ValidationError(f"rho must be finite and > 0, got {self.rho!r}")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ValidationError(f"R must be finite and > 0, got {self.R!r}")
        if int(self.j) != self.j or self.j < 1:
            raise ValidationError(f"j must be a positive integer, got {self.j!r}")

    @classmethod
    def ginibre(cls, rho: float, R: float = 10.0, j: int = 1) -> "SpatialModel":
        return cls(GINIBRE, rho, R, int(j))

    @classmethod
    def ppp(cls, rho: float, R: float = 10.0) -> "SpatialModel":
        return cls(PPP, rho, R, 1)

    @property
    def alpha(self) -> float:
        return 0.0 if self.kind == PPP else -1.0 / self.j

    @property
    def mean_count(self) -> float:
        return self.rho * math.pi * self.R**2

    def with_(self, **changes) -> "SpatialModel":
        return replace(self, **changes)

    def label(self) -> str:
        return "ppp" if self.kind == PPP else f"ginibre(j={self.j})"


PARAM_FIELDS = tuple(f.name for f in fields(PhysicalParams))
