"""Ginibre spectrum and exact samplers for Ginibre alpha-DPPs and the PPP on a disc.

Two samplers are provided for the Ginibre family:

* :func:`sample_ginibre_dpp` / :func:`sample_alpha_dpp` draw full planar
  configurations with the sequential Gram-Schmidt (HKPV) algorithm.
* :func:`sample_alpha_dpp_moduli` draws only the distances to the origin.
  Every kernel eigenfunction is a monomial ``z**n`` times a radial weight, so
  the set of moduli of the restricted Ginibre process is a set of independent
  variables: index ``n`` contributes ``sqrt(G_n / (pi rho))`` with
  ``G_n ~ Gamma(n + 1)`` whenever ``G_n <= pi rho R**2``.  This is exact for
  any functional of the moduli (harvested power, nearest-source distance,
  counts in centred discs) and is what the Monte Carlo engine uses by default.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import special

from .model import PPP, SpatialModel, ValidationError

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-14
DEGENERATE_MASS = 1e-6
GRID_SIZE = 64
ENVELOPE_SAFETY = 1.2
MAX_REJECTIONS = 100_000


class SamplerError(RuntimeError):
    """The rejection sampler could not place a point; indicates an envelope bug."""


def _check(rho, R):
    if not (rho > 0 and R > 0):
        raise ValidationError(f"rho and R must be positive, got rho={rho!r}, R={R!r}")


def ginibre_eigenvalue(n, rho: float, R: float):
    """Eigenvalue ``P(n + 1, pi rho R**2)`` of the Ginibre kernel restricted to ``B(0, R)``.

    Accepts an integer or an integer array for ``n``.
    """
    _check(rho, R)
    n = np.asarray(n)
    if np.any(n < 0):
        raise ValidationError("eigenvalue index must be >= 0")
    value = special.gammainc(n + 1.0, math.pi * rho * R**2)
    return float(value) if value.ndim == 0 else value


def _eigenvalues_for_mass(a: float, count: int) -> np.ndarray:
    return special.gammainc(np.arange(count) + 1.0, a)


def truncation_index_for_mass(a: float, tol: float = DEFAULT_TOL) -> int:
    """Smallest ``N`` with ``P(N + 1, a) < tol`` for the mass ``a = pi rho r**2``."""
    if not 0 < tol < 1:
        raise ValidationError(f"tol must lie in (0, 1), got {tol!r}")
    if a <= 0:
        return 0
    upper = int(math.ceil(a + 10.0 * math.sqrt(a) + 20.0))
    while special.gammainc(upper + 1.0, a) >= tol:
        upper *= 2
    lam = _eigenvalues_for_mass(a, upper + 1)
    return int(np.argmax(lam < tol))


def truncation_index(rho: float, r: float, tol: float = DEFAULT_TOL) -> int:
    """Number of Ginibre eigenvalues on ``B(0, r)`` that are ``>= tol``."""
    if rho < 0 or r < 0:
        raise ValidationError("rho and r must be non-negative")
    return truncation_index_for_mass(math.pi * rho * r * r, tol)


@dataclass(frozen=True)
class GinibreSpectrum:
    """Truncated spectrum of the Ginibre kernel on ``B(0, R)``."""

    rho: float
    R: float
    N: int
    eigenvalues: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, rho: float, R: float, tol: float = DEFAULT_TOL) -> "GinibreSpectrum":
        _check(rho, R)
        a = math.pi * rho * R * R
        N = truncation_index_for_mass(a, tol)
        return cls(rho, R, N, _eigenvalues_for_mass(a, N))

    @property
    def mass(self) -> float:
        return math.pi * self.rho * self.R**2

    def log_abs_eigenfunctions(self, r: np.ndarray, indices: np.ndarray) -> np.ndarray:
        """``log |phi_n(z)|`` for ``|z| = r``; shape ``r.shape + (len(indices),)``."""
        r = np.asarray(r, dtype=float)[..., None]
        n = np.asarray(indices, dtype=float)
        lam = self.eigenvalues[np.asarray(indices)]
        with np.errstate(divide="ignore", invalid="ignore"):
            log_rz = np.where(n > 0, n * np.log(math.sqrt(math.pi * self.rho) * r), 0.0)
        return (0.5 * math.log(self.rho) - 0.5 * np.log(lam) - 0.5 * special.gammaln(n + 1.0)
                - 0.5 * math.pi * self.rho * r * r + log_rz)

    def eigenfunctions(self, z: np.ndarray, indices: np.ndarray) -> np.ndarray:
        """Orthonormal eigenfunctions ``phi_n`` of the restricted kernel evaluated at complex ``z``."""
        z = np.asarray(z, dtype=complex)
        mag = np.exp(self.log_abs_eigenfunctions(np.abs(z), indices))
        phase = np.exp(1j * np.angle(z)[..., None] * np.asarray(indices, dtype=float))
        return mag * phase


@dataclass
class PointConfiguration:
    """One realisation of sources inside the closed disc ``B(0, R)``."""

    points: np.ndarray
    R: float
    model: str = ""
    seed: Optional[int] = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)

    def __len__(self):
        return len(self.points)

    @property
    def radii(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# model={self.model} seed={self.seed} R={self.R!r} count={len(self)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y"])
        for x, y in self.points:
            writer.writerow([repr(float(x)), repr(float(y))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PointConfiguration":
        lines = text.splitlines()
        meta = {}
        if lines and lines[0].startswith("#"):
            for item in lines[0][1:].split():
                key, _, value = item.partition("=")
                meta[key] = value
        lines = [ln for ln in lines if not ln.startswith("#")]
        rows = list(csv.reader(lines))
        if not rows or rows[0] != ["x", "y"]:
            raise ValueError("expected an 'x,y' header row")
        pts = np.array([[float(x), float(y)] for x, y in rows[1:]]).reshape(-1, 2)
        seed = meta.get("seed")
        return cls(pts, float(meta.get("R", "nan")), meta.get("model", ""),
                   None if seed in (None, "None") else int(seed))


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _uniform_disc(rng, R, size):
    r = R * np.sqrt(rng.random(size))
    theta = 2 * math.pi * rng.random(size)
    return r * np.exp(1j * theta)


class _ProjectionSampler:
    """Sequential HKPV sampler for the projection DPP spanned by ``phi_n, n in indices``.

    The density of the next point is ``(|v(z)|^2 - sum_l |<e_l, v(z)>|^2) / (k - i)``
    with ``v(z) = (phi_n(z))_n`` and ``e_l`` the Gram-Schmidt basis of the points
    already placed.  Points are proposed uniformly on the disc and accepted
    against an envelope read off a polar grid.
    """

    def __init__(self, spectrum: GinibreSpectrum, indices: np.ndarray, rng):
        self.spec = spectrum
        self.idx = np.asarray(indices)
        self.rng = rng
        R = spectrum.R
        # cell-centred polar grid, plus the origin and the rim
        radii = np.concatenate([[0.0], (np.arange(GRID_SIZE) + 0.5) * R / GRID_SIZE, [R]])
        angles = (np.arange(GRID_SIZE) + 0.5) * 2 * math.pi / GRID_SIZE
        self.grid = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
        self.grid_v = spectrum.eigenfunctions(self.grid, self.idx)
        self.grid_res = np.sum(np.abs(self.grid_v) ** 2, axis=1)
        self.basis: list[np.ndarray] = []
        self.area = math.pi * R * R

    def _residual(self, v):
        res = np.sum(np.abs(v) ** 2, axis=-1)
        for e in self.basis:
            res = res - np.abs(v @ e.conj()) ** 2
        return np.maximum(res, 0.0)

    def draw(self) -> np.ndarray:
        k = len(self.idx)
        out = np.empty(k, dtype=complex)
        for i in range(k):
            remaining = k - i
            # densities w.r.t. Lebesgue measure; proposal density is 1/area
            envelope = ENVELOPE_SAFETY * self.grid_res.max() / remaining * self.area
            out[i] = self._accept(envelope, remaining)
            v = self.spec.eigenfunctions(out[i], self.idx)
            for e in self.basis:
                v = v - (v @ e.conj()) * e
            norm = np.linalg.norm(v)
            if norm == 0:
                raise SamplerError("Gram-Schmidt produced a null vector")
            e_new = v / norm
            self.basis.append(e_new)
            self.grid_res = np.maximum(self.grid_res - np.abs(self.grid_v @ e_new.conj()) ** 2, 0.0)
        return out

    def _accept(self, envelope, remaining):
        batch = 64
        tried = 0
        while tried < MAX_REJECTIONS:
            z = _uniform_disc(self.rng, self.spec.R, batch)
            u = self.rng.random(batch)
            dens = self._residual(self.spec.eigenfunctions(z, self.idx)) / remaining * self.area
            ratio = dens / envelope
            if ratio.max() > 1.0:
                log.warning("HKPV envelope exceeded (ratio %.3f); enlarging", ratio.max())
                envelope = ENVELOPE_SAFETY * dens.max()
                continue
            hits = np.flatnonzero(u < ratio)
            if hits.size:
                return z[hits[0]]
            tried += batch
        raise SamplerError(f"no point accepted after {MAX_REJECTIONS} proposals")


def _degenerate(R, m, rng):
    # pi rho R^2 below DEGENERATE_MASS: at most one point per copy, phi_0 is ~uniform
    lam0 = special.gammainc(1.0, m.mean_count) / m.j
    k = int(np.sum(rng.random(m.j) < lam0))
    z = _uniform_disc(rng, R, k)
    return z


def _draw_hkpv(m: SpatialModel, spectrum: GinibreSpectrum, rng) -> np.ndarray:
    chunks = []
    for _ in range(m.j):
        selected = np.flatnonzero(rng.random(spectrum.N) < spectrum.eigenvalues / m.j)
        if selected.size:
            chunks.append(_ProjectionSampler(spectrum, selected, rng).draw())
    return np.concatenate(chunks) if chunks else np.empty(0, dtype=complex)


def _to_config(z, m: SpatialModel, seed) -> PointConfiguration:
    z = np.asarray(z, dtype=complex)
    # clip float noise just outside the rim
    r = np.abs(z)
    z = np.where(r > m.R, z * (m.R / np.maximum(r, m.R)), z)
    return PointConfiguration(np.column_stack([z.real, z.imag]), m.R, m.label(),
                              seed if isinstance(seed, (int, np.integer)) else None)


def sample_alpha_dpp(j: int, rho: float, R: float, rng_seed=None,
                     spectrum: Optional[GinibreSpectrum] = None) -> PointConfiguration:
    """Ginibre alpha-DPP with ``alpha = -1/j`` as the union of ``j`` independent DPPs of kernel ``K/j``."""
    m = SpatialModel.ginibre(rho, R, j)
    rng = as_generator(rng_seed)
    if m.mean_count < DEGENERATE_MASS:
        return _to_config(_degenerate(R, m, rng), m, rng_seed)
    spectrum = spectrum or GinibreSpectrum.build(rho, R)
    return _to_config(_draw_hkpv(m, spectrum, rng), m, rng_seed)


def sample_ginibre_dpp(rho: float, R: float, rng_seed=None,
                       spectrum: Optional[GinibreSpectrum] = None) -> PointConfiguration:
    return sample_alpha_dpp(1, rho, R, rng_seed, spectrum)


def sample_ppp(rho: float, R: float, rng_seed=None) -> PointConfiguration:
    _check(rho, R)
    rng = as_generator(rng_seed)
    k = rng.poisson(rho * math.pi * R * R)
    return _to_config(_uniform_disc(rng, R, k), SpatialModel.ppp(rho, R), rng_seed)


def sample(model: SpatialModel, rng_seed=None) -> PointConfiguration:
    if model.kind == PPP:
        return sample_ppp(model.rho, model.R, rng_seed)
    return sample_alpha_dpp(model.j, model.rho, model.R, rng_seed)


# Vectorised moduli samplers: one row per replication, NaN marks "no point".

def sample_alpha_dpp_moduli(j: int, rho: float, R: float, size: int, rng,
                            tol: float = DEFAULT_TOL) -> np.ndarray:
    """Distances to the origin for ``size`` independent Ginibre alpha-DPP draws.

    Returns a ``(size, j * N)`` array; entries for absent points are NaN.
    """
    _check(rho, R)
    a = math.pi * rho * R * R
    N = max(truncation_index_for_mass(a, tol), 1)
    shape = np.arange(1.0, N + 1.0)
    g = rng.standard_gamma(np.broadcast_to(shape, (size, j, N)))
    keep = g <= a
    if j > 1:
        keep &= rng.random((size, j, N)) * j < 1.0
    r = np.where(keep, np.sqrt(g / (math.pi * rho)), np.nan)
    return r.reshape(size, j * N)


def sample_ppp_moduli(rho: float, R: float, size: int, rng) -> np.ndarray:
    _check(rho, R)
    counts = rng.poisson(rho * math.pi * R * R, size)
    width = max(int(counts.max()) if size else 0, 1)
    r = R * np.sqrt(rng.random((size, width)))
    r[np.arange(width)[None, :] >= counts[:, None]] = np.nan
    return r


def sample_moduli(model: SpatialModel, size: int, rng) -> np.ndarray:
    if model.kind == PPP:
        return sample_ppp_moduli(model.rho, model.R, size, rng)
    return sample_alpha_dpp_moduli(model.j, model.rho, model.R, size, rng)


def hkpv_moduli(model: SpatialModel, size: int, seeds) -> np.ndarray:
    """Moduli of ``size`` full HKPV draws, padded with NaN; ``seeds`` gives one seed per draw."""
    rows = [sample(model, s).radii for s in seeds[:size]]
    width = max([len(x) for x in rows] + [1])
    out = np.full((size, width), np.nan)
    for i, x in enumerate(rows):
        out[i, :len(x)] = x
    return out
