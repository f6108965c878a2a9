"""Periodic-cube scalar/vector fields with spectral mirrors and exact operators.

All fields live on a cubic grid of ``n**3`` points spanning ``[0, l)**3`` with
periodic boundary conditions.  Differential operators are evaluated through the
discrete Fourier transform, which makes them exact (to round-off) for
band-limited data.  Physical arrays are float64 and indexed ``[i1, i2, i3]``
with axis 0 along the first coordinate.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as _sfft


def _workers() -> int:
    """Thread count for FFT work, from the MHDLAB_THREADS environment variable."""
    try:
        return max(1, int(os.environ.get("MHDLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Grid:
    """Cubic periodic grid: ``n`` points per axis on a box of edge ``l``."""

    n: int
    l: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n}")
        if not self.l > 0:
            raise ValueError(f"box edge must be positive, got {self.l}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "l", float(self.l))

    @property
    def spacing(self) -> float:
        return self.l / self.n

    @property
    def volume(self) -> float:
        return self.l**3

    def axis(self) -> np.ndarray:
        """Cell-center coordinates along one axis: 0, h, ..., l - h."""
        return np.arange(self.n) * self.spacing

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = self.axis()
        return np.meshgrid(x, x, x, indexing="ij")


def make_grid(n: int, l: float) -> Grid:
    """Create a grid, rejecting non-power-of-two ``n`` and non-positive ``l``."""
    return Grid(n, l)


@lru_cache(maxsize=32)
def _spectral_tables(n: int, l: float):
    """Precomputed wavevector arrays for a grid.

    Returns a dict with:
      kd    -- (3, n, n, n) derivative wavevectors (Nyquist zeroed, odd operators)
      k2    -- |k|**2 with the full Nyquist mode (even operators)
      k2d   -- |kd|**2 of the derivative wavevectors
      keep  -- boolean 2/3-rule mask (True where the mode is retained)
    """
    kint = np.fft.fftfreq(n, d=1.0 / n)  # integer wavenumbers as floats
    scale = 2.0 * math.pi / l
    k1 = scale * kint
    kx, ky, kz = np.meshgrid(k1, k1, k1, indexing="ij")
    k2 = kx**2 + ky**2 + kz**2

    # Odd-order operators need a real spectrum: drop the unpaired Nyquist mode.
    k1d = k1.copy()
    k1d[n // 2] = 0.0
    kdx, kdy, kdz = np.meshgrid(k1d, k1d, k1d, indexing="ij")
    kd = np.stack([kdx, kdy, kdz])
    k2d = kdx**2 + kdy**2 + kdz**2

    cutoff = n / 3.0
    ax = np.abs(kint) <= cutoff
    keep = ax[:, None, None] & ax[None, :, None] & ax[None, None, :]

    for arr in (kd, k2, k2d, keep):
        arr.setflags(write=False)
    return {"kd": kd, "k2": k2, "k2d": k2d, "keep": keep}


def _tables(grid: Grid):
    return _spectral_tables(grid.n, grid.l)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScalarField:
    """Sampled real scalar field on a grid; values are immutable."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values)
        n = self.grid.n
        if v.shape != (n, n, n):
            raise ValueError(f"scalar values must have shape {(n, n, n)}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", _readonly(v))


@dataclass(frozen=True)
class VectorField:
    """Three scalar components on one grid, stored as a (3, n, n, n) array."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values)
        n = self.grid.n
        if v.shape != (3, n, n, n):
            raise ValueError(f"vector values must have shape {(3, n, n, n)}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", _readonly(v))

    def component(self, i: int) -> ScalarField:
        return ScalarField(self.grid, self.values[i])

    @property
    def components(self) -> tuple[ScalarField, ScalarField, ScalarField]:
        return tuple(self.component(i) for i in range(3))


Field = ScalarField | VectorField


@dataclass(frozen=True)
class SpectralField:
    """Fourier mirror of a real scalar field.

    ``coefficients[k1, k2, k3]`` is the coefficient of ``exp(i k.x)`` in numpy
    FFT index order, with wavevectors ``2*pi/l`` times integer triples; real
    fields satisfy ``c(-k) == conj(c(k))``.
    """

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        c = np.ascontiguousarray(self.coefficients, dtype=np.complex128)
        n = self.grid.n
        if c.shape != (n, n, n):
            raise ValueError(f"coefficients must have shape {(n, n, n)}, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)


def _fwd(values: np.ndarray) -> np.ndarray:
    """Forward transform to per-mode coefficients of exp(i k.x)."""
    return _sfft.fftn(values, axes=(-3, -2, -1), workers=_workers()) / values.shape[-1] ** 3


def _inv(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`_fwd`, discarding the round-off imaginary part."""
    return _sfft.ifftn(coeffs * coeffs.shape[-1] ** 3, axes=(-3, -2, -1), workers=_workers()).real


def to_spectral(f: ScalarField) -> SpectralField:
    return SpectralField(f.grid, _fwd(f.values))


def to_physical(s: SpectralField) -> ScalarField:
    return ScalarField(s.grid, _inv(s.coefficients))


def _same_grid(*fields: Field) -> Grid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError("fields are defined on different grids")
    return grid


def gradient(f: ScalarField) -> VectorField:
    """Spectral gradient of a scalar field."""
    kd = _tables(f.grid)["kd"]
    fh = _fwd(f.values)
    return VectorField(f.grid, _inv(1j * kd * fh[None]))


def divergence(v: VectorField) -> ScalarField:
    """Spectral divergence ``i k . v_hat``."""
    kd = _tables(v.grid)["kd"]
    vh = _fwd(v.values)
    return ScalarField(v.grid, _inv(1j * (kd[0] * vh[0] + kd[1] * vh[1] + kd[2] * vh[2])))


def _curl_hat(vh: np.ndarray, kd: np.ndarray) -> np.ndarray:
    return 1j * np.stack(
        [
            kd[1] * vh[2] - kd[2] * vh[1],
            kd[2] * vh[0] - kd[0] * vh[2],
            kd[0] * vh[1] - kd[1] * vh[0],
        ]
    )


def curl(v: VectorField) -> VectorField:
    """Spectral curl ``i k x v_hat``; exact for band-limited fields."""
    kd = _tables(v.grid)["kd"]
    return VectorField(v.grid, _inv(_curl_hat(_fwd(v.values), kd)))


def project_div_free(v: VectorField) -> VectorField:
    """Leray projection onto divergence-free fields; mean mode untouched."""
    t = _tables(v.grid)
    kd, k2d = t["kd"], t["k2d"]
    inv_k2 = np.zeros_like(k2d)
    np.divide(1.0, k2d, out=inv_k2, where=k2d > 0)
    vh = _fwd(v.values)
    kdotv = kd[0] * vh[0] + kd[1] * vh[1] + kd[2] * vh[2]
    return VectorField(v.grid, _inv(vh - kd * (kdotv * inv_k2)[None]))


def dealias(s: SpectralField) -> SpectralField:
    """Zero every mode with any ``|k_i| > n/3`` (2/3 rule); idempotent."""
    keep = _tables(s.grid)["keep"]
    return SpectralField(s.grid, np.where(keep, s.coefficients, 0.0))


def dealias_field(f: Field) -> Field:
    """Physical-space convenience wrapper around :func:`dealias`."""
    keep = _tables(f.grid)["keep"]
    out = _inv(np.where(keep, _fwd(f.values), 0.0))
    return type(f)(f.grid, out)


def pointwise_magnitude(f: Field) -> ScalarField:
    """Pointwise Euclidean magnitude; identity-like (abs) for scalars."""
    if isinstance(f, ScalarField):
        return ScalarField(f.grid, np.abs(f.values))
    return ScalarField(f.grid, np.sqrt(np.sum(f.values**2, axis=0)))


def _magnitude_values(f: Field) -> np.ndarray:
    if isinstance(f, ScalarField):
        return np.abs(f.values)
    return np.sqrt(np.sum(f.values**2, axis=0))


def lp_norm(f: Field, p: float) -> float:
    """Riemann-sum L^p norm over the box; vector fields use Euclidean magnitude.

    ``p = inf`` returns the max magnitude.  Values of ``p`` below 1 are
    rejected.
    """
    if p != math.inf and not p >= 1:
        raise ValueError(f"exponent p must satisfy p >= 1 or p = inf, got {p}")
    mag = _magnitude_values(f)
    if p == math.inf:
        return float(mag.max())
    h3 = f.grid.spacing**3
    return float((np.sum(mag**p) * h3) ** (1.0 / p))


def mean_value(f: ScalarField) -> float:
    return float(f.values.mean())


def max_norm(f: Field) -> float:
    return float(_magnitude_values(f).max())


def zero_scalar(grid: Grid) -> ScalarField:
    return ScalarField(grid, np.zeros((grid.n,) * 3))


def zero_vector(grid: Grid) -> VectorField:
    return VectorField(grid, np.zeros((3,) + (grid.n,) * 3))
