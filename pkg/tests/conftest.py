"""Shared fixtures and seeded field generators."""

import math

import numpy as np
import pytest

from mhdlab.fields import (
    Grid,
    ScalarField,
    VectorField,
    dealias_field,
    make_grid,
    project_div_free,
)


@pytest.fixture(scope="session")
def grid32() -> Grid:
    return make_grid(32, 2 * math.pi)


@pytest.fixture(scope="session")
def grid16() -> Grid:
    return make_grid(16, 2 * math.pi)


def band_limited_scalar(grid: Grid, seed: int, cutoff: float | None = None) -> ScalarField:
    """Seeded random scalar with integer wavenumbers limited to ``cutoff``."""
    cutoff = cutoff if cutoff is not None else grid.n / 4
    rng = np.random.default_rng(seed)
    kint = np.fft.fftfreq(grid.n, d=1.0 / grid.n)
    kmag = np.sqrt(kint[:, None, None] ** 2 + kint[None, :, None] ** 2 + kint[None, None, :] ** 2)
    keep = kmag <= cutoff
    raw = np.fft.ifftn(keep * np.fft.fftn(rng.standard_normal((grid.n,) * 3))).real
    return ScalarField(grid, raw / np.abs(raw).max())


def band_limited_vector(grid: Grid, seed: int, cutoff: float | None = None) -> VectorField:
    comps = [band_limited_scalar(grid, seed + 1000 * i, cutoff).values for i in range(3)]
    return VectorField(grid, np.stack(comps))


def solenoidal_vector(grid: Grid, seed: int, cutoff: float | None = None) -> VectorField:
    """Divergence-free, mean-free, dealiased random vector field with unit peak."""
    v = project_div_free(dealias_field(band_limited_vector(grid, seed, cutoff)))
    vals = v.values - v.values.mean(axis=(1, 2, 3), keepdims=True)
    return VectorField(grid, vals / np.sqrt(np.sum(vals**2, axis=0)).max())


def rel_max_err(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(np.abs(a).max(), np.abs(b).max(), np.finfo(float).tiny)
    return float(np.abs(a - b).max() / scale)
