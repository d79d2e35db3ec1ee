"""Initial-data families used by presets, studies and tests."""

from __future__ import annotations

import math

import numpy as np

from .exceptions import ConfigurationError
from .spectral_core import Grid, SpectralField, transform_forward


def _random_phases(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    # phases of real white noise are Hermitian by construction
    w = transform_forward(rng.standard_normal(grid.shape), grid).coeffs
    mag = np.abs(w)
    return np.where(mag > 0, w / np.where(mag > 0, mag, 1.0), 0.0)


def _normalize_linf(f: SpectralField, amplitude: float) -> SpectralField:
    peak = np.abs(f.to_physical()).max()
    if peak == 0:
        raise ConfigurationError("initial field vanishes identically")
    return f * (amplitude / peak)


def power_spectrum_field(
    grid: Grid,
    exponent: float,
    amplitude: float,
    cutoff: float | None = None,
    seed: int = 0,
) -> SpectralField:
    """Mean-zero field with ``|u_hat| ∝ |xi|^exponent exp(-|xi|^2 / (2 cutoff^2))``.

    Phases are random (seeded); magnitudes are deterministic, the field is
    dealiased and scaled so that its sup norm equals ``amplitude``.
    """
    rng = np.random.default_rng(seed)
    r = grid.xi_norm
    with np.errstate(divide="ignore"):
        env = np.where(r > 0, r**exponent, 0.0)
    if cutoff is not None:
        env = env * np.exp(-(r**2) / (2 * cutoff**2))
    f = SpectralField(grid, _random_phases(grid, rng) * env * grid.dealias_mask)
    f.coeffs.flat[0] = 0.0
    return _normalize_linf(f, amplitude)


def critical_spectrum_field(grid: Grid, alpha: float, amplitude: float, cutoff: float, seed: int = 0):
    """Power spectrum ``|xi|^(alpha - n)``: scale-free in the critical Besov space."""
    return power_spectrum_field(grid, alpha - grid.dim, amplitude, cutoff, seed)


def gaussian_bump(grid: Grid, mass: float, width: float, center=None) -> SpectralField:
    """Periodically sampled Gaussian with total integral ``mass``."""
    if not width > 0:
        raise ConfigurationError("width must be positive")
    if center is None:
        center = (grid.period / 2,) * grid.dim
    sq = sum((x - c) ** 2 for x, c in zip(grid.points, center))
    u = np.exp(-sq / (2 * width**2))
    f = transform_forward(u, grid)
    return f * (mass / f.mass)


def mexican_hat(grid: Grid, width: float, amplitude: float = 1.0) -> SpectralField:
    """``-Laplacian`` of a Gaussian centered at the origin, given spectrally.

    Localized, mean zero and with spectrum ``|xi|^2 exp(-width^2 |xi|^2 / 2)``.
    """
    r2 = grid.xi_norm**2
    f = SpectralField(grid, r2 * np.exp(-(width**2) * r2 / 2))
    return _normalize_linf(f, amplitude)


def build_initial(grid: Grid, spec: dict, alpha: float, seed: int) -> SpectralField:
    """Dispatch on ``spec["kind"]``; see the config reference in the README."""
    kind = spec.get("kind", "critical-spectrum")
    if kind == "zero":
        return SpectralField.zeros(grid)
    if kind == "critical-spectrum":
        return critical_spectrum_field(grid, alpha, spec.get("amplitude", 0.1), spec.get("cutoff", 3.0), seed)
    if kind == "power-spectrum":
        return power_spectrum_field(
            grid, spec.get("exponent", alpha - grid.dim), spec.get("amplitude", 0.1), spec.get("cutoff"), seed
        )
    if kind == "gaussian":
        return gaussian_bump(grid, spec.get("mass", 1.0), spec.get("width", 0.3))
    if kind == "mexican-hat":
        return mexican_hat(grid, spec.get("width", 0.3), spec.get("amplitude", 1.0))
    raise ConfigurationError(f"unknown initial-data kind {kind!r}")


INITIAL_KEYS = {"kind", "amplitude", "cutoff", "exponent", "mass", "width"}
