"""Input checks shared by the estimator wrappers and the CLI."""

from __future__ import annotations

import math

import numpy as np

from .exceptions import ConfigurationError, GridMismatchError
from .spectral_core import Grid, SpectralField, make_grid, transform_forward


def check_alpha(alpha, low: float = 1.0, high: float = 2.0) -> float:
    alpha = float(alpha)
    if not low <= alpha <= high:
        raise ConfigurationError(f"alpha must lie in [{low}, {high}], got {alpha}")
    return alpha


def check_exponent(value, name: str) -> float:
    """Lebesgue-type exponent in ``[1, inf]``; accepts the strings ``inf``/``infinity``."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return math.inf
        value = float(value)
    value = float(value)
    if not value >= 1:
        raise ConfigurationError(f"{name} must be >= 1, got {value}")
    return value


def check_positive(value, name: str, strict: bool = True) -> float:
    value = float(value)
    if strict and not value > 0:
        raise ConfigurationError(f"{name} must be positive, got {value}")
    if not strict and not value >= 0:
        raise ConfigurationError(f"{name} must be nonnegative, got {value}")
    return value


def infer_grid(n_features: int, dim: int, period: float) -> Grid:
    """Grid whose ``N**dim`` equals ``n_features``."""
    N = round(n_features ** (1.0 / dim))
    if N**dim != n_features:
        raise GridMismatchError(f"{n_features} features is not a {dim}-dimensional square grid")
    return make_grid(dim, N, period)


def check_field_batch(X, dim: int) -> np.ndarray:
    """Coerce ``X`` into a real 2-D array of flattened fields."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    elif X.ndim > 2:
        X = X.reshape(X.shape[0], -1)
    if X.shape[0] == 0:
        raise ConfigurationError("empty batch")
    if not np.all(np.isfinite(X)):
        raise ConfigurationError("input contains non-finite values")
    return X


def fields_from_batch(X: np.ndarray, grid: Grid) -> list:
    if X.shape[1] != grid.n_modes:
        raise GridMismatchError(f"expected {grid.n_modes} features, got {X.shape[1]}")
    return [transform_forward(row.reshape(grid.shape), grid) for row in X]


def check_time_series(t, y):
    t = np.asarray(t, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if t.shape != y.shape:
        raise ConfigurationError("times and values differ in length")
    return t, y
