"""scikit-learn style wrappers over the functional core.

Every estimator takes a batch of real fields flattened to rows,
``X.shape == (n_samples, N**dim)``; the grid is inferred in :meth:`fit`.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .gevrey_analysis import analyticity_radius, decay_fit
from .littlewood_paley import BesovParams, besov_norm, block_lp_norms, build_filter_bank
from .solver import SolverConfig, simulate
from .spectral_core import ModelParams, transform_inverse
from .validation import (
    check_alpha,
    check_exponent,
    check_field_batch,
    check_positive,
    check_time_series,
    fields_from_batch,
    infer_grid,
)


class _FieldBatchMixin:
    def _fit_grid(self, X):
        X = check_field_batch(X, self.dim)
        self.grid_ = infer_grid(X.shape[1], self.dim, check_positive(self.period, "period"))
        self.n_features_in_ = X.shape[1]
        return X

    def _fields(self, X):
        check_is_fitted(self, "grid_")
        return fields_from_batch(check_field_batch(X, self.dim), self.grid_)


class LittlewoodPaleyTransformer(_FieldBatchMixin, TransformerMixin, BaseEstimator):
    """Map each field to its dyadic block norms ``||Delta_j f||_p``.

    Parameters
    ----------
    dim : int
    period : float
    p : float or "inf"
    """

    def __init__(self, dim=2, period=2 * math.pi, p=2.0):
        self.dim = dim
        self.period = period
        self.p = p

    def fit(self, X, y=None):
        self._fit_grid(X)
        self.bank_ = build_filter_bank(self.grid_)
        self.shells_ = np.arange(self.bank_.j_min, self.bank_.j_max + 1)
        return self

    def transform(self, X):
        p = check_exponent(self.p, "p")
        return np.array([block_lp_norms(f, p, self.bank_) for f in self._fields(X)])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "shells_")
        return np.array([f"shell_{j}" for j in self.shells_], dtype=object)


class BesovNorm(_FieldBatchMixin, TransformerMixin, BaseEstimator):
    """Homogeneous Besov norm of each field as a single feature."""

    def __init__(self, s=0.0, p=2.0, q=2.0, dim=2, period=2 * math.pi):
        self.s = s
        self.p = p
        self.q = q
        self.dim = dim
        self.period = period

    def fit(self, X, y=None):
        self._fit_grid(X)
        self.bank_ = build_filter_bank(self.grid_)
        self.params_ = BesovParams(float(self.s), check_exponent(self.p, "p"), check_exponent(self.q, "q"))
        self.realizable_ = self.params_.realizable(self.dim)
        return self

    def transform(self, X):
        return np.array([[besov_norm(f, self.params_, self.bank_)] for f in self._fields(X)])


class KellerSegelFlow(_FieldBatchMixin, TransformerMixin, BaseEstimator):
    """Evolve each row as initial data up to time ``T``; returns ``u(T)`` flattened.

    Per-row outcomes are kept in ``outcomes_`` after each :meth:`transform`.
    """

    def __init__(self, alpha=2.0, T=1.0, dt=None, integrator="ETD2RK", nonlinear=True, dim=2, period=2 * math.pi):
        self.alpha = alpha
        self.T = T
        self.dt = dt
        self.integrator = integrator
        self.nonlinear = nonlinear
        self.dim = dim
        self.period = period

    def fit(self, X, y=None):
        self._fit_grid(X)
        model = ModelParams(check_alpha(self.alpha), self.grid_)
        self.config_ = SolverConfig(
            model,
            T=check_positive(self.T, "T"),
            dt=self.dt,
            integrator=self.integrator,
            samples=2,
            nonlinear=bool(self.nonlinear),
            keep_snapshots=True,
        )
        return self

    def transform(self, X):
        fields = self._fields(X)
        out, self.outcomes_ = [], []
        for f in fields:
            traj, outcome = simulate(f, self.config_)
            self.outcomes_.append(outcome)
            out.append(transform_inverse(traj.snapshots[-1]).ravel())
        return np.array(out)


class AnalyticityRadiusEstimator(_FieldBatchMixin, TransformerMixin, BaseEstimator):
    """Fitted spectral decay rate in ``|xi|_1`` for each field."""

    def __init__(self, window=(1e-12, 1e-2), min_shells=5, dim=2, period=2 * math.pi):
        self.window = window
        self.min_shells = min_shells
        self.dim = dim
        self.period = period

    def fit(self, X, y=None):
        self._fit_grid(X)
        return self

    def transform(self, X):
        reps = [analyticity_radius(f, window=tuple(self.window), min_shells=self.min_shells) for f in self._fields(X)]
        self.reports_ = reps
        return np.array([[r.radius] for r in reps])


class PowerLawDecayRegressor(RegressorMixin, BaseEstimator):
    """Least-squares fit of ``y = c t^k`` in log-log coordinates.

    ``X`` holds the times (one column), ``y`` the positive norms.
    """

    def __init__(self, window=None, min_samples=8):
        self.window = window
        self.min_samples = min_samples

    def fit(self, X, y):
        t, v = check_time_series(X, y)
        fit = decay_fit(t, v, self.window, self.min_samples)
        self.exponent_ = fit.exponent
        self.prefactor_ = fit.prefactor
        self.residual_ = fit.residual
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "exponent_")
        t = np.asarray(X, dtype=float).ravel()
        return self.prefactor_ * t**self.exponent_
