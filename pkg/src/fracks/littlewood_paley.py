"""Dyadic Littlewood-Paley filter bank, Besov norms and paraproducts.

The low-pass profile ``chi`` equals 1 on ``|xi| <= 3/4``, 0 on ``|xi| >= 4/3``
and is a quintic smoothstep in between.  The band-pass profile is
``phi(xi) = chi(xi/2) - chi(xi)``, supported in ``3/4 <= |xi| <= 8/3``, so the
blocks telescope: ``S_j = sum_{k <= j-1} Delta_k`` is multiplication by
``chi(2^{-j} xi)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .exceptions import ConfigurationError, GridMismatchError, InsufficientDataError
from .spectral_core import (
    Grid,
    Semigroup,
    SpectralField,
    apply_multiplier,
    pointwise_product_dealiased,
    transform_inverse,
)

CHI_INNER = 3.0 / 4.0
CHI_OUTER = 4.0 / 3.0

Fieldish = Union[SpectralField, Sequence[SpectralField]]


def chi_profile(r) -> np.ndarray:
    """Radial low-pass profile evaluated at radii ``r``."""
    r = np.asarray(r, dtype=float)
    s = np.clip((r - CHI_INNER) / (CHI_OUTER - CHI_INNER), 0.0, 1.0)
    step = s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
    return 1.0 - step


def phi_profile(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return chi_profile(r / 2.0) - chi_profile(r)


@dataclass(frozen=True)
class DyadicFilterBank:
    """Blocks ``phi(2^{-j} xi)`` for every shell meeting the lattice of ``grid``.

    ``j_min`` is low enough that ``chi(2^{-j_min} xi)`` vanishes on every
    nonzero lattice point and ``j_max`` high enough that
    ``chi(2^{-j_max-1} xi) == 1`` on the whole lattice, so the blocks sum to one
    away from the origin.
    """

    grid: Grid
    j_min: int
    j_max: int

    @property
    def js(self) -> range:
        return range(self.j_min, self.j_max + 1)

    @cached_property
    def phi_values(self) -> np.ndarray:
        r = self.grid.xi_norm
        return np.stack([phi_profile(r * 2.0**-j) for j in self.js])

    def phi(self, j: int) -> np.ndarray:
        self._check_j(j)
        return self.phi_values[j - self.j_min]

    def chi(self, j: int) -> np.ndarray:
        """``chi(2^{-j} xi)``, the symbol of ``S_j``."""
        return chi_profile(self.grid.xi_norm * 2.0**-j)

    def _check_j(self, j: int, upper_extra: int = 0):
        if not self.j_min <= j <= self.j_max + upper_extra:
            raise ConfigurationError(
                f"shell {j} outside resolved range [{self.j_min}, {self.j_max}]"
            )


def build_filter_bank(grid: Grid) -> DyadicFilterBank:
    r = grid.xi_norm
    r_min = r[r > 0].min()
    r_max = r.max()
    j_min = math.floor(math.log2(r_min / CHI_OUTER))
    j_max = math.ceil(math.log2(r_max / CHI_INNER)) - 1
    return DyadicFilterBank(grid, j_min, j_max)


def _as_list(f: Fieldish) -> list:
    if isinstance(f, SpectralField):
        return [f]
    return list(f)


def _check_bank(f: SpectralField, bank: DyadicFilterBank):
    if f.grid != bank.grid:
        raise GridMismatchError("field and filter bank use different grids")


def dyadic_block(f: SpectralField, j: int, bank: DyadicFilterBank) -> SpectralField:
    _check_bank(f, bank)
    return SpectralField(f.grid, f.coeffs * bank.phi(j))


def low_pass(f: SpectralField, j: int, bank: DyadicFilterBank, form: str = "chi") -> SpectralField:
    """``S_j f``, either as ``chi(2^{-j} D) f`` or as the explicit block sum.

    The block-sum form adds the sub-resolved remainder
    ``chi(2^{-j_min} D) f`` (on the lattice, just the mean).
    """
    _check_bank(f, bank)
    bank._check_j(j, upper_extra=1)
    if form == "chi":
        return SpectralField(f.grid, f.coeffs * bank.chi(j))
    if form == "sum":
        acc = f.coeffs * bank.chi(bank.j_min)
        for k in range(bank.j_min, j):
            acc = acc + f.coeffs * bank.phi(k)
        return SpectralField(f.grid, acc)
    raise ConfigurationError(f"unknown low-pass form {form!r}")


# ---------------------------------------------------------------------------
# norms


def _check_exponent(p, name="p"):
    if not (p >= 1):
        raise ConfigurationError(f"{name} must be >= 1, got {p}")


def _scaled_psum(a: np.ndarray, p: float, weight: float = 1.0) -> float:
    """``(weight * sum a^p)^{1/p}`` for ``a >= 0``, factoring out the max first."""
    top = a.max(initial=0.0)
    if top == 0:
        return 0.0
    if math.isinf(p) or not math.isfinite(top):
        return float(top)
    a = a / top
    return float(top * (weight * np.sum(a * a if p == 2 else a**p)) ** (1.0 / p))


def lp_norm_array(values: np.ndarray, grid: Grid, p: float) -> float:
    """Riemann-sum ``L^p`` norm of grid samples (last ``dim`` axes)."""
    _check_exponent(p)
    return _scaled_psum(np.abs(values), p, grid.spacing**grid.dim)


def _pointwise_magnitude(fields: list) -> np.ndarray:
    if len(fields) == 1:
        return np.abs(transform_inverse(fields[0], real=False))
    sq = sum(np.abs(transform_inverse(c, real=False)) ** 2 for c in fields)
    return np.sqrt(sq)


def lp_norm(f: Fieldish, p: float) -> float:
    """``L^p`` norm over the torus; vector fields use the pointwise Euclidean length."""
    _check_exponent(p)
    fields = _as_list(f)
    return lp_norm_array(_pointwise_magnitude(fields), fields[0].grid, p)


def l2_norm_parseval(f: SpectralField) -> float:
    return _scaled_psum(np.abs(f.coeffs), 2, f.grid.volume)


def block_lp_norms(f: Fieldish, p: float, bank: DyadicFilterBank) -> np.ndarray:
    """``||Delta_j f||_{L^p}`` for every resolved shell, ordered by ``bank.js``."""
    _check_exponent(p)
    fields = _as_list(f)
    for c in fields:
        _check_bank(c, bank)
    out = np.empty(len(bank.js))
    for i, j in enumerate(bank.js):
        phi = bank.phi_values[i]
        if p == 2:
            # Parseval; exact for trigonometric polynomials
            mags = np.concatenate([(np.abs(c.coeffs) * phi).ravel() for c in fields])
            out[i] = _scaled_psum(mags, 2, bank.grid.volume)
        else:
            blocks = [SpectralField(c.grid, c.coeffs * phi) for c in fields]
            out[i] = lp_norm(blocks, p)
    return out


@dataclass(frozen=True)
class BesovParams:
    s: float
    p: float = 2.0
    q: float = 2.0

    def __post_init__(self):
        _check_exponent(self.p, "p")
        _check_exponent(self.q, "q")

    def realizable(self, dim: int) -> bool:
        """Whether ``(s, p, q)`` meets the ``s < n/p`` (or ``= n/p`` with q=1) restriction."""
        crit = dim / self.p
        return self.s < crit or (self.s == crit and self.q == 1)


def critical_besov(alpha: float, dim: int, p: float = 2.0, q: float = 2.0) -> BesovParams:
    """Scale-invariant space ``B^{-alpha + n/p}_{p,q}``."""
    return BesovParams(-alpha + dim / p, p, q)


def _lq(weighted: np.ndarray, q: float) -> float:
    return _scaled_psum(np.asarray(weighted, dtype=float), q)


def besov_norm(f: Fieldish, params: BesovParams, bank: DyadicFilterBank) -> float:
    blocks = block_lp_norms(f, params.p, bank)
    weights = 2.0 ** (params.s * np.asarray(bank.js, dtype=float))
    return _lq(weights * blocks, params.q)


def besov_report(f: Fieldish, params: BesovParams, bank: DyadicFilterBank):
    """Per-shell rows and a summary row for the norm-report CSVs."""
    blocks = block_lp_norms(f, params.p, bank)
    weights = 2.0 ** (params.s * np.asarray(bank.js, dtype=float))
    rows = [
        {"j": j, "block_lp_norm": b, "weight": w, "contribution": w * b}
        for j, b, w in zip(bank.js, blocks, weights)
    ]
    summary = {
        "s": params.s,
        "p": params.p,
        "q": params.q,
        "value": _lq(weights * blocks, params.q),
        "j_min": bank.j_min,
        "j_max": bank.j_max,
    }
    return rows, summary


@dataclass(frozen=True)
class MixedNormParams:
    rho: float
    besov: BesovParams
    T: float

    def __post_init__(self):
        _check_exponent(self.rho, "rho")
        if not self.T > 0:
            raise ConfigurationError(f"horizon T must be positive, got {self.T}")


def _time_integral(values: np.ndarray, T: float, rho: float) -> np.ndarray:
    """``(int_0^T v(t)^rho dt)^{1/rho}`` per column by the trapezoid rule."""
    if math.isinf(rho):
        return values.max(axis=0)
    n = values.shape[0]
    if n == 1:
        integral = T * values[0] ** rho
    else:
        h = T / (n - 1)
        v = values**rho
        integral = h * (v.sum(axis=0) - 0.5 * (v[0] + v[-1]))
    return integral ** (1.0 / rho)


def mixed_block_norms(series: Sequence[Fieldish], params: MixedNormParams, bank) -> np.ndarray:
    if len(series) == 0:
        raise InsufficientDataError("empty time series")
    vals = np.stack([block_lp_norms(f, params.besov.p, bank) for f in series])
    return _time_integral(vals, params.T, params.rho)


def mixed_norm(series: Sequence[Fieldish], params: MixedNormParams, bank) -> float:
    """Chemin-Lerner norm of a uniformly sampled series on ``[0, T]``.

    A single sample is treated as constant in time.
    """
    per_j = mixed_block_norms(series, params, bank)
    weights = 2.0 ** (params.besov.s * np.asarray(bank.js, dtype=float))
    return _lq(weights * per_j, params.besov.q)


# ---------------------------------------------------------------------------
# paraproduct


def paraproduct(f: SpectralField, g: SpectralField, bank: DyadicFilterBank):
    """Bony decomposition ``(T_f g, T_g f, R(f, g))``.

    The homogeneous blocks never see the mean, so the three parts sum to
    ``(f - mean f)(g - mean g)``.
    """
    if f.grid != g.grid:
        raise GridMismatchError("fields live on different grids")
    _check_bank(f, bank)
    js = list(bank.js)
    df = {j: dyadic_block(f, j, bank) for j in js}
    dg = {j: dyadic_block(g, j, bank) for j in js}
    zero = SpectralField.zeros(f.grid)
    t_fg, t_gf, rem = zero, zero, zero
    for j in js:
        # S_{j-1} minus the mean: blocks k <= j - 2
        low_f = SpectralField(f.grid, f.coeffs * bank.chi(j - 1))
        low_f.coeffs.flat[0] = 0.0
        low_g = SpectralField(g.grid, g.coeffs * bank.chi(j - 1))
        low_g.coeffs.flat[0] = 0.0
        t_fg = t_fg + pointwise_product_dealiased(low_f, dg[j])
        t_gf = t_gf + pointwise_product_dealiased(low_g, df[j])
        near = zero
        for jj in (j - 1, j, j + 1):
            if jj in dg:
                near = near + dg[jj]
        rem = rem + pointwise_product_dealiased(df[j], near)
    return t_fg, t_gf, rem


# ---------------------------------------------------------------------------
# property checks


def _derivative(f: SpectralField, beta: tuple) -> SpectralField:
    sym = np.ones(f.grid.shape, dtype=complex)
    for ax in beta:
        comp = np.where(f.grid.nyquist_mask, 0.0, f.grid.xi[ax])
        sym = sym * (1j * comp)
    return SpectralField(f.grid, f.coeffs * sym)


@dataclass
class BernsteinReport:
    j: int
    k: int
    p: float
    r: float
    ball_ratio: float
    ring_lower: float
    ring_upper: float


def bernstein_check(f: SpectralField, j: int, p: float, r: float, k: int, bank) -> BernsteinReport:
    """Ratios entering the Bernstein inequalities for ``Delta_j f``.

    ``ball_ratio`` is ``sup_{|b|=k} ||d^b Delta_j f||_r / (2^{j(k + n(1/p-1/r))} ||Delta_j f||_p)``.
    The ring ratios compare ``sup_{|b|=k} ||d^b Delta_j f||_p`` with ``2^{jk} ||Delta_j f||_p``.
    """
    if not 1 <= p <= r:
        raise ConfigurationError(f"need 1 <= p <= r, got p={p}, r={r}")
    block = dyadic_block(f, j, bank)
    base_p = lp_norm(block, p)
    if base_p == 0:
        raise InsufficientDataError(f"Delta_{j} f vanishes; ratio undefined")
    n = f.grid.dim
    betas = list(itertools.combinations_with_replacement(range(n), k))
    derivs = [_derivative(block, b) for b in betas]
    sup_r = max(lp_norm(d, r) for d in derivs)
    sup_p = max(lp_norm(d, p) for d in derivs)
    scale = 2.0 ** (j * (k + n * (1.0 / p - (0.0 if math.isinf(r) else 1.0 / r))))
    ring = sup_p / (2.0 ** (j * k) * base_p)
    return BernsteinReport(j, k, p, r, sup_r / (scale * base_p), ring, ring)


@dataclass
class SemigroupDecayFit:
    j: int
    alpha: float
    kappa: float
    K: float
    residual: float


def semigroup_decay_check(
    alpha: float,
    j: int,
    times: Sequence[float],
    bank: DyadicFilterBank,
    f: SpectralField | None = None,
    p: float = 2.0,
) -> SemigroupDecayFit:
    """Fit ``||e^{-t Lambda^alpha} Delta_j f||_p ~ K exp(-kappa 2^{alpha j} t) ||Delta_j f||_p``.

    ``kappa`` is the least-squares rate; ``K`` is the smallest constant for
    which the bound holds at every sample.  Without ``f`` the shell profile
    ``phi(2^{-j} xi)`` itself is used.
    """
    times = np.asarray(times, dtype=float)
    if times.size < 3:
        raise InsufficientDataError("need at least 3 time samples")
    if f is None:
        f = SpectralField(bank.grid, bank.phi(j).astype(complex))
    block = dyadic_block(f, j, bank)
    base = lp_norm(block, p)
    if base == 0:
        raise InsufficientDataError(f"Delta_{j} f vanishes")
    vals = np.array([lp_norm(apply_multiplier(block, Semigroup(alpha, t)), p) for t in times])
    x = -(2.0 ** (alpha * j)) * times
    y = np.log(vals / base)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    kappa = float(coef[0])
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    K = float(np.max(vals / (base * np.exp(kappa * x))))
    return SemigroupDecayFit(j, alpha, kappa, K, resid)
