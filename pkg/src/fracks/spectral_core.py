"""Periodic grids, spectral transforms and Fourier multipliers.

Fields live on the torus ``[0, period)^dim`` sampled on ``N`` points per axis.
Coefficients are stored as full complex arrays in numpy FFT order (index ``i``
holds integer wavenumber ``i`` for ``i < N/2`` and ``i - N`` otherwise), scaled
so that the zero mode equals the spatial mean of the field.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np
import scipy.fft

from .exceptions import ConfigurationError, GridMismatchError

SNAPSHOT_FORMAT_VERSION = 1

# Above this amplification Gevrey factors are applied in log space.
GEVREY_LOG_THRESHOLD = 1e12


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("FRACKS_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid carrying its frequency lattice.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 to 3.
    points_per_axis : int
        Even number of samples per axis, at least 8.
    period : float
        Side length of the torus.
    """

    dim: int
    points_per_axis: int
    period: float = 2 * math.pi

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ConfigurationError(f"dim must be 1, 2 or 3, got {self.dim}")
        n = self.points_per_axis
        if int(n) != n or n % 2 != 0:
            raise ConfigurationError(f"N must be even, got {n}")
        if n < 8:
            raise ConfigurationError(f"N must be at least 8, got {n}")
        if not self.period > 0:
            raise ConfigurationError(f"period must be positive, got {self.period}")

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.dim

    @property
    def n_modes(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def base_frequency(self) -> float:
        return 2 * math.pi / self.period

    @property
    def spacing(self) -> float:
        return self.period / self.points_per_axis

    @property
    def volume(self) -> float:
        return self.period**self.dim

    @cached_property
    def k_axes(self) -> tuple:
        """Integer wavenumbers per axis, shaped for broadcasting."""
        k = np.fft.fftfreq(self.points_per_axis, 1.0 / self.points_per_axis)
        out = []
        for ax in range(self.dim):
            shp = [1] * self.dim
            shp[ax] = self.points_per_axis
            out.append(k.reshape(shp))
        return tuple(out)

    @cached_property
    def xi(self) -> tuple:
        """Physical wave-vector components ``(2 pi / period) k``, full shape."""
        return tuple(
            np.broadcast_to(self.base_frequency * k, self.shape) for k in self.k_axes
        )

    @cached_property
    def xi_norm(self) -> np.ndarray:
        return np.sqrt(sum(c**2 for c in self.xi))

    @cached_property
    def xi_l1(self) -> np.ndarray:
        return sum(np.abs(c) for c in self.xi)

    @cached_property
    def k_l1(self) -> np.ndarray:
        """Integer l1 shell index ``sum |k_i|``."""
        return np.rint(sum(np.abs(np.broadcast_to(k, self.shape)) for k in self.k_axes)).astype(int)

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True where some component sits at the unpaired Nyquist index."""
        m = np.zeros(self.shape, dtype=bool)
        for k in self.k_axes:
            m |= np.broadcast_to(k == -self.points_per_axis // 2, self.shape)
        return m

    @property
    def dealias_cutoff(self) -> int:
        """Largest retained integer wavenumber per axis under the 2/3 rule."""
        return (self.points_per_axis - 1) // 3

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        keep = np.ones(self.shape, dtype=bool)
        for k in self.k_axes:
            keep &= np.broadcast_to(np.abs(k) <= self.dealias_cutoff, self.shape)
        return keep

    @cached_property
    def points(self) -> tuple:
        """Physical sample coordinates per axis, full shape."""
        x = np.arange(self.points_per_axis) * self.spacing
        out = []
        for ax in range(self.dim):
            shp = [1] * self.dim
            shp[ax] = self.points_per_axis
            out.append(np.broadcast_to(x.reshape(shp), self.shape))
        return tuple(out)

    def index_of(self, k) -> tuple:
        """Array index holding integer wave vector ``k``."""
        k = tuple(int(v) for v in np.atleast_1d(k))
        if len(k) != self.dim:
            raise ConfigurationError(f"wave vector {k} does not have dim {self.dim}")
        half = self.points_per_axis // 2
        if any(v < -half or v >= half for v in k):
            raise ConfigurationError(f"wave vector {k} outside the lattice")
        return tuple(v % self.points_per_axis for v in k)


def make_grid(dim: int, points_per_axis: int, period: float = 2 * math.pi) -> Grid:
    return Grid(int(dim), int(points_per_axis), float(period))


@dataclass
class SpectralField:
    """Fourier coefficients of a scalar field on ``grid``."""

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != self.grid.shape:
            raise GridMismatchError(
                f"coefficient shape {self.coeffs.shape} does not match grid {self.grid.shape}"
            )

    # value semantics: arithmetic always returns new fields
    def _check(self, other: "SpectralField"):
        if other.grid != self.grid:
            raise GridMismatchError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, SpectralField):
            self._check(other)
            return SpectralField(self.grid, self.coeffs + other.coeffs)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SpectralField):
            self._check(other)
            return SpectralField(self.grid, self.coeffs - other.coeffs)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return SpectralField(self.grid, self.coeffs * scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())

    @property
    def mean(self) -> complex:
        return self.coeffs.flat[0]

    @property
    def mass(self) -> float:
        """Integral of the field over the torus."""
        return float(self.coeffs.flat[0].real) * self.grid.volume

    def to_physical(self, real: bool = True) -> np.ndarray:
        return transform_inverse(self, real=real)

    def hermitian_defect(self) -> float:
        """Relative size of ``c(-k) - conj(c(k))``; zero for real fields."""
        c = self.coeffs
        flipped = c
        for ax in range(c.ndim):
            flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
        scale = np.max(np.abs(c))
        if scale == 0:
            return 0.0
        return float(np.max(np.abs(flipped - np.conj(c))) / scale)

    @classmethod
    def zeros(cls, grid: Grid) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=complex))


def transform_forward(physical: np.ndarray, grid: Grid) -> SpectralField:
    physical = np.asarray(physical)
    if physical.shape != grid.shape:
        raise GridMismatchError(f"array shape {physical.shape} does not match grid {grid.shape}")
    coeffs = scipy.fft.fftn(physical, workers=_workers()) / grid.n_modes
    return SpectralField(grid, coeffs)


def transform_inverse(field: SpectralField, real: bool = True) -> np.ndarray:
    out = scipy.fft.ifftn(field.coeffs * field.grid.n_modes, workers=_workers())
    return out.real.copy() if real else out


def plane_wave(grid: Grid, k, amplitude: complex = 1.0) -> SpectralField:
    """The complex exponential ``amplitude * exp(i xi.x)`` at integer wave vector ``k``."""
    f = SpectralField.zeros(grid)
    f.coeffs[grid.index_of(k)] = amplitude
    return f


def cosine_mode(grid: Grid, k, amplitude: float = 1.0) -> SpectralField:
    """Real mode ``amplitude * cos(xi.x)``."""
    f = SpectralField.zeros(grid)
    f.coeffs[grid.index_of(k)] += amplitude / 2
    f.coeffs[grid.index_of(tuple(-v for v in np.atleast_1d(k)))] += amplitude / 2
    return f


# ---------------------------------------------------------------------------
# multipliers


@dataclass(frozen=True)
class FracLaplacian:
    """Symbol ``|xi|^alpha``."""

    alpha: float

    def __call__(self, xi_norm, xi_l1, xi_comp):
        return np.power(xi_norm, self.alpha)


@dataclass(frozen=True)
class Semigroup:
    """Symbol ``exp(-t |xi|^alpha)``."""

    alpha: float
    t: float

    def __call__(self, xi_norm, xi_l1, xi_comp):
        return np.exp(-self.t * np.power(xi_norm, self.alpha))


@dataclass(frozen=True)
class RieszGrad:
    """Symbol ``i xi_m / |xi|^2`` of ``grad (-Laplacian)^{-1}``, zero at the origin.

    ``axis`` is zero based.
    """

    axis: int

    def __call__(self, xi_norm, xi_l1, xi_comp):
        xm = xi_comp[self.axis]
        sq = np.asarray(xi_norm, dtype=float) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(sq > 0, 1j * xm / np.where(sq > 0, sq, 1.0), 0.0)
        return out


@dataclass(frozen=True)
class Gevrey:
    """Symbol ``exp(theta t^{1/alpha} |xi|_1)``."""

    alpha: float
    t: float
    theta: float = 1.0

    @property
    def rate(self) -> float:
        return self.theta * self.t ** (1.0 / self.alpha)

    def log_symbol(self, xi_l1):
        return self.rate * np.asarray(xi_l1, dtype=float)

    def __call__(self, xi_norm, xi_l1, xi_comp):
        return np.exp(self.log_symbol(xi_l1))


MultiplierSpec = Union[FracLaplacian, Semigroup, RieszGrad, Gevrey]


def default_gevrey_theta(alpha: float, dim: int) -> float:
    """Gevrey rate: 1 for ``alpha > 1``, ``1/(2 dim)`` at ``alpha == 1``."""
    return 1.0 / (2 * dim) if alpha == 1 else 1.0


@dataclass(frozen=True)
class ModelParams:
    """Physical model: diffusion order, grid, dealiasing and Gevrey rate.

    ``gevrey_theta=None`` selects :func:`default_gevrey_theta`.
    """

    alpha: float
    grid: Grid
    dealias: bool = True
    gevrey_theta: float | None = None

    def __post_init__(self):
        if not 1 <= self.alpha <= 2:
            raise ConfigurationError(f"alpha must lie in [1, 2], got {self.alpha}")
        if self.gevrey_theta is not None and not self.gevrey_theta > 0:
            raise ConfigurationError("gevrey_theta must be positive")

    @property
    def theta(self) -> float:
        if self.gevrey_theta is None:
            return default_gevrey_theta(self.alpha, self.grid.dim)
        return self.gevrey_theta


def _validate_spec(spec, dim=None):
    if isinstance(spec, (FracLaplacian, Semigroup, Gevrey)):
        if not 0 < spec.alpha <= 2:
            raise ConfigurationError(f"alpha must lie in (0, 2], got {spec.alpha}")
    if isinstance(spec, (Semigroup, Gevrey)) and spec.t < 0:
        raise ConfigurationError(f"time must be nonnegative, got {spec.t}")
    if isinstance(spec, RieszGrad) and dim is not None and not 0 <= spec.axis < dim:
        raise GridMismatchError(f"axis {spec.axis} invalid for dim {dim}")


def evaluate_symbol(spec: MultiplierSpec, xi) -> complex:
    """Symbol value at a single physical wave vector."""
    xi = np.asarray(xi, dtype=float).ravel()
    _validate_spec(spec, len(xi))
    val = spec(float(np.sqrt(np.sum(xi**2))), float(np.sum(np.abs(xi))), tuple(xi))
    val = complex(np.asarray(val))
    return val


def symbol_array(spec: MultiplierSpec, grid: Grid) -> np.ndarray:
    """Symbol sampled on the lattice of ``grid``."""
    _validate_spec(spec, grid.dim)
    out = np.asarray(spec(grid.xi_norm, grid.xi_l1, grid.xi))
    if isinstance(spec, RieszGrad):
        # the Nyquist index has no partner; an odd symbol there breaks realness
        out = np.where(grid.nyquist_mask, 0.0, out)
    return np.broadcast_to(out, grid.shape)


def apply_multiplier(field: SpectralField, spec: MultiplierSpec) -> SpectralField:
    if isinstance(spec, Gevrey):
        return _apply_gevrey(field, spec)
    return SpectralField(field.grid, field.coeffs * symbol_array(spec, field.grid))


def _apply_gevrey(field: SpectralField, spec: Gevrey) -> SpectralField:
    _validate_spec(spec, field.grid.dim)
    log_amp = spec.log_symbol(field.grid.xi_l1)
    if log_amp.max(initial=0.0) <= math.log(GEVREY_LOG_THRESHOLD):
        return SpectralField(field.grid, field.coeffs * np.exp(log_amp))
    mag = np.abs(field.coeffs)
    nz = mag > 0
    out = np.zeros_like(field.coeffs)
    log_out = np.log(mag[nz]) + log_amp[nz]
    if log_out.size and log_out.max() > math.log(np.finfo(float).max):
        raise OverflowError("lifted coefficients exceed float range; use gevrey_lift")
    out[nz] = np.exp(log_out) * (field.coeffs[nz] / mag[nz])
    return SpectralField(field.grid, out)


# ---------------------------------------------------------------------------
# products


def dealias(field: SpectralField) -> SpectralField:
    return SpectralField(field.grid, np.where(field.grid.dealias_mask, field.coeffs, 0.0))


def pointwise_product_dealiased(f: SpectralField, g: SpectralField) -> SpectralField:
    """Spectral coefficients of ``f * g`` under the 2/3 rule."""
    if f.grid != g.grid:
        raise GridMismatchError("fields live on different grids")
    fp = transform_inverse(dealias(f), real=False)
    gp = transform_inverse(dealias(g), real=False)
    return dealias(transform_forward(fp * gp, f.grid))


# ---------------------------------------------------------------------------
# snapshot files


def save_snapshot(field: SpectralField, path) -> Path:
    """Write ``field`` as an ``.npz`` container.

    Keys: ``format_version``, ``dim``, ``N``, ``period`` and ``coeffs``
    (complex128, C order, numpy FFT wave-vector ordering, mean-normalized).
    """
    path = Path(path)
    with open(path, "wb") as fh:
        np.savez(
            fh,
            format_version=np.int64(SNAPSHOT_FORMAT_VERSION),
            dim=np.int64(field.grid.dim),
            N=np.int64(field.grid.points_per_axis),
            period=np.float64(field.grid.period),
            coeffs=np.ascontiguousarray(field.coeffs, dtype=np.complex128),
        )
    return path


def load_snapshot(path) -> SpectralField:
    with np.load(Path(path)) as data:
        version = int(data["format_version"])
        if version != SNAPSHOT_FORMAT_VERSION:
            raise ConfigurationError(f"unsupported snapshot version {version}")
        grid = make_grid(int(data["dim"]), int(data["N"]), float(data["period"]))
        return SpectralField(grid, data["coeffs"].copy())
