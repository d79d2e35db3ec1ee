"""Spectral tools for fractional Keller-Segel chemotaxis on the torus."""

from .exceptions import ConfigurationError, GridMismatchError, InsufficientDataError, ResolutionError
from .spectral_core import (
    FracLaplacian,
    Gevrey,
    Grid,
    ModelParams,
    RieszGrad,
    Semigroup,
    SpectralField,
    apply_multiplier,
    evaluate_symbol,
    load_snapshot,
    make_grid,
    pointwise_product_dealiased,
    save_snapshot,
    transform_forward,
    transform_inverse,
)
from .littlewood_paley import (
    BesovParams,
    MixedNormParams,
    besov_norm,
    build_filter_bank,
    dyadic_block,
    low_pass,
    lp_norm,
    mixed_norm,
    paraproduct,
)
from .solver import SolverConfig, picard_iterate, scaling_transform, simulate
from .gevrey_analysis import (
    analyticity_radius,
    bilinear_Bt_oracle,
    bilinear_estimate_check,
    decay_fit,
    gevrey_lift,
    kernel_l1_norm,
    symbol_domination_check,
)

__version__ = "0.1.0"
