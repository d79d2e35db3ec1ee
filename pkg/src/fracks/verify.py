"""Fast invariant suite behind ``fracks verify``."""

from __future__ import annotations

import math

import numpy as np

from .gevrey_analysis import bt_exponent_table, kernel_l1_norm, subadditivity_gap
from .littlewood_paley import build_filter_bank, dyadic_block, paraproduct
from .solver import SolverConfig, simulate
from .spectral_core import (
    FracLaplacian,
    Gevrey,
    ModelParams,
    RieszGrad,
    Semigroup,
    SpectralField,
    apply_multiplier,
    dealias,
    evaluate_symbol,
    make_grid,
    plane_wave,
    transform_forward,
    transform_inverse,
)


def _rng():
    return np.random.default_rng(2024)


def _band_limited(grid, rng, band):
    f = transform_forward(rng.standard_normal(grid.shape), grid)
    keep = np.ones(grid.shape, dtype=bool)
    for k in grid.k_axes:
        keep &= np.broadcast_to(np.abs(k) <= band, grid.shape)
    return SpectralField(grid, np.where(keep, f.coeffs, 0.0))


def check_round_trip():
    g = make_grid(2, 32)
    x = _rng().standard_normal(g.shape)
    err = np.max(np.abs(transform_inverse(transform_forward(x, g)) - x)) / np.max(np.abs(x))
    return err <= 1e-12, f"rel err {err:.1e}"


def check_eigenfunctions():
    g = make_grid(2, 16)
    specs = [FracLaplacian(1.5), Semigroup(1.5, 0.3), RieszGrad(0), RieszGrad(1), Gevrey(1.5, 0.2)]
    worst = 0.0
    for k in [(1, 0), (2, -3), (-5, 4), (0, 7)]:
        w = plane_wave(g, k)
        xi = np.array(k) * g.base_frequency
        for s in specs:
            got = apply_multiplier(w, s).coeffs[g.index_of(k)]
            want = evaluate_symbol(s, xi)
            worst = max(worst, abs(got - want) / max(abs(want), 1e-300))
    return worst <= 1e-13, f"max rel err {worst:.1e}"


def check_semigroup_composition():
    g = make_grid(2, 32)
    f = transform_forward(_rng().standard_normal(g.shape), g)
    a = apply_multiplier(apply_multiplier(f, Semigroup(1.5, 0.1)), Semigroup(1.5, 0.2))
    b = apply_multiplier(f, Semigroup(1.5, 0.3))
    err = np.max(np.abs(a.coeffs - b.coeffs)) / np.max(np.abs(b.coeffs))
    return err <= 1e-13, f"rel err {err:.1e}"


def check_partition_of_unity():
    g = make_grid(2, 64)
    bank = build_filter_bank(g)
    total = bank.phi_values.sum(axis=0)
    nz = g.xi_norm > 0
    err = np.max(np.abs(total[nz] - 1))
    return err <= 1e-12, f"max residual {err:.1e}"


def check_almost_orthogonality():
    g = make_grid(2, 64)
    bank = build_filter_bank(g)
    f = transform_forward(_rng().standard_normal(g.shape), g)
    worst = 0.0
    for i in bank.js:
        for j in bank.js:
            if abs(i - j) >= 2:
                worst = max(worst, np.max(np.abs(dyadic_block(dyadic_block(f, j, bank), i, bank).coeffs)))
    return worst == 0.0, f"max leak {worst:.1e}"


def check_bony_identity():
    g = make_grid(2, 64)
    bank = build_filter_bank(g)
    rng = _rng()
    f, h = _band_limited(g, rng, 10), _band_limited(g, rng, 10)
    f.coeffs.flat[0] = h.coeffs.flat[0] = 0.0
    a, b, c = paraproduct(f, h, bank)
    fp, hp = transform_inverse(f), transform_inverse(h)
    ref = transform_forward(fp * hp, g)
    err = np.max(np.abs((a + b + c).coeffs - ref.coeffs)) / np.max(np.abs(ref.coeffs))
    return err <= 1e-10, f"rel err {err:.1e}"


def check_real_closure():
    g = make_grid(2, 32)
    f = transform_forward(_rng().standard_normal(g.shape), g)
    worst = 0.0
    for s in [FracLaplacian(1.3), Semigroup(2, 0.1), RieszGrad(0), Gevrey(1.5, 0.01)]:
        z = transform_inverse(apply_multiplier(f, s), real=False)
        worst = max(worst, np.max(np.abs(z.imag)) / np.max(np.abs(z.real)))
    return worst <= 1e-12, f"max imag/real {worst:.1e}"


def check_mass_and_linear_exactness():
    g = make_grid(2, 32)
    rng = _rng()
    u0 = dealias(transform_forward(0.5 + 0.1 * rng.standard_normal(g.shape), g))
    cfg = SolverConfig(ModelParams(1.5, g), T=0.05, samples=6)
    traj, out = simulate(u0, cfg)
    lin_cfg = SolverConfig(ModelParams(1.5, g), T=0.05, samples=6, nonlinear=False)
    ltraj, _ = simulate(u0, lin_cfg)
    lin_err = max(
        np.max(np.abs(s.coeffs - apply_multiplier(u0, Semigroup(1.5, t)).coeffs))
        for t, s in zip(ltraj.times, ltraj.snapshots)
    )
    drift = out.diagnostics["mass_drift"]
    return drift <= 1e-10 and lin_err <= 1e-12, f"mass drift {drift:.1e}, linear err {lin_err:.1e}"


def check_bt_exponent():
    worst = int(bt_exponent_table(make_grid(2, 16)).max())
    return worst <= 0, f"max exponent {worst}"


def check_subadditivity():
    worst = math.inf
    for alpha in (1.0, 1.25, 1.5, 1.75, 2.0):
        t = np.linspace(0, 3, 61)[:, None]
        s = t * np.linspace(0, 1, 61)[None, :]
        worst = min(worst, float(subadditivity_gap(s, t, alpha).min()))
    return worst >= -1e-12, f"min gap {worst:.1e}"


def check_alpha1_domination():
    # integer lattice: |k|_1^2 <= n |k|^2 and n > 1, so both comparisons are exact
    g = make_grid(2, 64)
    ks = np.meshgrid(*g.k_axes, indexing="ij")
    l1 = sum(np.abs(k).astype(np.int64) for k in ks)
    l2sq = sum(k.astype(np.int64) ** 2 for k in ks)
    nz = l2sq > 0
    ok = bool(np.all(l1[nz] ** 2 <= g.dim * l2sq[nz])) and g.dim > 1
    return ok, "exact integer comparison on 64^2 lattice"


def check_kernel_normalization():
    v = kernel_l1_norm(0.0, 2.0, 1.0, points_per_axis=512, period=64.0, check=False).value
    return abs(v - 1) <= 5e-3, f"value {v:.6f}"


CHECKS = [
    ("transform round trip", check_round_trip),
    ("multiplier eigenfunctions", check_eigenfunctions),
    ("semigroup composition", check_semigroup_composition),
    ("partition of unity", check_partition_of_unity),
    ("almost orthogonality", check_almost_orthogonality),
    ("paraproduct reconstruction", check_bony_identity),
    ("real-field closure", check_real_closure),
    ("mass conservation and linear exactness", check_mass_and_linear_exactness),
    ("B_t exponent nonpositive", check_bt_exponent),
    ("semigroup exponent subadditivity", check_subadditivity),
    ("alpha=1 Gevrey domination", check_alpha1_domination),
    ("sigma=0 kernel normalization", check_kernel_normalization),
]


def run_checks(out=print) -> bool:
    ok_all = True
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # report, keep going
            ok, detail = False, f"error: {exc}"
        ok_all &= bool(ok)
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok_all
