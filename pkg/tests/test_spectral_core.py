import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracks import (
    ConfigurationError,
    FracLaplacian,
    Gevrey,
    GridMismatchError,
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
from fracks.spectral_core import (
    ModelParams,
    cosine_mode,
    default_gevrey_theta,
    plane_wave,
    symbol_array,
)

from conftest import random_real_field, rel_err


class TestGrid:
    def test_valid_shapes(self):
        assert make_grid(2, 64).shape == (64, 64)
        assert make_grid(3, 32).shape == (32, 32, 32)

    @pytest.mark.parametrize("dim,N", [(2, 63), (2, 6), (4, 16), (0, 16)])
    def test_rejects_bad_sizes(self, dim, N):
        with pytest.raises(ConfigurationError):
            make_grid(dim, N)

    def test_rejects_nonpositive_period(self):
        with pytest.raises(ConfigurationError):
            make_grid(2, 16, 0.0)

    def test_modes_bounded_by_nyquist(self):
        g = make_grid(2, 16)
        for k in g.k_axes:
            assert np.all(np.abs(k) <= 8)

    def test_dealias_cutoff(self):
        assert make_grid(2, 64).dealias_cutoff == 21
        assert make_grid(1, 128).dealias_cutoff == 42

    def test_wave_numbers_scale_with_period(self):
        g = make_grid(1, 16, 4 * math.pi)
        assert g.base_frequency == pytest.approx(0.5)
        assert np.max(g.xi_norm) == pytest.approx(4.0)


class TestTransforms:
    def test_constant(self, grid2):
        f = transform_forward(np.full(grid2.shape, 3.5), grid2)
        assert f.coeffs[0, 0] == pytest.approx(3.5)
        f.coeffs[0, 0] = 0
        assert np.max(np.abs(f.coeffs)) < 1e-14

    def test_cosine_coefficients(self, grid2):
        x, _ = grid2.points
        f = transform_forward(np.cos(x) * np.ones(grid2.shape), grid2)
        assert f.coeffs[grid2.index_of((1, 0))] == pytest.approx(0.5)
        assert f.coeffs[grid2.index_of((-1, 0))] == pytest.approx(0.5)
        f.coeffs[grid2.index_of((1, 0))] = f.coeffs[grid2.index_of((-1, 0))] = 0
        assert np.max(np.abs(f.coeffs)) < 1e-15

    @pytest.mark.parametrize("dim,N", [(1, 64), (2, 32), (3, 16)])
    def test_round_trip(self, dim, N, rng):
        g = make_grid(dim, N)
        x = rng.standard_normal(g.shape)
        assert rel_err(transform_inverse(transform_forward(x, g)), x) <= 1e-12

    def test_mass_is_mean_times_volume(self, grid2):
        f = transform_forward(np.full(grid2.shape, 2.0), grid2)
        assert f.mass == pytest.approx(2.0 * (2 * math.pi) ** 2)

    def test_real_input_is_hermitian(self, grid2, rng):
        assert random_real_field(grid2, rng).hermitian_defect() < 1e-15

    def test_shape_mismatch(self, grid2):
        with pytest.raises(GridMismatchError):
            transform_forward(np.zeros((8, 8)), grid2)


class TestSymbols:
    def test_frac_laplacian(self):
        assert evaluate_symbol(FracLaplacian(2.0), (3.0, 4.0)) == pytest.approx(25.0)

    def test_semigroup(self):
        assert evaluate_symbol(Semigroup(1.0, 0.5), (2.0, 0.0)) == pytest.approx(math.exp(-1), rel=1e-12)

    def test_riesz_grad_second_axis(self):
        assert evaluate_symbol(RieszGrad(1), (0.0, 2.0)) == pytest.approx(0.5j)

    def test_riesz_grad_zero_mode(self):
        assert evaluate_symbol(RieszGrad(0), (0.0, 0.0)) == 0

    def test_gevrey(self):
        assert evaluate_symbol(Gevrey(2.0, 1.0, 1.0), (1.0, 1.0)) == pytest.approx(math.e**2, rel=1e-12)

    def test_gevrey_alpha1_default_rate(self):
        # theta = 1/(2n) and a rate linear in t
        spec = Gevrey(1.0, 1.0, default_gevrey_theta(1.0, 2))
        assert evaluate_symbol(spec, (1.0, 1.0)) == pytest.approx(math.exp(0.5), rel=1e-12)

    def test_default_theta(self):
        assert default_gevrey_theta(1.5, 2) == 1.0
        assert default_gevrey_theta(1.0, 3) == pytest.approx(1 / 6)

    def test_gevrey_symbol_at_least_one(self):
        g = make_grid(2, 16)
        s = symbol_array(Gevrey(1.5, 0.3), g)
        assert s[0, 0] == 1.0 and np.all(s >= 1.0)

    def test_heat_symbols_real_nonnegative_radial(self):
        g = make_grid(2, 16)
        for spec in (FracLaplacian(1.3), Semigroup(1.7, 0.2)):
            s = symbol_array(spec, g)
            assert np.all(np.isreal(s)) and np.all(s.real >= 0)
            assert np.allclose(s, s.T)

    @pytest.mark.parametrize("spec", [FracLaplacian(0.0), Semigroup(3.0, 1.0), Semigroup(1.5, -1.0)])
    def test_invalid_specs(self, spec):
        with pytest.raises(ConfigurationError):
            evaluate_symbol(spec, (1.0, 1.0))

    def test_axis_beyond_dimension(self):
        with pytest.raises(GridMismatchError):
            evaluate_symbol(RieszGrad(2), (1.0, 1.0))


MULTIPLIERS = [
    FracLaplacian(1.5),
    FracLaplacian(0.5),
    Semigroup(2.0, 0.05),
    Semigroup(1.0, 0.7),
    RieszGrad(0),
    RieszGrad(1),
    Gevrey(1.5, 0.2),
    Gevrey(1.0, 0.5, 0.25),
]


class TestApplyMultiplier:
    @pytest.mark.parametrize("spec", MULTIPLIERS, ids=repr)
    def test_plane_wave_eigenfunction(self, spec):
        g = make_grid(2, 16)
        for k in [(1, 0), (0, -1), (3, 4), (-7, 2), (5, 5)]:
            w = plane_wave(g, k)
            got = apply_multiplier(w, spec)
            want = evaluate_symbol(spec, np.array(k) * g.base_frequency)
            assert abs(got.coeffs[g.index_of(k)] - want) <= 1e-13 * abs(want)
            rest = got.coeffs.copy()
            rest[g.index_of(k)] = 0
            assert np.max(np.abs(rest)) == 0

    def test_unit_wave_unchanged(self):
        g = make_grid(2, 16)
        w = plane_wave(g, (1, 0))
        assert np.allclose(apply_multiplier(w, FracLaplacian(1.5)).coeffs, w.coeffs, rtol=0, atol=1e-15)

    def test_semigroup_at_zero_time_is_identity(self, grid2, rng):
        f = random_real_field(grid2, rng)
        assert np.array_equal(apply_multiplier(f, Semigroup(1.3, 0.0)).coeffs, f.coeffs)

    @settings(max_examples=25, deadline=None)
    @given(
        alpha=st.floats(1.0, 2.0),
        s=st.floats(0.0, 0.5),
        t=st.floats(0.0, 0.5),
        seed=st.integers(0, 2**16),
    )
    def test_semigroup_composition(self, alpha, s, t, seed):
        g = make_grid(2, 16)
        f = random_real_field(g, np.random.default_rng(seed))
        a = apply_multiplier(apply_multiplier(f, Semigroup(alpha, s)), Semigroup(alpha, t))
        b = apply_multiplier(f, Semigroup(alpha, s + t))
        assert rel_err(a.coeffs, b.coeffs) <= 1e-13

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**16), a=st.floats(-3, 3), b=st.floats(-3, 3))
    def test_linearity(self, seed, a, b):
        g = make_grid(2, 16)
        rng = np.random.default_rng(seed)
        f, h = random_real_field(g, rng), random_real_field(g, rng)
        for spec in (FracLaplacian(1.2), RieszGrad(0), Semigroup(1.5, 0.1)):
            lhs = apply_multiplier(f * a + h * b, spec).coeffs
            rhs = apply_multiplier(f, spec).coeffs * a + apply_multiplier(h, spec).coeffs * b
            assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("spec", MULTIPLIERS, ids=repr)
    def test_real_field_closure(self, spec, rng):
        g = make_grid(2, 32)
        f = random_real_field(g, rng, band=10)
        z = transform_inverse(apply_multiplier(f, spec), real=False)
        assert np.max(np.abs(z.imag)) <= 1e-12 * np.max(np.abs(z.real))

    def test_large_gevrey_lift_does_not_overflow(self):
        g = make_grid(2, 64)
        w = cosine_mode(g, (20, 20), 1e-300)
        out = apply_multiplier(w, Gevrey(1.0, 30.0, 1.0))
        assert np.all(np.isfinite(out.coeffs))
        assert abs(out.coeffs[g.index_of((20, 20))]) == pytest.approx(math.exp(math.log(0.5e-300) + 1200), rel=1e-12)


class TestDealiasedProduct:
    def test_two_modes(self):
        g = make_grid(2, 32)
        out = pointwise_product_dealiased(plane_wave(g, (2, 1)), plane_wave(g, (3, -4)))
        assert out.coeffs[g.index_of((5, -3))] == pytest.approx(1.0)
        out.coeffs[g.index_of((5, -3))] = 0
        assert np.max(np.abs(out.coeffs)) < 1e-15

    def test_constants(self):
        g = make_grid(2, 16)
        a = transform_forward(np.full(g.shape, 2.0), g)
        b = transform_forward(np.full(g.shape, -1.5), g)
        assert pointwise_product_dealiased(a, b).coeffs[0, 0] == pytest.approx(-3.0)

    def test_aliased_energy_removed(self):
        # sum mode beyond the cutoff: nothing survives, nothing folds back
        g = make_grid(1, 32)
        out = pointwise_product_dealiased(plane_wave(g, (9,)), plane_wave(g, (9,)))
        assert np.max(np.abs(out.coeffs)) < 1e-15

    def test_matches_padded_product_for_band_limited_inputs(self, rng):
        g = make_grid(2, 32)
        f = random_real_field(g, rng, band=5)
        h = random_real_field(g, rng, band=5)
        ref = transform_forward(transform_inverse(f) * transform_inverse(h), g)
        assert rel_err(pointwise_product_dealiased(f, h).coeffs, ref.coeffs) < 1e-13

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatchError):
            pointwise_product_dealiased(SpectralField.zeros(make_grid(2, 16)), SpectralField.zeros(make_grid(2, 32)))


class TestModelParams:
    def test_theta_fallback(self):
        g = make_grid(2, 16)
        assert ModelParams(1.0, g).theta == pytest.approx(0.25)
        assert ModelParams(1.5, g, gevrey_theta=0.3).theta == 0.3

    @pytest.mark.parametrize("alpha", [0.9, 2.1])
    def test_alpha_range(self, alpha):
        with pytest.raises(ConfigurationError):
            ModelParams(alpha, make_grid(2, 16))


class TestSnapshot:
    def test_round_trip(self, tmp_path, rng):
        g = make_grid(2, 16, 3.0)
        f = random_real_field(g, rng)
        path = save_snapshot(f, tmp_path / "u.npz")
        back = load_snapshot(path)
        assert back.grid == g
        assert np.array_equal(back.coeffs, f.coeffs)

    def test_format_fields(self, tmp_path):
        g = make_grid(2, 8)
        path = save_snapshot(SpectralField.zeros(g), tmp_path / "z.npz")
        with np.load(path) as data:
            assert {"format_version", "dim", "N", "period", "coeffs"} <= set(data.files)
