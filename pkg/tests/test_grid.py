"""Grid, transforms, and Fourier multipliers."""

import numpy as np
import pytest

from tdhfb1d import (
    Field,
    Kernel,
    bessel_deriv,
    bessel_deriv2,
    fft1,
    fft2,
    frac_deriv_x,
    ifft1,
    ifft2,
    l2_norm,
    make_grid,
)
from tdhfb1d.grid import deriv_x, hermitian_residual, symmetric_residual

EPS = np.finfo(float).eps


class TestMakeGrid:
    def test_spacing(self):
        g = make_grid(8.0, 16)
        assert g.dx == 1.0
        assert g.dx * g.M == 2 * g.L
        assert np.allclose(np.diff(g.x), 1.0)

    def test_spacing_pi(self):
        g = make_grid(np.pi, 8)
        assert np.isclose(g.dx, np.pi / 4)

    def test_mode_table_symmetric(self):
        g = make_grid(5.0, 32)
        for k in range(1, g.M // 2):
            assert g.xi[k] == -g.xi[-k]

    def test_rejects_odd_M(self):
        with pytest.raises(ValueError):
            make_grid(8.0, 15)

    def test_rejects_small_M(self):
        with pytest.raises(ValueError):
            make_grid(8.0, 4)

    def test_rejects_bad_L(self):
        with pytest.raises(ValueError):
            make_grid(0.0, 16)
        with pytest.raises(ValueError):
            make_grid(-2.0, 16)

    def test_field_length_checked(self):
        g = make_grid(8.0, 16)
        with pytest.raises(ValueError):
            Field(g, np.zeros(8))


class TestFFT1:
    def test_constant_mass(self):
        g = make_grid(8.0, 32)
        fh = fft1(Field(g, np.ones(g.M, complex)))
        assert np.isclose(fh.values[0], 2 * g.L)
        assert np.max(np.abs(fh.values[1:])) < 1e-12

    def test_plane_wave_single_coefficient(self):
        g = make_grid(8.0, 32)
        k = 5
        fh = fft1(Field(g, np.exp(1j * g.xi[k] * g.x)))
        assert np.isclose(fh.values[k], 2 * g.L)
        others = np.delete(fh.values, k)
        assert np.max(np.abs(others)) < 1e-11

    def test_gaussian_matches_closed_form(self):
        # fhat(xi) = sqrt(2 pi) exp(-xi^2/2); tails below 1e-50 at |x| = 16
        g = make_grid(16.0, 256)
        fh = fft1(Field(g, np.exp(-g.x**2 / 2)))
        sel = np.abs(g.xi) <= 5.0
        exact = np.sqrt(2 * np.pi) * np.exp(-g.xi[sel] ** 2 / 2)
        rel = np.abs(fh.values[sel] - exact) / np.abs(exact)
        assert np.max(rel) < 1e-10

    def test_round_trip(self, rng):
        g = make_grid(8.0, 64)
        f = Field(g, rng.standard_normal(g.M) + 1j * rng.standard_normal(g.M))
        back = ifft1(fft1(f))
        assert np.max(np.abs(back.values - f.values)) < 100 * EPS * np.max(
            np.abs(f.values)
        )

    def test_parseval(self, rng):
        g = make_grid(8.0, 64)
        f = Field(g, rng.standard_normal(g.M) + 1j * rng.standard_normal(g.M))
        phys = g.dx * np.sum(np.abs(f.values) ** 2)
        spec = np.sum(np.abs(fft1(f).values) ** 2) / (2 * g.L)
        assert np.isclose(phys, spec, rtol=1e-12)


class TestFFT2:
    def test_constant(self):
        g = make_grid(8.0, 16)
        Kh = fft2(Kernel(g, np.ones((g.M, g.M), complex)))
        assert np.isclose(Kh.values[0, 0], (2 * g.L) ** 2)
        rest = Kh.values.copy()
        rest[0, 0] = 0
        assert np.max(np.abs(rest)) < 1e-10

    def test_separable_product_factorizes(self, rng):
        g = make_grid(8.0, 32)
        f = rng.standard_normal(g.M) + 1j * rng.standard_normal(g.M)
        h = rng.standard_normal(g.M) + 1j * rng.standard_normal(g.M)
        Kh = fft2(Kernel(g, np.outer(f, h)))
        fh = fft1(Field(g, f)).values
        hh = fft1(Field(g, h)).values
        assert np.allclose(Kh.values, np.outer(fh, hh), rtol=1e-10, atol=1e-10)

    def test_round_trip_hermitian(self, rng):
        g = make_grid(8.0, 32)
        A = rng.standard_normal((g.M, g.M)) + 1j * rng.standard_normal((g.M, g.M))
        K = Kernel(g, 0.5 * (A + A.conj().T), "hermitian")
        back = ifft2(fft2(K))
        assert np.max(np.abs(back.values - K.values)) < 1e-12


class TestMultipliers:
    def test_frac_deriv_eigenfunction(self):
        g = make_grid(8.0, 32)
        k = 7
        f = Field(g, np.exp(1j * g.xi[k] * g.x))
        out = frac_deriv_x(f, 0.5)
        assert np.allclose(out.values, np.abs(g.xi[k]) ** 0.5 * f.values, rtol=1e-12)

    def test_frac_deriv_annihilates_constants(self):
        g = make_grid(8.0, 32)
        out = frac_deriv_x(Field(g, np.ones(g.M, complex)), 0.5)
        assert np.max(np.abs(out.values)) < 1e-13

    def test_bessel_zero_order_is_identity(self, rng):
        g = make_grid(8.0, 32)
        f = Field(g, rng.standard_normal(g.M) + 1j * rng.standard_normal(g.M))
        assert np.allclose(bessel_deriv(f, 0).values, f.values, rtol=1e-13)

    def test_rejects_negative_order(self, rng):
        g = make_grid(8.0, 32)
        f = Field(g, np.ones(g.M, complex))
        for func in (frac_deriv_x, bessel_deriv):
            with pytest.raises(ValueError):
                func(f, -0.5)
        with pytest.raises(ValueError):
            bessel_deriv2(Kernel(g, np.ones((g.M, g.M), complex)), -1.0)

    def test_multiplier_composition(self, rng):
        g = make_grid(8.0, 64)
        f = Field(g, rng.standard_normal(g.M) + 1j * rng.standard_normal(g.M))
        ab = frac_deriv_x(frac_deriv_x(f, 0.3), 0.7)
        onego = frac_deriv_x(f, 1.0)
        assert np.allclose(ab.values, onego.values, rtol=1e-11, atol=1e-11)

    def test_bessel2_separable_reference(self, rng):
        # on f (x) g, the 2D multiplier with s=2 is (1 + |xi|^2 + |eta|^2),
        # checkable from the 1D factor spectra
        g = make_grid(8.0, 32)
        f = rng.standard_normal(g.M) + 1j * rng.standard_normal(g.M)
        h = rng.standard_normal(g.M) + 1j * rng.standard_normal(g.M)
        K = Kernel(g, np.outer(f, h))
        out = bessel_deriv2(K, 2.0)
        fh = fft1(Field(g, f)).values
        hh = fft1(Field(g, h)).values
        mult = 1.0 + g.xi[:, None] ** 2 + g.xi[None, :] ** 2
        expected = ifft2(Kernel(g, mult * np.outer(fh, hh))).values
        assert np.allclose(out.values, expected, rtol=1e-10, atol=1e-10)

    def test_bessel2_preserves_symmetry_classes(self, rng):
        g = make_grid(8.0, 32)
        A = rng.standard_normal((g.M, g.M)) + 1j * rng.standard_normal((g.M, g.M))
        H = Kernel(g, 0.5 * (A + A.conj().T), "hermitian")
        S = Kernel(g, 0.5 * (A + A.T), "symmetric")
        outH = bessel_deriv2(H, 0.7)
        outS = bessel_deriv2(S, 0.7)
        assert outH.symmetry_class == "hermitian"
        assert outS.symmetry_class == "symmetric"
        assert hermitian_residual(outH) < 1e-12
        assert symmetric_residual(outS) < 1e-12

    def test_odd_derivative_keeps_real_fields_real(self, rng):
        g = make_grid(8.0, 32)
        f = Field(g, rng.standard_normal(g.M).astype(complex))
        out = deriv_x(f, 1)
        assert np.max(np.abs(out.values.imag)) < 1e-12


def test_l2_norm_types(grid32):
    f = Field(grid32, np.ones(grid32.M, complex))
    assert np.isclose(l2_norm(f), np.sqrt(2 * grid32.L))
    with pytest.raises(TypeError):
        l2_norm(np.ones(4))
