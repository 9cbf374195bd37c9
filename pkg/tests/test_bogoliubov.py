"""Pair-excitation calculus: compose, sh/ch series, quasifree data."""

import numpy as np
import pytest

from tdhfb1d import (
    Field,
    Kernel,
    NonConvergence,
    PairExcitation,
    ch,
    compose,
    identity_kernel,
    l2_norm,
    make_grid,
    quasifree_state,
    rank_one_excitation,
    sh,
    sh2k,
)
from tdhfb1d.bogoliubov import p_kernel
from tdhfb1d.errors import GridMismatch
from tdhfb1d.grid import hermitian_residual, symmetric_residual
from tdhfb1d.randomdata import random_field, random_pair_excitation


def compose_oracle(g, A, B):
    """Direct triple-loop discretization of the kernel composition."""
    M = g.M
    out = np.zeros((M, M), dtype=complex)
    for i in range(M):
        for j in range(M):
            acc = 0.0 + 0.0j
            for y in range(M):
                acc += A[i, y] * B[y, j]
            out[i, j] = g.dx * acc
    return out


def normalized_u(g, width=1.0):
    u = np.exp(-g.x**2 / (2 * width**2))
    return u / np.sqrt(g.dx * np.sum(u**2))


class TestCompose:
    def test_identity_element(self, rng):
        g = make_grid(8.0, 16)
        A = Kernel(g, rng.standard_normal((g.M, g.M)) + 0j)
        delta = identity_kernel(g)
        assert np.allclose(compose(A, delta).values, A.values, rtol=1e-13)
        assert np.allclose(compose(delta, A).values, A.values, rtol=1e-13)

    def test_rank_one_projection_algebra(self):
        g = make_grid(8.0, 32)
        u = Field(g, (np.exp(-g.x**2) + 0.3) + 0j)
        P = Kernel(g, np.outer(u.values, u.values))
        nrm2 = g.dx * np.sum(u.values**2)
        assert np.allclose(compose(P, P).values, nrm2 * P.values, rtol=1e-12)

    def test_matches_triple_loop_oracle(self, rng):
        g = make_grid(4.0, 8)
        A = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        B = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        got = compose(Kernel(g, A), Kernel(g, B)).values
        want = compose_oracle(g, A, B)
        assert np.max(np.abs(got - want)) < 1e-12

    def test_associative(self, rng):
        g = make_grid(4.0, 16)
        A, B, C = (
            Kernel(g, rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16)))
            for _ in range(3)
        )
        lhs = compose(compose(A, B), C).values
        rhs = compose(A, compose(B, C)).values
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    def test_grid_mismatch(self, rng):
        A = Kernel(make_grid(8.0, 16), np.zeros((16, 16)))
        B = Kernel(make_grid(4.0, 16), np.zeros((16, 16)))
        with pytest.raises(GridMismatch):
            compose(A, B)


class TestShCh:
    def test_zero_excitation(self):
        g = make_grid(8.0, 32)
        k = PairExcitation(Kernel(g, np.zeros((g.M, g.M)), "symmetric"))
        assert l2_norm(sh(k)) == 0.0
        assert np.allclose(ch(k).values, identity_kernel(g).values)

    def test_rank_one_closed_form(self):
        # k = c u (x) u collapses the series to sinh/cosh
        g = make_grid(8.0, 64)
        c = 0.7
        u = normalized_u(g)
        k = rank_one_excitation(g, c, Field(g, u + 0j))
        P = np.outer(u, u)
        assert np.max(np.abs(sh(k).values - np.sinh(c) * P)) < 1e-10
        expected_ch = identity_kernel(g).values + (np.cosh(c) - 1.0) * P
        assert np.max(np.abs(ch(k).values - expected_ch)) < 1e-10

    def test_hyperbolic_identity_random(self, rng):
        # ch o ch - conj(sh) o sh = delta
        g = make_grid(8.0, 32)
        for _ in range(5):
            k = random_pair_excitation(g, rng, band=5, norm=0.5)
            C = ch(k, 1e-12)
            S = sh(k, 1e-12)
            resid = (
                compose(C, C).values
                - compose(Kernel(g, S.values.conj()), S).values
                - identity_kernel(g).values
            )
            assert np.sqrt(g.dx**2 * np.sum(np.abs(resid) ** 2)) < 1e-9

    def test_nonconvergence_for_large_k(self):
        g = make_grid(8.0, 32)
        u = normalized_u(g)
        k = rank_one_excitation(g, 500.0, Field(g, u + 0j))
        with pytest.raises(NonConvergence):
            sh(k, 1e-14)

    def test_rejects_asymmetric_kernel(self, rng):
        g = make_grid(8.0, 16)
        A = rng.standard_normal((16, 16))
        with pytest.raises(ValueError):
            PairExcitation(Kernel(g, A))


class TestSh2k:
    def test_zero(self):
        g = make_grid(8.0, 32)
        k = PairExcitation(Kernel(g, np.zeros((g.M, g.M)), "symmetric"))
        assert l2_norm(sh2k(k)) == 0.0

    def test_rank_one_double_angle(self):
        g = make_grid(8.0, 64)
        c = 0.4
        u = normalized_u(g)
        k = rank_one_excitation(g, c, Field(g, u + 0j))
        P = np.outer(u, u)
        assert np.max(np.abs(sh2k(k).values - np.sinh(2 * c) * P)) < 1e-10

    def test_double_angle_identity_random(self, rng):
        # sh(2k) = 2 sh(k) o ch(k)
        g = make_grid(8.0, 32)
        for _ in range(5):
            k = random_pair_excitation(g, rng, band=5, norm=0.3)
            doubled = PairExcitation(Kernel(g, 2.0 * k.k.values, "symmetric"))
            lhs = sh(doubled, 1e-12).values
            rhs = sh2k(k, 1e-12).values
            assert np.sqrt(g.dx**2 * np.sum(np.abs(lhs - rhs) ** 2)) < 1e-9


class TestQuasifree:
    def test_pure_condensate(self):
        g = make_grid(8.0, 32)
        phi = random_field(g, np.random.default_rng(3), band=4, norm=1.0)
        k = PairExcitation(Kernel(g, np.zeros((g.M, g.M)), "symmetric"))
        G, L = quasifree_state(phi, k, 8.0)
        assert np.allclose(G.values, np.outer(phi.values, phi.values.conj()))
        assert np.allclose(L.values, np.outer(phi.values, phi.values))

    def test_rank_one_orthogonal_condensate(self):
        # phi orthogonal to u: Gamma = |phi><phi| + sinh(c)^2/N u (x) u
        g = make_grid(8.0, 64)
        c, N = 0.5, 16.0
        u = normalized_u(g)
        # odd function is orthogonal to the even u
        phi_vals = g.x * np.exp(-g.x**2 / 2)
        phi_vals = phi_vals / np.sqrt(g.dx * np.sum(phi_vals**2))
        phi = Field(g, phi_vals + 0j)
        k = rank_one_excitation(g, c, Field(g, u + 0j))
        G, _ = quasifree_state(phi, k, N)
        expected = np.outer(phi_vals, phi_vals) + (np.sinh(c) ** 2 / N) * np.outer(u, u)
        assert np.max(np.abs(G.values - expected)) < 1e-10

    def test_gamma_psd_and_symmetries(self, rng):
        g = make_grid(8.0, 48)
        for _ in range(5):
            phi = random_field(g, rng, band=5, norm=1.0)
            k = random_pair_excitation(g, rng, band=5, norm=0.4)
            G, L = quasifree_state(phi, k, 12.0)
            assert G.symmetry_class == "hermitian"
            assert L.symmetry_class == "symmetric"
            assert hermitian_residual(G) < 1e-12
            assert symmetric_residual(L) < 1e-12
            evals = np.linalg.eigvalsh(g.dx * G.values)
            assert evals.min() > -1e-10

    def test_trace_identity(self, rng):
        # dx sum rho = ||phi||^2 + ||sh||^2 / N
        g = make_grid(8.0, 48)
        phi = random_field(g, rng, band=5, norm=1.0)
        k = random_pair_excitation(g, rng, band=5, norm=0.4)
        N = 10.0
        G, _ = quasifree_state(phi, k, N)
        trace = g.dx * np.diagonal(G.values).real.sum()
        expected = l2_norm(phi) ** 2 + l2_norm(sh(k)) ** 2 / N
        assert np.isclose(trace, expected, rtol=1e-12)


class TestPKernel:
    def test_trace_positivity(self, rng):
        # diagonal of p(k) = ch(k) - delta is nonnegative
        g = make_grid(8.0, 32)
        for _ in range(5):
            k = random_pair_excitation(g, rng, band=5, norm=0.5)
            diag = np.diagonal(p_kernel(k).values).real
            assert diag.min() > -1e-12

    def test_p_norm_dominated_by_sh_norm(self, rng):
        # ||p(k)||^2 <= ||p o p + 2p||_Tr = ||sh(k)||^2
        g = make_grid(8.0, 32)
        for _ in range(5):
            k = random_pair_excitation(g, rng, band=5, norm=0.5)
            p = p_kernel(k)
            assert l2_norm(p) ** 2 <= l2_norm(sh(k)) ** 2 + 1e-12

    def test_residual_scales_with_tolerance(self, rng):
        # (ch o ch - conj(sh) o sh - delta) stays below 10x the series tol
        g = make_grid(8.0, 32)
        k = random_pair_excitation(g, rng, band=5, norm=0.5)
        for tol in (1e-8, 1e-10, 1e-12):
            C, S = ch(k, tol), sh(k, tol)
            resid = (
                compose(C, C).values
                - compose(Kernel(g, S.values.conj()), S).values
                - identity_kernel(g).values
            )
            assert np.sqrt(g.dx**2 * np.sum(np.abs(resid) ** 2)) < 10 * tol
