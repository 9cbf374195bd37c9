"""Seeded random fields and kernels for ensembles and property tests.

Data is synthesized from a fixed-size block of random Fourier coefficients
on modes |k| <= band, optionally multiplied by a Gaussian spatial envelope.
Because the coefficient block and the draw order depend only on (band,
seed), the same generator seed produces samples of the *same underlying
function* on any grid fine enough to hold the band, which is what makes
refinement studies (M -> 2M) meaningful for ensemble statistics.
"""

from __future__ import annotations

import numpy as np

from .bogoliubov import PairExcitation, quasifree_state
from .dynamics import SystemState
from .grid import Field, Kernel, l2_norm


def _mode_matrix(grid, band):
    if band >= grid.M // 2:
        raise ValueError(f"band {band} does not fit on grid with M={grid.M}")
    k = np.arange(-band, band + 1)
    xi = np.pi * k / grid.L
    return np.exp(1j * np.outer(grid.x, xi)), k


def _coeff_decay(k, band):
    return np.exp(-((2.0 * k / band) ** 2))


def random_field(grid, rng, band=8, envelope_width=None, norm=1.0) -> Field:
    """Band-limited random complex field, scaled to the requested L2 norm."""
    E, k = _mode_matrix(grid, band)
    c = (rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size)) * _coeff_decay(
        k, band
    )
    vals = E @ c
    if envelope_width is not None:
        vals = vals * np.exp(-grid.x**2 / (2.0 * envelope_width**2))
    f = Field(grid, vals)
    scale = l2_norm(f)
    if scale > 0:
        f.values *= norm / scale
    return f


def _random_kernel(grid, rng, band, envelope_width, symmetrize, carrier_mode):
    E, k = _mode_matrix(grid, band)
    n = k.size
    D = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * np.outer(
        _coeff_decay(k, band), _coeff_decay(k, band)
    )
    C = symmetrize(D)
    vals = E @ C @ E.T
    if envelope_width is not None:
        env = np.exp(-grid.x**2 / (2.0 * envelope_width**2))
        vals = env[:, None] * vals * env[None, :]
    if carrier_mode:
        # cos(omega (x-y)) shifts the spectrum to counter-propagating blocks
        # at (+omega, -omega) and (-omega, +omega); preserves both symmetry
        # classes and keeps the kernel exactly representable on any grid
        # that carries the mode.
        omega = np.pi * carrier_mode / grid.L
        vals = vals * np.cos(omega * (grid.x[:, None] - grid.x[None, :]))
    return vals


def random_hermitian_kernel(
    grid, rng, band=8, envelope_width=None, norm=1.0, carrier_mode=0
) -> Kernel:
    """Random kernel with K(x,y) = conj(K(y,x)), unit (or given) L2 norm."""
    vals = _random_kernel(
        grid, rng, band, envelope_width,
        lambda D: 0.5 * (D + D[::-1, ::-1].T.conj()),
        carrier_mode,
    )
    K = Kernel(grid, vals, "hermitian")
    scale = l2_norm(K)
    if scale > 0:
        K.values *= norm / scale
    return K


def random_symmetric_kernel(
    grid, rng, band=8, envelope_width=None, norm=1.0, carrier_mode=0
) -> Kernel:
    """Random kernel with K(x,y) = K(y,x), unit (or given) L2 norm."""
    vals = _random_kernel(
        grid, rng, band, envelope_width, lambda D: 0.5 * (D + D.T), carrier_mode
    )
    K = Kernel(grid, vals, "symmetric")
    scale = l2_norm(K)
    if scale > 0:
        K.values *= norm / scale
    return K


def random_pair_excitation(grid, rng, band=6, norm=0.3) -> PairExcitation:
    """Random symmetric pair-excitation kernel of the given L2 norm."""
    return PairExcitation(random_symmetric_kernel(grid, rng, band=band, norm=norm))


def random_system_state(grid, pot, rng, band=6, amplitude=0.5) -> SystemState:
    """Generic smooth state: random phi, hermitian Gamma, symmetric Lambda.

    Not quasifree-consistent; intended for exercising the right-hand sides
    and their algebraic contracts on arbitrary admissible data.
    """
    phi = random_field(grid, rng, band=band, norm=amplitude)
    G = random_hermitian_kernel(grid, rng, band=band, norm=amplitude)
    L = random_symmetric_kernel(grid, rng, band=band, norm=amplitude)
    return SystemState(0.0, phi, G, L, pot)


def random_quasifree_state(grid, pot, rng, band=6, k_norm=0.3, tol=1e-13) -> SystemState:
    """Quasifree-consistent state built from random (phi, k)."""
    phi = random_field(grid, rng, band=band, norm=1.0)
    k = random_pair_excitation(grid, rng, band=band, norm=k_norm)
    G, L = quasifree_state(phi, k, pot.N, tol)
    return SystemState(0.0, phi, G, L, pot)
