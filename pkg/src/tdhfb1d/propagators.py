"""Exact spectral free propagators and the entrywise Lambda potential phase.

Sign conventions are pinned by the plane-wave test: with
(1/i) d/dt phi = Lap phi, a mode e^{i xi x} acquires the phase
e^{-i xi^2 t}.  The two-variable flows follow from the operators
(1/i) d/dt - Lap_x + Lap_y (Gamma) and (1/i) d/dt - Lap_x - Lap_y (Lambda):

    phi_hat    <- exp(-i xi^2 t)            phi_hat
    Gamma_hat  <- exp(-i (xi^2 - eta^2) t)  Gamma_hat
    Lambda_hat <- exp(-i (xi^2 + eta^2) t)  Lambda_hat

All three are exactly unitary in L2 and preserve the declared symmetry
classes.
"""

from __future__ import annotations

import numpy as np

from .grid import Field, Kernel, apply_multiplier_1d, apply_multiplier_2d
from .potential import InteractionPotential, pair_table


def phi_phase(grid, t):
    return np.exp(-1j * grid.xi**2 * t)


def gamma_phase(grid, t):
    a = np.exp(-1j * grid.xi**2 * t)
    return np.outer(a, a.conj())


def lambda_phase(grid, t):
    a = np.exp(-1j * grid.xi**2 * t)
    return np.outer(a, a)


def free_phi(phi: Field, t) -> Field:
    return Field(phi.grid, apply_multiplier_1d(phi.values, phi_phase(phi.grid, t)))


def free_gamma(Gamma: Kernel, t) -> Kernel:
    vals = apply_multiplier_2d(Gamma.values, gamma_phase(Gamma.grid, t))
    return Kernel(Gamma.grid, vals, Gamma.symmetry_class)


def free_lambda(Lam: Kernel, t) -> Kernel:
    vals = apply_multiplier_2d(Lam.values, lambda_phase(Lam.grid, t))
    return Kernel(Lam.grid, vals, Lam.symmetry_class)


def potential_phase_table(pot: InteractionPotential, grid, t):
    """exp(-i t v_N(x-y)/N) as an M x M table."""
    return np.exp(-1j * (t / pot.N) * pair_table(pot, grid))


def lambda_potential_phase(Lam: Kernel, pot: InteractionPotential, t) -> Kernel:
    """Exact entrywise phase for the (1/N) v_N(x-y) Lambda term.

    Norm-preserving and symmetry-preserving for any t; the only N-singular
    term of the system is thereby handled without a stability constraint.
    """
    table = potential_phase_table(pot, Lam.grid, t)
    return Kernel(Lam.grid, table * Lam.values, Lam.symmetry_class)
