"""Right-hand sides of the three coupled TDHFB kernel equations.

Conventions (pinned by the invariant suite, not assumed): Gamma is hermitian,
Lambda is symmetric, the condensate projection |phi><phi| has kernel
phi(x) conj(phi(y)), and the fluctuation parts are
Gamma^phi = Gamma - |phi><phi| and Lambda^phi = Lambda - phi (x) phi.
With S = (1/i) d/dt - Lap_x, S_pm = S + Lap_y and S_2 = S - Lap_y, the
system reads S phi = F_phi, S_pm Gamma = F_Gamma and
(S_2 + v_N(x-y)/N) Lambda = F_Lambda with

  F_phi   = -(v_N * rho_Gamma) phi - kappa(Gamma^phi) phi
            - kappa(Lambda^phi) conj(phi)
  F_Gamma = -[kappa(Lam) o conj(Lam) - Lam o conj(kappa(Lam))]
            - [kappa(Gam) o Gam - Gam o kappa(Gam)]
            - [(v*rho)(x) - (v*rho)(y)] Gam
            + 2 [(v*|phi|^2)(x) - (v*|phi|^2)(y)] phi(x) conj(phi(y))
  F_Lambda= -[(v*rho)(x) + (v*rho)(y)] Lam
            - [kappa(Lam) o conj(Gam) + Lam o kappa(conj(Gam))
               + kappa(Gam) o Lam + Gam o kappa(Lam)]
            + 2 [(v*|phi|^2)(x) + (v*|phi|^2)(y)] phi(x) phi(y)

F_Gamma satisfies the skew contract F(x,y) = -conj(F(y,x)) and F_Lambda is
symmetric; the difference/sum weights vanish/double on the diagonal, which
makes the total particle number conserved by construction.  This exact
conjugation placement is the unique one (among the sign/conjugate variants
of the same displays) under which the flow conserves the energy functional
in diagnostics; the alternatives fail the conservation check at first order
and are rejected.

The integral terms are realized as kappa-weighted kernel compositions
(dense M x M products) and FFT convolutions for the v_N * rho terms;
plain dx-weighted Riemann sums are the quadrature throughout, consistent
with the periodic spectral grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonHermitianDiagonal
from .grid import Field, Kernel, check_same_grid
from .potential import InteractionPotential, convolve_vN, pair_table


@dataclass
class SystemState:
    """Time t plus (phi, Gamma, Lambda) and the model parameters."""

    t: float
    phi: Field
    Gamma: Kernel
    Lambda: Kernel
    pot: InteractionPotential

    def __post_init__(self):
        check_same_grid(self.phi, self.Gamma, self.Lambda)

    @property
    def grid(self):
        return self.phi.grid

    def copy(self):
        return SystemState(
            self.t, self.phi.copy(), self.Gamma.copy(), self.Lambda.copy(), self.pot
        )


def rho(Gamma: Kernel, imag_tol=1e-8) -> Field:
    """Diagonal restriction rho(x) = Gamma(x, x); real for hermitian Gamma.

    The imaginary part is discarded after asserting it is small relative to
    the diagonal's magnitude.
    """
    diag = np.ascontiguousarray(np.diagonal(Gamma.values))
    scale = np.max(np.abs(diag))
    if scale > 0.0 and np.max(np.abs(diag.imag)) > imag_tol * scale:
        raise NonHermitianDiagonal(
            f"kernel diagonal has relative imaginary part "
            f"{np.max(np.abs(diag.imag)) / scale:.2e} > {imag_tol}"
        )
    return Field(Gamma.grid, diag.real.astype(complex))


def shifted_diagonal(K: Kernel, z: int) -> Field:
    """Field of values K(x + z dx, x) with periodic wrap."""
    M = K.grid.M
    j = np.arange(M)
    return Field(K.grid, K.values[(j + int(z)) % M, j])


def condensate_projection(phi: Field) -> Kernel:
    """|phi><phi| with kernel phi(x) conj(phi(y)); hermitian rank one."""
    return Kernel(phi.grid, np.outer(phi.values, phi.values.conj()), "hermitian")


def _convolved(pot, grid, vals_real):
    return convolve_vN(pot, Field(grid, vals_real.astype(complex))).values.real


def rhs_phi(s: SystemState) -> Field:
    """Forcing F with (1/i) d/dt phi - Lap phi = F."""
    g = s.grid
    phi = s.phi.values
    V2 = pair_table(s.pot, g)
    rho_vals = rho(s.Gamma).values.real
    q = _convolved(s.pot, g, rho_vals)
    Gphi = s.Gamma.values - np.outer(phi, phi.conj())
    Lphi = s.Lambda.values - np.outer(phi, phi)
    out = -q * phi
    out -= g.dx * ((V2 * Gphi) @ phi)
    out -= g.dx * ((V2 * Lphi) @ phi.conj())
    return Field(g, out)


def rhs_gamma(s: SystemState) -> Kernel:
    """Forcing of the Gamma equation; satisfies F(x,y) = -conj(F(y,x))."""
    g = s.grid
    dx = g.dx
    phi = s.phi.values
    G = s.Gamma.values
    Lam = s.Lambda.values
    V2 = pair_table(s.pot, g)
    rho_vals = np.diagonal(G).real
    q = _convolved(s.pot, g, rho_vals)
    q2 = _convolved(s.pot, g, np.abs(phi) ** 2)

    kapL = V2 * Lam
    kapG = V2 * G
    out = -dx * (kapL @ Lam.conj() - Lam @ kapL.conj())
    out -= dx * (kapG @ G - G @ kapG)
    out -= (q[:, None] - q[None, :]) * G
    out += 2.0 * (q2[:, None] - q2[None, :]) * np.outer(phi, phi.conj())
    return Kernel(g, out, "none")


def rhs_lambda(s: SystemState) -> Kernel:
    """Forcing of the Lambda equation; symmetric F(x,y) = F(y,x).

    The pointwise potential term v_N(x-y) Lambda / N stays on the left side
    of the equation and is handled by the integrator as an exact phase.
    """
    g = s.grid
    dx = g.dx
    phi = s.phi.values
    G = s.Gamma.values
    Lam = s.Lambda.values
    V2 = pair_table(s.pot, g)
    rho_vals = np.diagonal(G).real
    q = _convolved(s.pot, g, rho_vals)
    q2 = _convolved(s.pot, g, np.abs(phi) ** 2)

    kapL = V2 * Lam
    kapG = V2 * G
    out = -(q[:, None] + q[None, :]) * Lam
    out -= dx * (kapL @ G.conj() + Lam @ kapG.conj() + kapG @ Lam + G @ kapL)
    out += 2.0 * (q2[:, None] + q2[None, :]) * np.outer(phi, phi)
    return Kernel(g, out, "symmetric")
