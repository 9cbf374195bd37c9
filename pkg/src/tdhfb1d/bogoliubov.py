"""Pair-excitation operator calculus: sh(k), ch(k) series and quasifree data.

Kernels are identified with integral operators; composition is the
dx-weighted discretization of (A o B)(x, z) = integral dy A(x, y) B(y, z),
i.e. dx * A @ B on sample matrices, and the discrete identity kernel is
I/dx.

The hyperbolic series are

    sh(k) = k + k o kbar o k / 3! + k o kbar o k o kbar o k / 5! + ...
    ch(k) = delta + p(k),  p(k) = kbar o k / 2! + kbar o k o kbar o k / 4! + ...

evaluated by iterating the alternating composition k o kbar; terms decay
factorially for bounded k, and evaluation stops once the next term drops
below the requested tolerance in the L2 kernel norm.

Quasifree initial data built from (phi, k) uses the correspondence

    Gamma  = |phi><phi| + (1/N) sh(k) o conj(sh(k))
    Lambda = phi (x) phi + (1/N) sh(k) o ch(k)

with |phi><phi| the kernel phi(x) conj(phi(y)).  The conjugation placement
is not taken on faith: the constructor verifies that Gamma comes out
hermitian and Lambda symmetric and refuses to proceed otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence
from .grid import (
    Field,
    Kernel,
    check_same_grid,
    l2_norm,
    symmetric_residual,
)

SERIES_TERM_CAP = 64


@dataclass
class PairExcitation:
    """Symmetric kernel k(x, y) = k(y, x) generating a quasifree state."""

    k: Kernel

    def __post_init__(self):
        if symmetric_residual(self.k) > 1e-10:
            raise ValueError("pair excitation kernel must be symmetric")
        self.k = Kernel(self.k.grid, self.k.values, "symmetric")

    @property
    def grid(self):
        return self.k.grid


def rank_one_excitation(grid, c, u: Field) -> PairExcitation:
    """k = c * u (x) u for a real field u, normalized to dx-weighted unit norm."""
    vals = np.asarray(u.values)
    nrm = np.sqrt(grid.dx * np.sum(np.abs(vals) ** 2))
    vals = vals / nrm
    return PairExcitation(Kernel(grid, c * np.outer(vals, vals), "symmetric"))


def identity_kernel(grid) -> Kernel:
    """Discrete delta: 1/dx on the diagonal (the unit of composition)."""
    return Kernel(grid, np.eye(grid.M, dtype=complex) / grid.dx, "hermitian")


def compose(A: Kernel, B: Kernel) -> Kernel:
    """Operator composition (A o B)(x, z) = dx-weighted sum over y."""
    g = check_same_grid(A, B)
    return Kernel(g, g.dx * (A.values @ B.values), "none")


def _series(k: PairExcitation, tol, which):
    """Shared evaluator for the sh ('odd') and p ('even') alternating series."""
    if tol <= 0:
        raise ValueError("series tolerance must be positive")
    g = k.grid
    kv = k.k.values
    kbar_k = g.dx * (kv.conj() @ kv)
    if which == "odd":
        term = kv.copy()  # k / 1!
        fac_step = lambda n: (2 * n) * (2 * n + 1)  # 1/(2n-1)! -> 1/(2n+1)!
    else:
        term = g.dx * 0.5 * (kv.conj() @ kv)  # kbar o k / 2!
        fac_step = lambda n: (2 * n + 1) * (2 * n + 2)  # 1/(2n)! -> 1/(2n+2)!
    total = term.copy()
    if _knorm(g, term) < tol:
        return total, 1
    for n in range(1, SERIES_TERM_CAP + 1):
        term = g.dx * (term @ kbar_k) / fac_step(n)
        if _knorm(g, term) < tol:
            return total, n + 1
        total += term
    raise NonConvergence(
        f"sh/ch series did not reach tol={tol} within {SERIES_TERM_CAP} terms; "
        "the pair excitation kernel is too large for series evaluation"
    )


def _knorm(g, values):
    return np.sqrt(g.dx**2 * np.sum(np.abs(values) ** 2))


def sh(k: PairExcitation, tol=1e-14) -> Kernel:
    """Truncated series for sh(k); the output is a symmetric kernel."""
    total, _ = _series(k, tol, "odd")
    return Kernel(k.grid, total, "symmetric")


def ch(k: PairExcitation, tol=1e-14) -> Kernel:
    """Truncated series for ch(k) = delta + p(k); hermitian."""
    p = p_kernel(k, tol)
    return Kernel(k.grid, identity_kernel(k.grid).values + p.values, "hermitian")


def p_kernel(k: PairExcitation, tol=1e-14) -> Kernel:
    """The ch(k) series without its delta: p(k) = kbar o k / 2! + ..."""
    if _knorm(k.grid, k.k.values) == 0.0:
        return Kernel(k.grid, np.zeros_like(k.k.values), "hermitian")
    total, _ = _series(k, tol, "even")
    return Kernel(k.grid, total, "hermitian")


def sh2k(k: PairExcitation, tol=1e-14) -> Kernel:
    """Product form of the double-argument identity: 2 sh(k) o ch(k).

    Exposed so the identity against sh evaluated at 2k can be tested
    directly.
    """
    return Kernel(k.grid, 2.0 * compose(sh(k, tol), ch(k, tol)).values, "symmetric")


def quasifree_state(phi: Field, k: PairExcitation, N, tol=1e-14):
    """Quasifree-consistent (Gamma, Lambda) from a condensate and pair excitation.

    Returns (Gamma, Lambda) with Gamma hermitian positive semidefinite and
    Lambda symmetric.  Raises if the constructed kernels violate their
    symmetry contracts, which would indicate a conjugation-placement bug
    rather than a recoverable data problem.
    """
    g = check_same_grid(phi, k.k)
    if not N >= 1:
        raise ValueError(f"particle number N must be >= 1, got {N}")
    S = sh(k, tol)
    C = ch(k, tol)
    proj = np.outer(phi.values, phi.values.conj())
    pair = g.dx * (S.values @ S.values.conj())  # sh o conj(sh)
    gamma = Kernel(g, proj + pair / N, "hermitian")
    lam = Kernel(
        g,
        np.outer(phi.values, phi.values) + g.dx * (S.values @ C.values) / N,
        "symmetric",
    )
    herm = np.max(np.abs(gamma.values - gamma.values.conj().T))
    symm = np.max(np.abs(lam.values - lam.values.T))
    scale = max(np.max(np.abs(gamma.values)), np.max(np.abs(lam.values)), 1e-300)
    if herm / scale > 1e-10 or symm / scale > 1e-10:
        raise AssertionError(
            "quasifree construction violated its symmetry contracts "
            f"(hermitian residual {herm / scale:.2e}, symmetric residual {symm / scale:.2e})"
        )
    return gamma, lam
