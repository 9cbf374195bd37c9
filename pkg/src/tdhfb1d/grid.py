"""Periodic spatial/spectral discretization for one- and two-variable complex data.

The domain is the box [-L, L) sampled at M points, x_j = -L + j*dx with
dx = 2L/M.  Fourier modes are xi_k = pi*k/L and are stored in the standard
FFT layout k = 0, 1, ..., M/2-1, -M/2, ..., -1, so snapshot files and
spectral arrays are portable across tools that follow the same convention.

Transform normalization: the forward transform approximates
fhat(xi) = integral dx e^{-i xi x} f(x) by a dx-weighted sum, and the
inverse carries the 1/(2L) factor.  Discrete spectra therefore converge to
their continuum counterparts without hidden constants; a constant field of
value 1 has all its mass 2L in the xi = 0 coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic truncation of the line: half-length L, even point count M."""

    L: float
    M: int

    def __post_init__(self):
        if self.M % 2 != 0 or self.M < 8:
            raise ValueError(f"grid point count M must be even and >= 8, got {self.M}")
        if not self.L > 0:
            raise ValueError(f"grid half-length L must be positive, got {self.L}")
        dx = 2.0 * self.L / self.M
        x = -self.L + dx * np.arange(self.M)
        k = np.fft.fftfreq(self.M) * self.M  # 0, 1, ..., M/2-1, -M/2, ..., -1
        xi = np.pi * k / self.L
        # alternating sign that converts numpy's FFT (indexed from x=0) to the
        # transform anchored at x=-L
        phase = (-1.0) ** np.arange(self.M)
        for name, val in (("dx", dx), ("x", x), ("xi", xi), ("_phase", phase)):
            object.__setattr__(self, name, val)

    @property
    def xi_max(self):
        return np.pi * (self.M // 2) / self.L


def make_grid(L, M):
    """Build a SpatialGrid, rejecting odd or too-small M and nonpositive L."""
    return SpatialGrid(float(L), int(M))


@dataclass
class Field:
    """Complex samples of a one-variable function on a grid."""

    grid: SpatialGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.M,):
            raise ValueError(
                f"field length {self.values.shape} does not match grid M={self.grid.M}"
            )

    def copy(self):
        return Field(self.grid, self.values.copy())


@dataclass
class Kernel:
    """Complex samples of a two-variable function on the grid square.

    Entry (j, l) approximates the value at (x_j, x_l).  The symmetry class
    declares the structural constraint the kernel is supposed to satisfy:
    ``hermitian`` means K(x, y) = conj(K(y, x)), ``symmetric`` means
    K(x, y) = K(y, x), ``none`` means no constraint is claimed.
    """

    grid: SpatialGrid
    values: np.ndarray
    symmetry_class: str = "none"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        M = self.grid.M
        if self.values.shape != (M, M):
            raise ValueError(
                f"kernel shape {self.values.shape} does not match grid ({M}, {M})"
            )
        if self.symmetry_class not in ("hermitian", "symmetric", "none"):
            raise ValueError(f"unknown symmetry class {self.symmetry_class!r}")

    def copy(self):
        return Kernel(self.grid, self.values.copy(), self.symmetry_class)


def check_same_grid(*objs):
    grids = {(o.grid.L, o.grid.M) for o in objs}
    if len(grids) > 1:
        raise GridMismatch(f"objects live on different grids: {sorted(grids)}")
    return objs[0].grid


def l2_norm(obj):
    """dx-weighted L2 norm of a Field, or dx^2-weighted norm of a Kernel."""
    if isinstance(obj, Field):
        return float(np.sqrt(obj.grid.dx * np.sum(np.abs(obj.values) ** 2)))
    if isinstance(obj, Kernel):
        return float(np.sqrt(obj.grid.dx**2 * np.sum(np.abs(obj.values) ** 2)))
    raise TypeError(f"expected Field or Kernel, got {type(obj)!r}")


def hermitian_residual(K):
    """Relative sup-norm deviation of a kernel from K(x,y) = conj(K(y,x))."""
    scale = np.max(np.abs(K.values))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(K.values - K.values.conj().T)) / scale)


def symmetric_residual(K):
    """Relative sup-norm deviation of a kernel from K(x,y) = K(y,x)."""
    scale = np.max(np.abs(K.values))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(K.values - K.values.T)) / scale)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def fft1(f: Field) -> Field:
    """Forward transform: coefficients fhat(xi_k) = dx * sum_j e^{-i xi_k x_j} f_j.

    The returned Field holds spectral coefficients indexed by the documented
    mode storage order.
    """
    g = f.grid
    coeffs = g.dx * g._phase * np.fft.fft(f.values)
    return Field(g, coeffs)


def ifft1(fhat: Field) -> Field:
    """Inverse of :func:`fft1`; carries the 1/(2L) normalization."""
    g = fhat.grid
    vals = np.fft.ifft(g._phase * fhat.values) / g.dx
    return Field(g, vals)


def fft2(K: Kernel) -> Kernel:
    """Two-variable forward transform in (xi, eta); same normalization per axis."""
    g = K.grid
    ph2 = np.outer(g._phase, g._phase)
    coeffs = g.dx**2 * ph2 * np.fft.fft2(K.values)
    return Kernel(g, coeffs, "none")


def ifft2(Khat: Kernel) -> Kernel:
    g = Khat.grid
    ph2 = np.outer(g._phase, g._phase)
    vals = np.fft.ifft2(ph2 * Khat.values) / g.dx**2
    return Kernel(g, vals, "none")


# ---------------------------------------------------------------------------
# Fourier multipliers
# ---------------------------------------------------------------------------
# Multipliers act as ifft(m * fft(values)); the anchoring phases cancel, so
# plain numpy transforms are used.


def apply_multiplier_1d(values, mult):
    return np.fft.ifft(mult * np.fft.fft(values))


def apply_multiplier_2d(values, mult):
    return np.fft.ifft2(mult * np.fft.fft2(values))


def _require_nonneg_order(s):
    if s < 0:
        raise ValueError(f"derivative order must be >= 0, got {s}")


def frac_deriv_x(f: Field, s) -> Field:
    """|xi|^s multiplier.  Annihilates constants for s > 0; identity for s = 0."""
    _require_nonneg_order(s)
    mult = np.abs(f.grid.xi) ** float(s)
    return Field(f.grid, apply_multiplier_1d(f.values, mult))


def bessel_deriv(f: Field, s) -> Field:
    """(1 + |xi|^2)^{s/2} multiplier on a one-variable field."""
    _require_nonneg_order(s)
    mult = (1.0 + f.grid.xi**2) ** (0.5 * float(s))
    return Field(f.grid, apply_multiplier_1d(f.values, mult))


def bessel_deriv2(K: Kernel, s) -> Kernel:
    """(1 + |xi|^2 + |eta|^2)^{s/2} multiplier on a two-variable kernel.

    The multiplier is even and exchange-symmetric, so the declared symmetry
    class of the input is preserved.
    """
    _require_nonneg_order(s)
    xi = K.grid.xi
    mult = (1.0 + xi[:, None] ** 2 + xi[None, :] ** 2) ** (0.5 * float(s))
    return Kernel(K.grid, apply_multiplier_2d(K.values, mult), K.symmetry_class)


def deriv_x(f: Field, order=1) -> Field:
    """Integer-order spectral derivative (i xi)^order.

    The Nyquist mode is zeroed for odd orders so that real inputs map to
    real outputs (standard spectral-differentiation hygiene).
    """
    order = int(order)
    _require_nonneg_order(order)
    mult = (1j * f.grid.xi) ** order
    if order % 2 == 1:
        mult[f.grid.M // 2] = 0.0
    return Field(f.grid, apply_multiplier_1d(f.values, mult))
