"""The scaled interaction family v_N, its convolutions, and the kappa operator.

The interaction is v_N(x) = N^beta * v(N^beta * x) for an even, nonnegative,
integrable profile v.  Built-in profiles are the unit-mass gaussian
v(x) = pi^{-1/2} e^{-x^2} and sech2 v(x) = sech(x)^2 / 2; a tabulated profile
may be supplied as (x, v(x)) samples on a uniform symmetric grid, and a
``zero`` profile turns the interaction off for free-flow checks.

Resolution policy: by default the grid must carry at least 8 points across
the e^{-1} width of v_N, otherwise sampling it would silently alias and
corrupt every downstream estimate.  Runs that deliberately probe the
delta-like regime (large N^beta on a fixed grid) may lower
``min_resolution_points``; below the 8-point threshold the sampled table is
rescaled to carry the exact profile mass so that the interaction strength
stays comparable across an N-sweep instead of growing with the sampling
error.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import UnderresolvedPotential
from .grid import Field, Kernel, SpatialGrid, check_same_grid

RESOLVED_POINTS = 8.0

_PROFILES = ("gaussian", "sech2", "tabulated", "zero")


@dataclass(frozen=True)
class InteractionPotential:
    """Scaled two-body interaction v_N(x) = N^beta v(N^beta x).

    ``table`` holds a tabulated profile as a pair of tuples (x values,
    v values); it is only consulted when profile == "tabulated".
    """

    profile: str
    beta: float
    N: float
    table: tuple | None = None
    min_resolution_points: float = RESOLVED_POINTS

    def __post_init__(self):
        if self.profile not in _PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}; choose from {_PROFILES}")
        if not self.beta > 0:
            raise ValueError(f"scaling exponent beta must be positive, got {self.beta}")
        if not self.N >= 1:
            raise ValueError(f"particle number N must be >= 1, got {self.N}")
        if self.profile == "tabulated":
            if self.table is None:
                raise ValueError("tabulated profile requires a (x, v) table")
            xs, vs = (np.asarray(t, dtype=float) for t in self.table)
            if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 8:
                raise ValueError("profile table must be two equal 1D columns, >= 8 rows")
            h = np.diff(xs)
            if not np.allclose(h, h[0], rtol=1e-8, atol=0.0):
                raise ValueError("profile table must be uniformly spaced")
            if np.any(vs < -1e-12 * max(vs.max(initial=0.0), 1.0)):
                raise ValueError("profile must be nonnegative")
            if abs(xs[0] + xs[-1]) > 1e-8 * (xs[-1] - xs[0]):
                raise ValueError("profile table must cover a symmetric range")
            vrev = vs[::-1]
            scale = max(vs.max(initial=0.0), 1.0)
            if np.max(np.abs(vs - vrev)) > 1e-6 * scale:
                raise ValueError("profile must be even")


def load_profile_table(path):
    """Read a two-column (x, v(x)) text file into a table tuple."""
    data = np.loadtxt(path)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"profile file {path} must have exactly two columns")
    return (tuple(data[:, 0]), tuple(data[:, 1]))


def _table_arrays(pot):
    xs, vs = pot.table
    return np.asarray(xs, dtype=float), np.asarray(vs, dtype=float)


def profile_value(pot: InteractionPotential, u):
    """Evaluate the unscaled profile v at the (possibly array) argument u."""
    u = np.asarray(u, dtype=float)
    if pot.profile == "gaussian":
        return np.exp(-(u**2)) / np.sqrt(np.pi)
    if pot.profile == "sech2":
        return 0.5 / np.cosh(u) ** 2
    if pot.profile == "zero":
        return np.zeros_like(u)
    # tabulated: band-limited (trigonometric) interpolation on the table's
    # own periodic extension, zero outside its range
    xs, vs = _table_arrays(pot)
    n = xs.size
    span = xs[-1] - xs[0] + (xs[1] - xs[0])
    coeffs = np.fft.fft(vs)
    k = np.fft.fftfreq(n) * n
    out = np.zeros(u.shape, dtype=float)
    inside = (u >= xs[0]) & (u <= xs[-1])
    if np.any(inside):
        theta = 2.0 * np.pi * (u[inside] - xs[0]) / span
        # zero the unpaired Nyquist mode so the interpolant is real
        if n % 2 == 0:
            coeffs = coeffs.copy()
            coeffs[n // 2] = 0.0
        vals = np.real(np.exp(1j * np.outer(theta, k)) @ coeffs) / n
        out[inside] = np.maximum(vals, 0.0)
    return out


def profile_mass(pot: InteractionPotential):
    """integral of the unscaled profile (equals integral of v_N for any N, beta)."""
    if pot.profile in ("gaussian", "sech2"):
        return 1.0
    if pot.profile == "zero":
        return 0.0
    xs, vs = _table_arrays(pot)
    return float((xs[1] - xs[0]) * vs.sum())


def profile_halfwidth(pot: InteractionPotential):
    """Half-width at which the profile drops to v(0)/e (np.inf for zero profile)."""
    if pot.profile == "gaussian":
        return 1.0
    if pot.profile == "sech2":
        return float(np.arccosh(np.sqrt(np.e)))
    if pot.profile == "zero":
        return np.inf
    xs, vs = _table_arrays(pot)
    v0 = profile_value(pot, np.array([0.0]))[0]
    if v0 <= 0.0:
        return np.inf
    fine = np.linspace(0.0, xs[-1], 4096)
    vals = profile_value(pot, fine)
    below = np.nonzero(vals < v0 / np.e)[0]
    return float(fine[below[0]]) if below.size else float(xs[-1])


def resolution_points(pot: InteractionPotential, grid: SpatialGrid):
    """Number of grid points across the e^{-1} width of v_N."""
    w = profile_halfwidth(pot)
    if not np.isfinite(w):
        return np.inf
    return 2.0 * w * pot.N ** (-pot.beta) / grid.dx


def _check_resolution(pot, grid):
    pts = resolution_points(pot, grid)
    if pts < pot.min_resolution_points:
        raise UnderresolvedPotential(
            f"v_N with N={pot.N}, beta={pot.beta} spans {pts:.3g} grid points "
            f"across its e^-1 width on (L={grid.L}, M={grid.M}); "
            f"required >= {pot.min_resolution_points}"
        )
    return pts


@functools.lru_cache(maxsize=16)
def _offset_samples(pot: InteractionPotential, grid: SpatialGrid):
    """v_N sampled at the wrapped grid offsets m*dx, m in storage order."""
    pts = _check_resolution(pot, grid)
    m = np.arange(grid.M)
    d = grid.dx * m
    d = np.where(d >= grid.L, d - 2.0 * grid.L, d)  # wrap to [-L, L)
    scale = pot.N**pot.beta
    samples = scale * profile_value(pot, scale * d)
    if pts < RESOLVED_POINTS:
        # delta-like regime: pointwise samples misstate the mass, so pin it
        mass = profile_mass(pot)
        got = grid.dx * samples.sum()
        if got > 0.0:
            samples = samples * (mass / got)
    samples.flags.writeable = False
    return samples


def sample_vN(pot: InteractionPotential, grid: SpatialGrid) -> Field:
    """Real, even, nonnegative samples of v_N at the grid points."""
    samples = _offset_samples(pot, grid)
    # offsets are indexed from x=0; the grid starts at x=-L
    return Field(grid, np.roll(samples, grid.M // 2).astype(complex))


@functools.lru_cache(maxsize=16)
def pair_table(pot: InteractionPotential, grid: SpatialGrid):
    """Two-point table v_N(x_j - x_l) with periodic wrap (real M x M array)."""
    samples = _offset_samples(pot, grid)
    M = grid.M
    idx = (np.arange(M)[:, None] - np.arange(M)[None, :]) % M
    table = samples[idx]
    table.flags.writeable = False
    return table


@functools.lru_cache(maxsize=16)
def _offset_fft(pot: InteractionPotential, grid: SpatialGrid):
    coeffs = np.fft.fft(_offset_samples(pot, grid))
    coeffs.flags.writeable = False
    return coeffs


def convolve_vN(pot: InteractionPotential, rho: Field) -> Field:
    """Periodic convolution (v_N * rho)(x) = dx-weighted circular sum, via FFT."""
    g = rho.grid
    out = g.dx * np.fft.ifft(_offset_fft(pot, g) * np.fft.fft(rho.values))
    if np.max(np.abs(rho.values.imag)) == 0.0:
        out = out.real.astype(complex)
    return Field(g, out)


def kappa(pot: InteractionPotential, alpha: Kernel) -> Kernel:
    """Multiplication operator [kappa(alpha)](x, y) = v_N(x - y) alpha(x, y).

    v_N is even, so the symmetry class of alpha is preserved.
    """
    g = check_same_grid(alpha)
    table = pair_table(pot, g)
    return Kernel(g, table * alpha.values, alpha.symmetry_class)
