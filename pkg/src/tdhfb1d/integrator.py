"""Time evolution: Strang split stepper, Duhamel fixed-point iteration, and
the Gamma-only mean-field mode.

The production scheme is Strang splitting: a half step of the exact free
flow (with the Lambda potential phase applied on the inside of each half so
the full step is a palindrome), one classical RK4 substep of the
interaction nonlinearity Xdot = i F(X), then the mirrored half step.  The
kinetic and potential-phase factors are exact and unitary, so stability is
governed by accuracy only and the overall scheme is second order in dt.

The fixed-point path iterates the integral form

    X(t) = U(t) X0 + i int_0^t U(t - s) F(X(s)) ds

on a uniform time mesh with trapezoidal quadrature, with the Lambda
potential term folded into the forcing; successive-difference norms are
measured in the mixed spacetime norm system and must decrease
geometrically, otherwise the window is too large for contraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import diagnostics
from .dynamics import SystemState, rho, rhs_gamma, rhs_lambda, rhs_phi
from .errors import ConfigError, NoContraction, SymmetryDrift
from .grid import Field, Kernel, hermitian_residual
from .potential import InteractionPotential, convolve_vN, pair_table
from .propagators import (
    free_gamma,
    free_lambda,
    free_phi,
    lambda_potential_phase,
    potential_phase_table,
)
from .trajectory import DiagnosticSeries, Trajectory

__all__ = [
    "StepConfig",
    "Trajectory",
    "PicardResult",
    "free_phi",
    "free_gamma",
    "free_lambda",
    "lambda_potential_phase",
    "step_strang",
    "evolve",
    "picard_solve",
    "solve_hartree",
    "save_state",
    "load_state",
]

SYMMETRY_ABORT = 1e-6

SCHEMES = ("strang_iprk4", "picard")


@dataclass
class StepConfig:
    """Stepper parameters; defaults match the reference configuration."""

    dt: float = 1e-3
    T: float = 1.0
    scheme: str = "strang_iprk4"
    picard_iters: int = 8
    picard_quad: int = 33
    snapshot_stride: int = 8
    resym_every: int = 16

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.T >= self.dt:
            raise ValueError(f"final time T={self.T} must be >= dt={self.dt}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.snapshot_stride < 1 or self.resym_every < 1:
            raise ValueError("snapshot_stride and resym_every must be >= 1")


# ---------------------------------------------------------------------------
# Strang stepping
# ---------------------------------------------------------------------------


class _StrangWork:
    """Precomputed half-step multipliers for a fixed (grid, pot, dt)."""

    def __init__(self, grid, pot, dt):
        self.grid = grid
        self.pot = pot
        self.dt = dt
        a = np.exp(-1j * grid.xi**2 * (0.5 * dt))
        self.mphi = a
        self.mgam = np.outer(a, a.conj())
        self.mlam = np.outer(a, a)
        self.mpot = potential_phase_table(pot, grid, 0.5 * dt)

    def kinetic_half(self, phi, G, L):
        phi = np.fft.ifft(self.mphi * np.fft.fft(phi))
        G = np.fft.ifft2(self.mgam * np.fft.fft2(G))
        L = np.fft.ifft2(self.mlam * np.fft.fft2(L))
        return phi, G, L

    def half_in(self, phi, G, L):
        return self.kinetic_half(phi, G, self.mpot * L)

    def half_out(self, phi, G, L):
        phi, G, L = self.kinetic_half(phi, G, L)
        return phi, G, self.mpot * L


def _rhs_arrays(grid, pot, t, phi, G, L):
    s = SystemState(
        t,
        Field(grid, phi),
        Kernel(grid, G, "hermitian"),
        Kernel(grid, L, "symmetric"),
        pot,
    )
    return rhs_phi(s).values, rhs_gamma(s).values, rhs_lambda(s).values


def _rk4_interaction(grid, pot, t, dt, phi, G, L):
    """One RK4 step of Xdot = i F(X) on the interaction nonlinearity."""

    def f(tt, p, g, l):
        fp, fg, fl = _rhs_arrays(grid, pot, tt, p, g, l)
        return 1j * fp, 1j * fg, 1j * fl

    k1 = f(t, phi, G, L)
    k2 = f(t + 0.5 * dt, phi + 0.5 * dt * k1[0], G + 0.5 * dt * k1[1], L + 0.5 * dt * k1[2])
    k3 = f(t + 0.5 * dt, phi + 0.5 * dt * k2[0], G + 0.5 * dt * k2[1], L + 0.5 * dt * k2[2])
    k4 = f(t + dt, phi + dt * k3[0], G + dt * k3[1], L + dt * k3[2])
    phi = phi + (dt / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    G = G + (dt / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    L = L + (dt / 6.0) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    return phi, G, L


def _strang_step(work, t, phi, G, L):
    phi, G, L = work.half_in(phi, G, L)
    phi, G, L = _rk4_interaction(work.grid, work.pot, t, work.dt, phi, G, L)
    return work.half_out(phi, G, L)


def step_strang(s: SystemState, dt) -> SystemState:
    """One Strang step of length dt from the given state."""
    work = _StrangWork(s.grid, s.pot, dt)
    phi, G, L = _strang_step(work, s.t, s.phi.values, s.Gamma.values, s.Lambda.values)
    return SystemState(
        s.t + dt,
        Field(s.grid, phi),
        Kernel(s.grid, G, "hermitian"),
        Kernel(s.grid, L, "symmetric"),
        s.pot,
    )


def _residuals(G, L):
    gscale = np.max(np.abs(G))
    lscale = np.max(np.abs(L))
    hres = 0.0 if gscale == 0 else float(np.max(np.abs(G - G.conj().T)) / gscale)
    sres = 0.0 if lscale == 0 else float(np.max(np.abs(L - L.T)) / lscale)
    return hres, sres


def _state_observables(grid, pot, t, phi, G, L):
    s = SystemState(
        t,
        Field(grid, phi),
        Kernel(grid, G, "hermitian"),
        Kernel(grid, L, "symmetric"),
        pot,
    )
    return diagnostics.particle_number(s), diagnostics.energy(s)


def evolve(s0: SystemState, cfg: StepConfig) -> Trajectory:
    """Drive the configured scheme, recording snapshots and diagnostics."""
    if cfg.scheme == "picard":
        result = picard_solve(s0, cfg.T, cfg.picard_iters, cfg.picard_quad)
        return result.trajectory

    grid, pot = s0.grid, s0.pot
    work = _StrangWork(grid, pot, cfg.dt)
    n_steps = int(round(cfg.T / cfg.dt))
    phi = s0.phi.values.copy()
    G = s0.Gamma.values.copy()
    L = s0.Lambda.values.copy()

    times, phis, Gammas, Lambdas = [], [], [], []
    numbers, energies, hress, sress = [], [], [], []

    def record(step):
        t = s0.t + step * cfg.dt
        hres, sres = _residuals(G, L)
        num, en = _state_observables(grid, pot, t, phi, G, L)
        times.append(t)
        phis.append(phi.copy())
        Gammas.append(G.copy())
        Lambdas.append(L.copy())
        numbers.append(num)
        energies.append(en)
        hress.append(hres)
        sress.append(sres)

    record(0)
    for step in range(1, n_steps + 1):
        phi, G, L = _strang_step(work, s0.t + (step - 1) * cfg.dt, phi, G, L)
        if step % cfg.resym_every == 0 or step == n_steps:
            hres, sres = _residuals(G, L)
            if max(hres, sres) > SYMMETRY_ABORT:
                raise SymmetryDrift(
                    f"symmetry drift {max(hres, sres):.2e} exceeds "
                    f"{SYMMETRY_ABORT} at step {step}; the run is unstable"
                )
            G = 0.5 * (G + G.conj().T)
            L = 0.5 * (L + L.T)
        if step % cfg.snapshot_stride == 0 or step == n_steps:
            record(step)

    series = DiagnosticSeries(
        np.asarray(times), numbers, energies, hress, sress
    )
    return Trajectory(grid, pot, np.asarray(times), phis, Gammas, Lambdas, series)


# ---------------------------------------------------------------------------
# Duhamel fixed point
# ---------------------------------------------------------------------------


@dataclass
class PicardResult:
    trajectory: Trajectory
    diff_norms: list = field(default_factory=list)
    ratios: list = field(default_factory=list)


def _free_at(grid, pot, phih, Gh, Lh, t):
    """Apply the free flow to precomputed plain-FFT spectra."""
    a = np.exp(-1j * grid.xi**2 * t)
    phi = np.fft.ifft(a * phih)
    G = np.fft.ifft2(np.outer(a, a.conj()) * Gh)
    L = np.fft.ifft2(np.outer(a, a) * Lh)
    return phi, G, L


def picard_solve(s0: SystemState, T, n_iters, n_quad, params=None) -> PicardResult:
    """Iterate the integral form of the equations on n_quad uniform nodes.

    The Lambda potential term is folded into the forcing, so the free flow
    used in the iteration is the pure kinetic one.  Returns the final
    iterate as a Trajectory plus the successive-difference norms measured
    in the mixed norm system.  Raises NoContraction when the differences
    fail to decrease for three consecutive iterations: the window T is too
    large for the data.
    """
    n_quad = int(n_quad)
    if n_quad < 4:
        raise ValueError("picard needs at least 4 quadrature nodes")
    if n_iters < 0:
        raise ValueError("n_iters must be >= 0")
    grid, pot = s0.grid, s0.pot
    if params is None:
        params = diagnostics.sigma_for_beta(pot.beta, 0.1)
    h = T / (n_quad - 1)
    times = s0.t + h * np.arange(n_quad)
    V2 = pair_table(pot, grid)

    phih0 = np.fft.fft(s0.phi.values)
    Gh0 = np.fft.fft2(s0.Gamma.values)
    Lh0 = np.fft.fft2(s0.Lambda.values)
    free = [_free_at(grid, pot, phih0, Gh0, Lh0, h * i) for i in range(n_quad)]

    cur = [tuple(x.copy() for x in f) for f in free]
    diff_norms, ratios = [], []
    stalls = 0

    a1 = np.exp(-1j * grid.xi**2 * h)  # one-node kinetic phase

    def forcing(t, phi, G, L):
        fp, fg, fl = _rhs_arrays(grid, pot, t, phi, G, L)
        fl = fl - (V2 / pot.N) * L
        return fp, fg, fl

    for it in range(n_iters):
        Fhat = []
        for i in range(n_quad):
            fp, fg, fl = forcing(times[i], *cur[i])
            Fhat.append((np.fft.fft(fp), np.fft.fft2(fg), np.fft.fft2(fl)))
        new = [tuple(x.copy() for x in free[0])]
        for i in range(1, n_quad):
            acc_p = np.zeros(grid.M, dtype=complex)
            acc_g = np.zeros((grid.M, grid.M), dtype=complex)
            acc_l = np.zeros((grid.M, grid.M), dtype=complex)
            for j in range(i + 1):
                w = h * (0.5 if j in (0, i) else 1.0)
                am = a1 ** (i - j)
                acc_p += w * am * Fhat[j][0]
                acc_g += w * np.outer(am, am.conj()) * Fhat[j][1]
                acc_l += w * np.outer(am, am) * Fhat[j][2]
            phi = free[i][0] + 1j * np.fft.ifft(acc_p)
            G = free[i][1] + 1j * np.fft.ifft2(acc_g)
            L = free[i][2] + 1j * np.fft.ifft2(acc_l)
            new.append((phi, G, L))
        dtraj = Trajectory(
            grid,
            pot,
            times,
            [n[0] - c[0] for n, c in zip(new, cur)],
            [n[1] - c[1] for n, c in zip(new, cur)],
            [n[2] - c[2] for n, c in zip(new, cur)],
        )
        d = diagnostics.nt_total(diagnostics.norm_NT(dtraj, params))
        if diff_norms:
            ratios.append(d / diff_norms[-1])
            stalls = stalls + 1 if d >= diff_norms[-1] else 0
            if stalls >= 3:
                raise NoContraction(
                    f"successive differences failed to decrease for 3 iterations "
                    f"(last norms {diff_norms[-2]:.3e}, {diff_norms[-1]:.3e}, {d:.3e}); "
                    f"T={T} is too large for contraction on this data"
                )
        diff_norms.append(d)
        cur = new

    numbers, energies, hress, sress = [], [], [], []
    for i in range(n_quad):
        hres, sres = _residuals(cur[i][1], cur[i][2])
        num, en = _state_observables(grid, pot, times[i], *cur[i])
        numbers.append(num)
        energies.append(en)
        hress.append(hres)
        sress.append(sres)
    series = DiagnosticSeries(times, numbers, energies, hress, sress)
    traj = Trajectory(
        grid,
        pot,
        times,
        [c[0] for c in cur],
        [c[1] for c in cur],
        [c[2] for c in cur],
        series,
    )
    return PicardResult(traj, diff_norms, ratios)


# ---------------------------------------------------------------------------
# Gamma-only mean-field mode
# ---------------------------------------------------------------------------


def solve_hartree(Gamma0: Kernel, pot: InteractionPotential, cfg: StepConfig) -> Trajectory:
    """Strang evolution of the Gamma-only mean-field equation.

    The nonlinear substep multiplies by the exact phase
    exp(-i dt [(v*rho)(x) - (v*rho)(y)]), which leaves rho itself
    invariant, so the splitting preserves hermiticity, the trace and the
    L2 norm of Gamma up to roundoff.
    """
    grid = Gamma0.grid
    a = np.exp(-1j * grid.xi**2 * (0.5 * cfg.dt))
    mgam = np.outer(a, a.conj())
    n_steps = int(round(cfg.T / cfg.dt))
    G = Gamma0.values.copy()
    zero_phi = np.zeros(grid.M, dtype=complex)
    zero_lam = np.zeros((grid.M, grid.M), dtype=complex)

    times, Gammas = [], []
    numbers, energies, hress = [], [], []

    def record(step):
        t = step * cfg.dt
        K = Kernel(grid, G, "hermitian")
        times.append(t)
        Gammas.append(G.copy())
        numbers.append(float(pot.N * grid.dx * np.diagonal(G).real.sum()))
        energies.append(diagnostics.hartree_energy(K, pot))
        hress.append(hermitian_residual(K))

    record(0)
    for step in range(1, n_steps + 1):
        G = np.fft.ifft2(mgam * np.fft.fft2(G))
        r = np.diagonal(G).real
        q = convolve_vN(pot, Field(grid, r.astype(complex))).values.real
        G = np.exp(-1j * cfg.dt * (q[:, None] - q[None, :])) * G
        G = np.fft.ifft2(mgam * np.fft.fft2(G))
        if step % cfg.resym_every == 0 or step == n_steps:
            hres = _residuals(G, zero_lam)[0]
            if hres > SYMMETRY_ABORT:
                raise SymmetryDrift(
                    f"hermiticity drift {hres:.2e} exceeds {SYMMETRY_ABORT}"
                )
            G = 0.5 * (G + G.conj().T)
        if step % cfg.snapshot_stride == 0 or step == n_steps:
            record(step)

    series = DiagnosticSeries(
        np.asarray(times), numbers, energies, hress, np.zeros(len(times))
    )
    return Trajectory(
        grid,
        pot,
        np.asarray(times),
        [zero_phi] * len(times),
        Gammas,
        [zero_lam] * len(times),
        series,
        kind="hartree",
    )


# ---------------------------------------------------------------------------
# snapshot files
# ---------------------------------------------------------------------------
# Layout (little endian): five float64 header values (M, L, t, N, beta)
# followed by phi (M), Gamma (M*M), Lambda (M*M) as complex128, i.e.
# interleaved real/imaginary float64 pairs.


def save_state(path, s: SystemState):
    g = s.grid
    header = np.array(
        [float(g.M), g.L, s.t, s.pot.N, s.pot.beta], dtype="<f8"
    )
    with open(path, "wb") as fh:
        header.tofile(fh)
        s.phi.values.astype("<c16").tofile(fh)
        s.Gamma.values.astype("<c16").tofile(fh)
        s.Lambda.values.astype("<c16").tofile(fh)


def load_state(path, pot: InteractionPotential) -> SystemState:
    """Read a snapshot; the potential must match the stored (N, beta)."""
    from .grid import make_grid

    with open(path, "rb") as fh:
        header = np.fromfile(fh, dtype="<f8", count=5)
        if header.size != 5:
            raise ConfigError(f"snapshot {path} is truncated")
        M, L, t, N, beta = header
        M = int(round(M))
        grid = make_grid(L, M)
        phi = np.fromfile(fh, dtype="<c16", count=M)
        G = np.fromfile(fh, dtype="<c16", count=M * M)
        Lam = np.fromfile(fh, dtype="<c16", count=M * M)
    if phi.size != M or G.size != M * M or Lam.size != M * M:
        raise ConfigError(f"snapshot {path} is truncated")
    if abs(pot.N - N) > 1e-9 or abs(pot.beta - beta) > 1e-9:
        raise ConfigError(
            f"snapshot {path} was written for (N={N}, beta={beta}), "
            f"config has (N={pot.N}, beta={pot.beta})"
        )
    return SystemState(
        float(t),
        Field(grid, phi),
        Kernel(grid, G.reshape(M, M), "hermitian"),
        Kernel(grid, Lam.reshape(M, M), "symmetric"),
        pot,
    )
