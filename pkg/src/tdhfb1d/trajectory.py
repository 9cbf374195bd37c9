"""Containers for time-ordered snapshots and accumulated diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Field, Kernel, SpatialGrid
from .potential import InteractionPotential


@dataclass
class DiagnosticSeries:
    """Per-snapshot observable series plus per-run named scalar maps."""

    times: np.ndarray
    number: np.ndarray
    energy: np.ndarray
    herm_residual: np.ndarray
    sym_residual: np.ndarray
    norms: dict = field(default_factory=dict)
    estimate_ratios: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("diagnostic times must be strictly increasing")
        for name in ("number", "energy", "herm_residual", "sym_residual"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != self.times.shape:
                raise ValueError(f"series {name} length does not match times")
            setattr(self, name, arr)


@dataclass
class Trajectory:
    """Uniformly sampled snapshots of a run plus its diagnostic series.

    ``kind`` is "tdhfb" for the full (phi, Gamma, Lambda) flow and
    "hartree" for the Gamma-only mode (phis/Lambdas hold zeros there).
    """

    grid: SpatialGrid
    pot: InteractionPotential
    times: np.ndarray
    phis: list
    Gammas: list
    Lambdas: list
    series: DiagnosticSeries | None = None
    kind: str = "tdhfb"

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        n = self.times.size
        if not (len(self.phis) == len(self.Gammas) == len(self.Lambdas) == n):
            raise ValueError("snapshot lists must match the time axis")

    def __len__(self):
        return self.times.size

    def state(self, i):
        """Rebuild the i-th snapshot as a SystemState."""
        from .dynamics import SystemState

        return SystemState(
            float(self.times[i]),
            Field(self.grid, self.phis[i]),
            Kernel(self.grid, self.Gammas[i], "hermitian"),
            Kernel(self.grid, self.Lambdas[i], "symmetric"),
            self.pot,
        )

    def uniform_spacing(self, rtol=1e-8):
        """Snapshot spacing, raising if the sampling is not uniform."""
        dts = np.diff(self.times)
        if dts.size == 0:
            raise ValueError("trajectory has a single snapshot")
        if np.max(np.abs(dts - dts[0])) > rtol * abs(dts[0]):
            raise ValueError("trajectory snapshots are not uniformly spaced")
        return float(dts[0])
