"""Run configuration: strict sectioned key-value files.

Unknown sections or keys are fatal (silent misconfiguration invalidates
scientific runs); every value is validated by the owning module's
constructor.  A minimal (even empty) file is valid and yields the
documented defaults.
"""

from __future__ import annotations

import configparser
import hashlib
import os
from dataclasses import dataclass

import numpy as np

from .bogoliubov import rank_one_excitation, quasifree_state
from .dynamics import SystemState
from .errors import ConfigError
from .grid import Field, SpatialGrid, make_grid
from .integrator import StepConfig, load_state
from .potential import InteractionPotential, load_profile_table, sample_vN

_SCHEMA = {
    "grid": {"L": (float, 16.0), "M": (int, 256)},
    "potential": {
        "profile": (str, "gaussian"),
        "beta": (float, 0.5),
        "N": (float, 4.0),
        "table": (str, ""),
        "min_resolution_points": (float, 8.0),
    },
    "initial": {
        "type": (str, "quasifree"),
        "phi_width": (float, 1.0),
        "k_strength": (float, 0.3),
        "k_width": (float, 1.0),
        "snapshot": (str, ""),
    },
    "stepper": {
        "scheme": (str, "strang_iprk4"),
        "dt": (float, 1e-3),
        "T": (float, 1.0),
        "snapshot_stride": (int, 8),
        "resym_every": (int, 16),
        "picard_iters": (int, 8),
        "picard_quad": (int, 33),
    },
    "estimates": {"epsilon": (float, 0.1)},
    "verify": {
        "ensemble": (int, 50),
        "window": (float, 3.0),
        "n_t": (int, 256),
        "gamma_band": (int, 12),
        "gamma_envelope": (float, 1.0),
        "lambda_band": (int, 6),
        "lambda_envelope": (float, 2.0),
        "carrier_mode": (int, 16),
    },
    "sweep": {"N_values": (str, ""), "beta_values": (str, "")},
    "output": {"directory": (str, "out"), "formats": (str, "csv")},
    "run": {"seed": (int, 0)},
}


@dataclass
class RunConfig:
    grid: SpatialGrid
    pot: InteractionPotential
    initial_type: str
    phi_width: float
    k_strength: float
    k_width: float
    snapshot: str
    step: StepConfig
    epsilon: float
    verify_ensemble: int
    verify_window: float
    verify_n_t: int
    verify_gamma_band: int
    verify_gamma_envelope: float
    verify_lambda_band: int
    verify_lambda_envelope: float
    verify_carrier: int
    sweep_N: tuple
    sweep_beta: tuple
    out_dir: str
    formats: tuple
    seed: int
    config_sha: str
    path: str


def _typed(section, key, raw, typ):
    try:
        if typ is int:
            val = int(raw)
        elif typ is float:
            val = float(raw)
        else:
            val = raw.strip()
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: not a valid {typ.__name__}") from exc
    return val


def _float_list(section, key, raw):
    try:
        return tuple(float(tok) for tok in raw.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: expected numbers") from exc


def parse_config(path) -> RunConfig:
    """Read and fully validate a run configuration file."""
    if not os.path.exists(path):
        raise ConfigError(f"config file {path} does not exist")
    with open(path, "rb") as fh:
        raw_bytes = fh.read()
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    try:
        parser.read_string(raw_bytes.decode("utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"parse error in {path}: {exc}") from exc

    values = {sec: {k: d for k, (_, d) in keys.items()} for sec, keys in _SCHEMA.items()}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}] of {path}")
            values[section][key] = _typed(section, key, raw, _SCHEMA[section][key][0])

    grid = make_grid(values["grid"]["L"], values["grid"]["M"])

    table = None
    table_path = values["potential"]["table"]
    if values["potential"]["profile"] == "tabulated":
        if not table_path:
            raise ConfigError("[potential] profile = tabulated requires table = <path>")
        if not os.path.exists(table_path):
            raise ConfigError(f"[potential] table file {table_path} does not exist")
        table = load_profile_table(table_path)
    pot = InteractionPotential(
        profile=values["potential"]["profile"],
        beta=values["potential"]["beta"],
        N=values["potential"]["N"],
        table=table,
        min_resolution_points=values["potential"]["min_resolution_points"],
    )
    # validate the (N, beta) <-> grid pairing now, not at run time
    sample_vN(pot, grid)

    initial_type = values["initial"]["type"]
    if initial_type not in ("quasifree", "snapshot"):
        raise ConfigError(f"[initial] type must be quasifree or snapshot, got {initial_type!r}")
    snapshot = values["initial"]["snapshot"]
    if initial_type == "snapshot":
        if not snapshot:
            raise ConfigError("[initial] type = snapshot requires snapshot = <path>")
        if not os.path.exists(snapshot):
            raise ConfigError(f"[initial] snapshot file {snapshot} does not exist")
    if values["initial"]["phi_width"] <= 0 or values["initial"]["k_width"] <= 0:
        raise ConfigError("[initial] widths must be positive")

    step = StepConfig(
        dt=values["stepper"]["dt"],
        T=values["stepper"]["T"],
        scheme=values["stepper"]["scheme"],
        picard_iters=values["stepper"]["picard_iters"],
        picard_quad=values["stepper"]["picard_quad"],
        snapshot_stride=values["stepper"]["snapshot_stride"],
        resym_every=values["stepper"]["resym_every"],
    )

    eps = values["estimates"]["epsilon"]
    if not 0 < eps < 0.2:
        raise ConfigError(f"[estimates] epsilon must lie in (0, 1/5), got {eps}")

    sweep_N = _float_list("sweep", "N_values", values["sweep"]["N_values"]) or (pot.N,)
    sweep_beta = _float_list("sweep", "beta_values", values["sweep"]["beta_values"]) or (
        pot.beta,
    )

    formats = tuple(
        tok for tok in values["output"]["formats"].replace(",", " ").split()
    ) or ("csv",)
    for tok in formats:
        if tok not in ("csv", "bin"):
            raise ConfigError(f"[output] unknown format {tok!r}")

    return RunConfig(
        grid=grid,
        pot=pot,
        initial_type=initial_type,
        phi_width=values["initial"]["phi_width"],
        k_strength=values["initial"]["k_strength"],
        k_width=values["initial"]["k_width"],
        snapshot=snapshot,
        step=step,
        epsilon=eps,
        verify_ensemble=values["verify"]["ensemble"],
        verify_window=values["verify"]["window"],
        verify_n_t=values["verify"]["n_t"],
        verify_gamma_band=values["verify"]["gamma_band"],
        verify_gamma_envelope=values["verify"]["gamma_envelope"],
        verify_lambda_band=values["verify"]["lambda_band"],
        verify_lambda_envelope=values["verify"]["lambda_envelope"],
        verify_carrier=values["verify"]["carrier_mode"],
        sweep_N=sweep_N,
        sweep_beta=sweep_beta,
        out_dir=values["output"]["directory"],
        formats=formats,
        seed=values["run"]["seed"],
        config_sha=hashlib.sha256(raw_bytes).hexdigest(),
        path=str(path),
    )


def gaussian_condensate(grid, width) -> Field:
    """Normalized Gaussian condensate field of the given width."""
    vals = (np.pi * width**2) ** -0.25 * np.exp(-grid.x**2 / (2.0 * width**2))
    return Field(grid, vals.astype(complex))


def initial_state(rc: RunConfig) -> SystemState:
    """Build the configured initial (phi, Gamma, Lambda)."""
    if rc.initial_type == "snapshot":
        return load_state(rc.snapshot, rc.pot)
    return quasifree_from_spec(
        rc.grid, rc.pot, rc.phi_width, rc.k_strength, rc.k_width
    )


def quasifree_from_spec(grid, pot, phi_width, k_strength, k_width) -> SystemState:
    phi = gaussian_condensate(grid, phi_width)
    u = gaussian_condensate(grid, k_width)
    k = rank_one_excitation(grid, k_strength, u)
    G, L = quasifree_state(phi, k, pot.N)
    return SystemState(0.0, phi, G, L, pot)
