"""Pseudospectral simulator and estimate-verification harness for the 1D
time-dependent Hartree-Fock-Bogoliubov equations.

The package evolves the triple (phi, Gamma, Lambda) — condensate field,
one-particle density kernel, pair-correlation kernel — on a periodic box
under the coupled TDHFB kernel equations with scaled interaction
v_N(x) = N^beta v(N^beta x), and measures the conserved observables, the
mixed spacetime norm system, and the collapsing-estimate constants that
control the fixed-point well-posedness argument.
"""

__version__ = "0.1.0"

from .bogoliubov import (
    PairExcitation,
    ch,
    compose,
    identity_kernel,
    quasifree_state,
    rank_one_excitation,
    sh,
    sh2k,
)
from .diagnostics import (
    DiagnosticSeries,
    EstimateParams,
    collapsing_ratio_gamma,
    collapsing_ratio_lambda,
    energy,
    energy_from_k,
    norm_NT,
    particle_number,
    sigma_for_beta,
)
from .dynamics import SystemState, rho, rhs_gamma, rhs_lambda, rhs_phi, shifted_diagonal
from .errors import (
    ConfigError,
    GridMismatch,
    NegativePairKinetic,
    NoContraction,
    NonConvergence,
    NonHermitianDiagonal,
    SymmetryDrift,
    TdhfbError,
    UnderresolvedPotential,
)
from .grid import (
    Field,
    Kernel,
    SpatialGrid,
    bessel_deriv,
    bessel_deriv2,
    fft1,
    fft2,
    frac_deriv_x,
    ifft1,
    ifft2,
    l2_norm,
    make_grid,
)
from .integrator import (
    PicardResult,
    StepConfig,
    Trajectory,
    evolve,
    free_gamma,
    free_lambda,
    free_phi,
    lambda_potential_phase,
    load_state,
    picard_solve,
    save_state,
    solve_hartree,
    step_strang,
)
from .potential import InteractionPotential, convolve_vN, kappa, sample_vN
