import numpy as np
import pytest

from tdhfb1d import InteractionPotential, make_grid
from tdhfb1d.config import quasifree_from_spec


@pytest.fixture
def grid32():
    return make_grid(8.0, 32)


@pytest.fixture
def grid64():
    return make_grid(8.0, 64)


@pytest.fixture
def pot_soft():
    """Gaussian interaction resolved on the coarse test grids."""
    return InteractionPotential("gaussian", beta=0.25, N=2.0)


@pytest.fixture
def pot_ref():
    """Reference-style interaction, resolved on (L=8, M=128) and finer."""
    return InteractionPotential("gaussian", beta=0.5, N=4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def reference_state(grid, pot, phi_width=1.0, c=0.3, k_width=1.0):
    return quasifree_from_spec(grid, pot, phi_width, c, k_width)
