import math

import numpy as np
import pytest

from tshape_router.lattice import LatticeModel
from tshape_router.model import ModelParams, mode_from_wavenumber
from tshape_router.wavepacket import Propagator


# --- Global fixtures ----------------------------------------------------------

# Working point used across the suite: omega = omega_A = 10, xi = 1, g_a = g_b = 0.3.
@pytest.fixture
def p0():
    return ModelParams.uniform(10.0, 1.0, 0.3, 0.3, 10.0)


@pytest.fixture
def mid_band():
    """Mode at the band centre, k = pi/2, E = 10."""
    return mode_from_wavenumber(math.pi / 2, 10.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


# Diagonalising the 1802-site lattice takes a second or two; share it.
@pytest.fixture(scope="session")
def p0_propagator():
    params = ModelParams.uniform(10.0, 1.0, 0.3, 0.3, 10.0)
    return Propagator(LatticeModel(600, 600, params))


@pytest.fixture
def param_file(tmp_path):
    """Write a TOML parameter file and return its path."""

    def _write(text):
        path = tmp_path / "params.toml"
        path.write_text(text, encoding="utf-8")
        return path

    return _write
