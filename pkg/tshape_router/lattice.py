"""Truncated single-excitation lattice and the stationary scattering oracle.

Basis ordering (0-based rows of the Hamiltonian):

* ``0 .. 2 n_a``            arm-a sites ``j_a = -n_a .. n_a``
* ``2 n_a + 1 .. 2 n_a + n_b``  arm-b sites ``j_b = 1 .. n_b``
* ``2 n_a + n_b + 1``       the TLS excited state

The stationary oracle solves (E - H) U = 0 on this finite basis with exact
plane-wave closures at every truncation edge, so its amplitudes do not
depend on the lattice size. It accepts unequal arms.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import SingularSystemError, SizeTooSmallError
from .model import ModelParams, Port, mode_from_wavenumber
from .scattering import ScatteringSolution

logger = logging.getLogger(__name__)

# Relative residual above which a sparse solve is treated as singular.
SOLVE_RESIDUAL_LIMIT = 1e-8


@dataclass(frozen=True)
class LatticeModel:
    n_a: int
    n_b: int
    params: ModelParams

    def __post_init__(self) -> None:
        if self.n_a < 2 or self.n_b < 2:
            raise SizeTooSmallError(
                f"lattice needs n_a >= 2 and n_b >= 2, got n_a={self.n_a}, n_b={self.n_b}"
            )

    @property
    def dimension(self) -> int:
        return 2 * self.n_a + self.n_b + 2

    def index_a(self, j: int) -> int:
        if not -self.n_a <= j <= self.n_a:
            raise IndexError(f"arm-a site {j} outside [-{self.n_a}, {self.n_a}]")
        return j + self.n_a

    def index_b(self, j: int) -> int:
        if not 1 <= j <= self.n_b:
            raise IndexError(f"arm-b site {j} outside [1, {self.n_b}]")
        return 2 * self.n_a + j

    @property
    def index_tls(self) -> int:
        return 2 * self.n_a + self.n_b + 1

    @property
    def arm_a(self) -> slice:
        return slice(0, 2 * self.n_a + 1)

    @property
    def arm_b(self) -> slice:
        return slice(2 * self.n_a + 1, 2 * self.n_a + 1 + self.n_b)


def build_hamiltonian(lat: LatticeModel) -> sp.csr_matrix:
    """Real symmetric single-excitation Hamiltonian of the T junction.

    Nearest-neighbour hopping -xi_d inside each arm, on-site omega_d, the TLS
    row coupled by g_a to j_a = 0 and by g_b to j_b = 1. Sites j_a = 0 and
    j_b = 1 are not linked directly.
    """
    p = lat.params
    n_chain = 2 * lat.n_a + 1
    onsite = np.concatenate(
        [
            np.full(n_chain, p.omega_a),
            np.full(lat.n_b, p.omega_b),
            [p.require_omega_tls()],
        ]
    )
    # Zero entries separate the a-chain from the b-chain and the b-chain from the TLS.
    hopping = np.concatenate(
        [np.full(n_chain - 1, -p.xi_a), [0.0], np.full(lat.n_b - 1, -p.xi_b), [0.0]]
    )
    chains = sp.diags([hopping, onsite, hopping], [-1, 0, 1], format="csr")

    tls = lat.index_tls
    rows = [tls, lat.index_a(0), tls, lat.index_b(1)]
    cols = [lat.index_a(0), tls, lat.index_b(1), tls]
    data = [p.g_a, p.g_a, p.g_b, p.g_b]
    couplings = sp.coo_matrix((data, (rows, cols)), shape=chains.shape)

    hamiltonian = (chains + couplings).tocsr()
    hamiltonian.eliminate_zeros()
    return hamiltonian


def outgoing_factor(energy: float, omega: float, xi: float) -> Tuple[complex, Optional[float]]:
    """Ratio U_{n+1}/U_n of the outgoing (or decaying) solution on a free arm.

    Returns ``(exp(ik), k)`` inside the band and ``(lambda, None)`` with the
    decaying real root ``|lambda| < 1`` outside it.
    """
    c = (omega - energy) / xi
    if abs(c) < 2.0:
        k = math.acos(c / 2.0)
        return cmath.exp(1j * k), k
    root = (c - math.copysign(math.sqrt(c * c - 4.0), c)) / 2.0
    return complex(root), None


def _solve(matrix: sp.csc_matrix, rhs: np.ndarray, energy: float) -> np.ndarray:
    try:
        lu = splu(matrix)
    except RuntimeError as exc:
        raise SingularSystemError(f"stationary system at E={energy!r} is singular: {exc}")
    solution = lu.solve(rhs)
    residual = np.linalg.norm(matrix @ solution - rhs)
    if not np.all(np.isfinite(solution)) or residual > SOLVE_RESIDUAL_LIMIT * max(
        np.linalg.norm(rhs), 1.0
    ):
        condition = float(np.linalg.cond(matrix.toarray(), 1))
        raise SingularSystemError(
            f"stationary solve at E={energy!r} left residual {residual:.3g}", condition
        )
    return solution


def stationary_scatter(lat: LatticeModel, port: Port, k: float) -> ScatteringSolution:
    """Scattering amplitudes from a finite linear solve with outgoing-wave closure.

    ``k`` is the wavenumber on the incidence arm. The incoming wave enters as
    a source on the incidence arm's outer boundary row. Probabilities are
    flux-weighted, so they also hold for unequal arms.
    """
    p = lat.params
    if port is Port.FROM_A:
        mode = mode_from_wavenumber(k, p.omega_a, p.xi_a)
    else:
        mode = mode_from_wavenumber(k, p.omega_b, p.xi_b)
    energy = mode.energy
    lam_a, k_a = outgoing_factor(energy, p.omega_a, p.xi_a)
    lam_b, k_b = outgoing_factor(energy, p.omega_b, p.xi_b)

    closure = np.zeros(lat.dimension, dtype=complex)
    closure[lat.index_a(-lat.n_a)] += p.xi_a * lam_a
    closure[lat.index_a(lat.n_a)] += p.xi_a * lam_a
    closure[lat.index_b(lat.n_b)] += p.xi_b * lam_b
    matrix = (
        energy * sp.identity(lat.dimension, dtype=complex, format="csc")
        - build_hamiltonian(lat)
        + sp.diags(closure)
    ).tocsc()

    rhs = np.zeros(lat.dimension, dtype=complex)
    if port is Port.FROM_A:
        rhs[lat.index_a(-lat.n_a)] = 2j * p.xi_a * math.sin(k) * cmath.exp(-1j * k * lat.n_a)
    else:
        rhs[lat.index_b(lat.n_b)] = 2j * p.xi_b * math.sin(k) * cmath.exp(-1j * k * lat.n_b)

    logger.debug("stationary solve: port=%s k=%r dim=%d", port.value, k, lat.dimension)
    u = _solve(matrix, rhs, energy)

    def a(j: int) -> complex:
        return complex(u[lat.index_a(j)])

    def b(j: int) -> complex:
        return complex(u[lat.index_b(j)])

    v_a = 2.0 * p.xi_a * math.sin(k_a) if k_a is not None else 0.0
    v_b = 2.0 * p.xi_b * math.sin(k_b) if k_b is not None else 0.0

    if port is Port.FROM_A:
        t = a(1) * cmath.exp(-1j * k)
        r = (a(-1) - cmath.exp(-1j * k)) * cmath.exp(-1j * k)
        t_b = b(2) * cmath.exp(-2j * k_b) if k_b is not None else 0j
        amplitudes = {"t": t, "r": r, "t_b": t_b}
        probabilities = {
            "T_aa": abs(t) ** 2,
            "R_aa": abs(r) ** 2,
            "T_ab": abs(t_b) ** 2 * v_b / mode.group_velocity,
        }
    else:
        r_b = (b(2) - cmath.exp(-2j * k)) * cmath.exp(-2j * k)
        if k_a is not None:
            t_right = a(1) * cmath.exp(-1j * k_a)
            t_left = a(-1) * cmath.exp(-1j * k_a)
        else:
            t_right = t_left = 0j
        amplitudes = {"t_a": t_right, "r_b": r_b}
        probabilities = {
            "T_ba": (abs(t_left) ** 2 + abs(t_right) ** 2) * v_a / mode.group_velocity,
            "R_bb": abs(r_b) ** 2,
        }

    boundary = b(1) / math.sin(k_b) if k_b is not None else complex(math.nan, math.nan)
    return ScatteringSolution(
        port=port,
        mode=mode,
        params=p,
        amplitudes=amplitudes,
        boundary_amplitude=boundary,
        atom_amplitude=complex(u[lat.index_tls]),
        probabilities=probabilities,
        physical=not mode.band_edge,
    )
