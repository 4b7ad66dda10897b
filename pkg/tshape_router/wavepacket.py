"""Time-domain oracle: a Gaussian packet scattered on the truncated lattice.

Evolution uses the spectral decomposition of the real symmetric Hamiltonian,
psi(t) = V exp(-i Lambda t) V^T psi(0), which is unitary up to the accuracy
of the eigensolver. One :class:`Propagator` can evolve any number of packets
on the same lattice.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import scipy.linalg

from .errors import (
    InvalidParamsError,
    MismatchedConfigError,
    NormDriftError,
    OutOfBandError,
    PacketClippedError,
)
from .lattice import LatticeModel, build_hamiltonian
from .model import ModelParams, Port

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10
CLIP_TOLERANCE = 1e-6
# Sites at each open lattice end that must stay empty.
EDGE_SITES = 10
# Dense diagonalisation stays in the seconds range up to about this size.
DENSE_LIMIT = 3000
# Sites on each side of the junction, plus the TLS, that should be empty once
# the packet has scattered.
JUNCTION_SITES = 3
JUNCTION_TOLERANCE = 2e-3


@dataclass(frozen=True)
class WavePacketSpec:
    """Gaussian packet ``exp(+-i k0 j - (j - j0)^2 / (4 sigma^2))`` on the incidence arm.

    On arm b the carrier is ``-k0`` so the packet moves down toward the junction.
    """

    carrier_k0: float
    width_sigma: float
    center_j0: int
    port: Port

    def __post_init__(self) -> None:
        if not 0.0 < self.carrier_k0 < math.pi:
            raise OutOfBandError(f"carrier k0={self.carrier_k0} must lie inside (0, pi)")
        if not self.width_sigma > 0:
            raise InvalidParamsError(f"packet width must be positive, got {self.width_sigma}")

    def check_fits(self, lat: LatticeModel) -> None:
        j0 = self.center_j0
        if self.port is Port.FROM_A:
            if not -lat.n_a <= j0 < 0:
                raise PacketClippedError(f"arm-a packet centre {j0} must lie in [-{lat.n_a}, 0)")
            to_junction, to_end = -j0, lat.n_a + j0
        else:
            if not 1 <= j0 <= lat.n_b:
                raise PacketClippedError(f"arm-b packet centre {j0} must lie in [1, {lat.n_b}]")
            to_junction, to_end = j0 - 1, lat.n_b - j0
        reach = 3.0 * self.width_sigma
        if not (reach < to_junction and reach < to_end):
            raise PacketClippedError(
                f"3 sigma = {reach:g} sites does not fit between the junction "
                f"({to_junction} sites) and the lattice end ({to_end} sites); "
                "shrink sigma or enlarge the lattice"
            )

    def initial_state(self, lat: LatticeModel) -> np.ndarray:
        psi = np.zeros(lat.dimension, dtype=complex)
        if self.port is Port.FROM_A:
            j = np.arange(-lat.n_a, lat.n_a + 1)
            carrier, region = self.carrier_k0, lat.arm_a
        else:
            j = np.arange(1, lat.n_b + 1)
            carrier, region = -self.carrier_k0, lat.arm_b
        psi[region] = np.exp(
            1j * carrier * j - (j - self.center_j0) ** 2 / (4.0 * self.width_sigma**2)
        )
        return psi / np.linalg.norm(psi)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "k0": self.carrier_k0,
            "sigma": self.width_sigma,
            "j0": self.center_j0,
            "port": self.port.value,
        }


class Propagator:
    """Exact unitary evolution on one lattice."""

    def __init__(self, lat: LatticeModel):
        if lat.dimension > DENSE_LIMIT:
            logger.warning(
                "dense diagonalisation of a %d-site lattice may be slow", lat.dimension
            )
        self.lattice = lat
        self.energies, self.modes = scipy.linalg.eigh(build_hamiltonian(lat).toarray())

    def evolve(self, psi: np.ndarray, time: float) -> np.ndarray:
        coefficients = self.modes.T @ psi
        return self.modes @ (np.exp(-1j * self.energies * time) * coefficients)


@dataclass(frozen=True)
class RegionProbabilities:
    """Probability on arm a left of the junction, arm a from j_a = 0 on, arm b, TLS."""

    left_a: float
    right_a: float
    b: float
    atom: float

    @property
    def arm_a(self) -> float:
        return self.left_a + self.right_a

    @property
    def total(self) -> float:
        return self.left_a + self.right_a + self.b + self.atom

    def as_dict(self) -> Dict[str, float]:
        return {
            "P_left_a": self.left_a,
            "P_right_a": self.right_a,
            "P_b": self.b,
            "P_atom": self.atom,
        }


@dataclass(frozen=True)
class WavePacketResult:
    regions: RegionProbabilities
    spec: WavePacketSpec
    params: ModelParams
    evolve_time: float
    norm_drift: float
    edge_probability: float
    junction_probability: float

    def as_dict(self) -> Dict[str, Any]:
        return {
            "regions": self.regions.as_dict(),
            "packet": self.spec.as_dict(),
            "evolve_time": self.evolve_time,
            "norm_drift": self.norm_drift,
            "edge_probability": self.edge_probability,
            "junction_probability": self.junction_probability,
        }


def default_evolve_time(spec: WavePacketSpec, p: ModelParams) -> float:
    """Time for the packet centre to travel 1.5 times its distance to the junction."""
    xi = p.xi_a if spec.port is Port.FROM_A else p.xi_b
    return 1.5 * abs(spec.center_j0) / (2.0 * xi * math.sin(spec.carrier_k0))


def _edge_probability(lat: LatticeModel, density: np.ndarray) -> float:
    a = density[lat.arm_a]
    b = density[lat.arm_b]
    width_a = min(EDGE_SITES, lat.n_a)
    width_b = min(EDGE_SITES, lat.n_b)
    return float(a[:width_a].sum() + a[-width_a:].sum() + b[-width_b:].sum())


def _junction_probability(lat: LatticeModel, density: np.ndarray) -> float:
    width_a = min(JUNCTION_SITES, lat.n_a)
    width_b = min(JUNCTION_SITES, lat.n_b)
    near_a = density[lat.index_a(-width_a) : lat.index_a(width_a) + 1]
    near_b = density[lat.index_b(1) : lat.index_b(width_b) + 1]
    return float(near_a.sum() + near_b.sum() + density[lat.index_tls])


def wavepacket_scatter(
    lat: LatticeModel,
    spec: WavePacketSpec,
    evolve_time: Optional[float] = None,
    propagator: Optional[Propagator] = None,
) -> WavePacketResult:
    """Scatter a Gaussian packet and return the probability found in each region.

    The junction site j_a = 0 is counted with the right half of arm a.

    Raises
    ------
    PacketClippedError
        If the packet does not fit on the lattice, or more than 1e-6 of it
        reached the lattice ends.
    NormDriftError
        If the total probability moved by more than 1e-10.
    """
    spec.check_fits(lat)
    if propagator is None:
        propagator = Propagator(lat)
    elif propagator.lattice != lat:
        raise MismatchedConfigError("propagator was built for a different lattice")
    time = default_evolve_time(spec, lat.params) if evolve_time is None else evolve_time

    psi = propagator.evolve(spec.initial_state(lat), time)
    density = np.abs(psi) ** 2

    drift = abs(1.0 - float(density.sum()))
    if drift > NORM_TOLERANCE:
        raise NormDriftError(f"total probability drifted by {drift:.3g} over t={time}")
    edge = _edge_probability(lat, density)
    if edge > CLIP_TOLERANCE:
        raise PacketClippedError(
            f"{edge:.3g} of the probability reached the lattice ends by t={time}; "
            "shorten the evolve time or enlarge the lattice"
        )

    junction = lat.index_a(0)
    regions = RegionProbabilities(
        left_a=float(density[lat.index_a(-lat.n_a) : junction].sum()),
        right_a=float(density[junction : lat.index_a(lat.n_a) + 1].sum()),
        b=float(density[lat.arm_b].sum()),
        atom=float(density[lat.index_tls]),
    )
    residue = _junction_probability(lat, density)
    if residue > JUNCTION_TOLERANCE:
        logger.warning(
            "%.3g of the probability is still at the junction by t=%g; the packet has "
            "not cleared it, so region probabilities are not final. Start further out "
            "or evolve longer",
            residue,
            time,
        )
    logger.info("wave packet %s t=%g: %s", spec.port.label, time, regions.as_dict())
    return WavePacketResult(
        regions=regions,
        spec=spec,
        params=lat.params,
        evolve_time=time,
        norm_drift=drift,
        edge_probability=edge,
        junction_probability=residue,
    )
