"""Grid sweeps over the incident energy or the TLS splitting.

A :class:`SweepSpec` describes one curve family member (one parameter set,
one port, one swept variable); :func:`run_sweep` tabulates the requested
probabilities on a closed-interval grid. Energies outside the open band are
clipped from the table, not reported as errors.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from . import __version__
from .errors import EmptyGridError, InvalidParamsError
from .model import ModelParams, Port, effective_couplings, wavenumber_from_energy
from .scattering import amplitudes_from_a, amplitudes_from_b

logger = logging.getLogger(__name__)

UNITARITY_TOLERANCE = 1e-12

QUANTITIES = {
    Port.FROM_A: ("T_aa", "R_aa", "T_ab", "R_aa+T_aa"),
    Port.FROM_B: ("T_ba", "R_bb"),
}
DEFAULT_QUANTITIES = {
    Port.FROM_A: ("T_aa", "R_aa", "T_ab"),
    Port.FROM_B: ("T_ba", "R_bb"),
}


class SweepVariable(str, Enum):
    INCIDENT_ENERGY = "E"
    ATOM_SPLITTING = "omegaA"


@dataclass(frozen=True)
class SweepSpec:
    """Configuration for one sweep.

    ``params.omega_tls`` is required for energy sweeps and ignored for
    splitting sweeps, which need the fixed incident ``energy`` instead.
    ``quantities=None`` selects the port's default columns.
    """

    variable: SweepVariable
    lo: float
    hi: float
    n_points: int
    port: Port
    params: ModelParams
    quantities: Optional[Tuple[str, ...]] = None
    energy: Optional[float] = None

    def __post_init__(self):
        if self.n_points < 2:
            raise EmptyGridError(f"a sweep needs at least 2 points, got {self.n_points}")
        if not self.lo < self.hi:
            raise EmptyGridError(f"sweep range [{self.lo}, {self.hi}] is empty")
        self.params.require_closed_form()
        if self.variable is SweepVariable.INCIDENT_ENERGY:
            self.params.require_omega_tls()
        elif self.energy is None:
            raise InvalidParamsError("a sweep over omega_A needs a fixed incident energy")
        else:
            wavenumber_from_energy(self.energy, self.params.omega, self.params.xi)

        # Automatically select the port's default columns if none were given
        if self.quantities is None:
            object.__setattr__(self, "quantities", DEFAULT_QUANTITIES[self.port])
        unknown = set(self.quantities) - set(QUANTITIES[self.port])
        if unknown:
            raise InvalidParamsError(
                f"quantities {sorted(unknown)} are not defined for port {self.port.value}"
            )

    @property
    def columns(self) -> Tuple[str, ...]:
        return tuple(self.quantities or ())


@dataclass(frozen=True, eq=False)
class SweepTable:
    metadata: Dict[str, Any]
    x_name: str
    x: np.ndarray
    columns: Dict[str, np.ndarray]
    unitarity_residual: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def quantities(self) -> Tuple[str, ...]:
        return tuple(self.columns)

    @property
    def n_rows(self) -> int:
        return int(self.x.size)

    @property
    def all_unitary(self) -> bool:
        return bool(np.all(self.unitarity_residual <= UNITARITY_TOLERANCE))

    def with_metadata(self, **extra: Any) -> "SweepTable":
        return SweepTable(
            metadata={**self.metadata, **extra},
            x_name=self.x_name,
            x=self.x,
            columns=self.columns,
            unitarity_residual=self.unitarity_residual,
        )


def _evaluate(port: Port, k, detuning, xi, g_a, g_b) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
    if port is Port.FROM_A:
        t, r, t_b = amplitudes_from_a(k, detuning, xi, g_a, g_b)
        values = {"T_aa": np.abs(t) ** 2, "R_aa": np.abs(r) ** 2, "T_ab": np.abs(t_b) ** 2}
        values["R_aa+T_aa"] = values["R_aa"] + values["T_aa"]
        total = values["T_aa"] + values["R_aa"] + values["T_ab"]
    else:
        t_a, r_b = amplitudes_from_b(k, detuning, xi, g_a, g_b)
        values = {"T_ba": 2.0 * np.abs(t_a) ** 2, "R_bb": np.abs(r_b) ** 2}
        total = values["T_ba"] + values["R_bb"]
    return values, np.abs(total - 1.0)


def _with_resonance(grid: np.ndarray, resonance: float) -> np.ndarray:
    """Move the interior grid point nearest ``resonance`` onto it."""
    i = int(np.argmin(np.abs(grid - resonance)))
    if 0 < i < grid.size - 1:
        grid = grid.copy()
        grid[i] = resonance
    return grid


def run_sweep(spec: SweepSpec) -> SweepTable:
    """Evaluate the closed forms at every grid point of ``spec``."""
    p = spec.params
    omega, xi = p.omega, p.xi
    grid = np.linspace(spec.lo, spec.hi, spec.n_points)

    resonance: Optional[float] = None
    if spec.variable is SweepVariable.INCIDENT_ENERGY:
        in_band = np.abs(grid - omega) < 2.0 * xi
        clipped = int(grid.size - np.count_nonzero(in_band))
        if clipped:
            logger.warning(
                "clipped %d of %d energies outside the band (%g, %g)",
                clipped,
                grid.size,
                omega - 2.0 * xi,
                omega + 2.0 * xi,
            )
        x = grid[in_band]
        if x.size == 0:
            raise EmptyGridError(f"no energy in [{spec.lo}, {spec.hi}] lies inside the band")
        k = np.arccos((omega - x) / (2.0 * xi))
        detuning = x - p.require_omega_tls()
    else:
        clipped = 0
        assert spec.energy is not None
        mode = wavenumber_from_energy(spec.energy, omega, xi)
        # The transfer peak sits at omega_A = E + Delta(E); keep it on the grid.
        resonance = spec.energy + effective_couplings(p, mode).lamb_shift
        x = _with_resonance(grid, resonance)
        k = np.full_like(x, mode.k)
        detuning = spec.energy - x

    values, residual = _evaluate(spec.port, k, detuning, xi, p.g_a, p.g_b)
    worst = float(residual.max())
    if worst > UNITARITY_TOLERANCE:
        logger.warning("unitarity residual %.3g exceeds %g", worst, UNITARITY_TOLERANCE)

    metadata: Dict[str, Any] = {
        "tool": "tshape-router",
        "version": __version__,
        "units": "xi",
        "variable": spec.variable.value,
        "port": spec.port.value,
        "range": [spec.lo, spec.hi],
        "n_points": spec.n_points,
        "clipped": clipped,
        "energy": spec.energy,
        "resonance": resonance,
        "params": p.as_dict(),
    }
    return SweepTable(
        metadata=metadata,
        x_name=spec.variable.value,
        x=x,
        columns={name: values[name] for name in spec.columns},
        unitarity_residual=residual,
    )


# --- Figure presets -----------------------------------------------------------

FIGURE_GRID = (8.0, 12.0, 2001)
_OMEGA = 10.0
_XI = 1.0
# (label, omega_A) at g_a = g_b = 0.3
_SPLITTINGS = (("omegaA_9", 9.0), ("omegaA_10", 10.0), ("omegaA_11.3", 11.3))
# (label, g, E)
_ENERGIES = (
    ("solid", 0.15, _OMEGA - math.sqrt(2.0)),
    ("dotted", 0.3, _OMEGA),
    ("dashed", 0.25, _OMEGA + math.sqrt(2.0)),
)
FIGURES = ("fig2a", "fig2b", "fig3a", "fig3b")


def figure_specs(name: str) -> Dict[str, SweepSpec]:
    """Sweep specs for the three curves of a published spectrum figure."""
    lo, hi, n = FIGURE_GRID
    if name in ("fig2a", "fig3a"):
        port = Port.FROM_A if name == "fig2a" else Port.FROM_B
        return {
            label: SweepSpec(
                variable=SweepVariable.INCIDENT_ENERGY,
                lo=lo,
                hi=hi,
                n_points=n,
                port=port,
                params=ModelParams.uniform(_OMEGA, _XI, 0.3, 0.3, omega_tls),
            )
            for label, omega_tls in _SPLITTINGS
        }
    if name in ("fig2b", "fig3b"):
        port = Port.FROM_A if name == "fig2b" else Port.FROM_B
        quantities = ("R_aa+T_aa", "T_ab") if name == "fig2b" else ("T_ba",)
        return {
            label: SweepSpec(
                variable=SweepVariable.ATOM_SPLITTING,
                lo=lo,
                hi=hi,
                n_points=n,
                port=port,
                params=ModelParams.uniform(_OMEGA, _XI, g, g),
                quantities=quantities,
                energy=energy,
            )
            for label, g, energy in _ENERGIES
        }
    raise InvalidParamsError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
