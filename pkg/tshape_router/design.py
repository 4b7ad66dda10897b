"""Router design: pick the TLS splitting that maximises transfer at a given energy.

Transfer from arm b peaks when the incident energy meets the resonance
condition E - omega_A + Delta(E) = 0 and reaches one when, in addition,
the decay rates into the two arms match (2 g_b^2 sin^2 k = g_a^2).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np

from .errors import EmptyGridError
from .model import (
    DECAY_MATCH_TOLERANCE,
    ModelParams,
    Port,
    effective_couplings,
    wavenumber_from_energy,
)
from .scattering import scatter_from_a, scatter_from_b, transfer_amplitude

logger = logging.getLogger(__name__)


def transfer_rate(port: Port, k, detuning, xi, g_a, g_b):
    """T_ab = |t^b|^2 (from a) or T_ba = 2 |t^a|^2 (from b), vectorised."""
    weight = 1.0 if port is Port.FROM_A else 2.0
    return weight * np.abs(transfer_amplitude(k, detuning, xi, g_a, g_b)) ** 2


@dataclass(frozen=True)
class DesignReport:
    target_energy: float
    wavenumber: float
    resonant_omega_tls: float
    decay_matched: bool
    no_decay_match: bool
    required_g_a: float
    achievable_T_ba: float
    achievable_T_ab: float
    lamb_shift: float
    gamma_a: float
    gamma_b: float
    matching_energies: Tuple[float, ...] = ()
    diagnostic: str = ""

    def as_dict(self) -> Dict[str, Any]:
        return {
            "target_E": self.target_energy,
            "k": self.wavenumber,
            "resonant_omega_A": self.resonant_omega_tls,
            "decay_matched": self.decay_matched,
            "no_decay_match": self.no_decay_match,
            "required_g_a": self.required_g_a,
            "achievable_T_ba": self.achievable_T_ba,
            "achievable_T_ab": self.achievable_T_ab,
            "lamb_shift": self.lamb_shift,
            "gamma_a": self.gamma_a,
            "gamma_b": self.gamma_b,
            "matching_energies": list(self.matching_energies),
            "diagnostic": self.diagnostic,
        }


def _matching_energies(p: ModelParams) -> Tuple[float, ...]:
    """Band energies whose wavenumber satisfies 2 g_b^2 sin^2 k = g_a^2."""
    if p.g_a == 0 or p.g_b == 0:
        return ()
    sin_k = p.g_a / (math.sqrt(2.0) * p.g_b)
    if sin_k > 1.0:
        return ()
    k = math.asin(sin_k)
    energies = {p.omega - 2.0 * p.xi * math.cos(k), p.omega + 2.0 * p.xi * math.cos(k)}
    return tuple(sorted(energies))


def design_for_energy(p: ModelParams, energy: float) -> DesignReport:
    """Choose omega_A for ``energy`` and report the transfer it achieves.

    ``p.omega_tls`` is ignored; the designed splitting replaces it.
    """
    p.require_closed_form()
    mode = wavenumber_from_energy(energy, p.omega, p.xi)
    couplings = effective_couplings(p, mode)
    sin_k = math.sin(mode.k)

    resonant = energy + couplings.lamb_shift
    decay_target = 2.0 * p.g_b**2 * sin_k**2
    decay_matched = p.g_b > 0 and abs(decay_target - p.g_a**2) < (
        DECAY_MATCH_TOLERANCE * max(decay_target, p.g_a**2)
    )
    no_decay_match = p.g_b == 0 or p.g_a > math.sqrt(2.0) * p.g_b
    required_g_a = math.sqrt(2.0) * p.g_b * sin_k

    designed = p.with_omega_tls(resonant)
    achievable_T_ba = scatter_from_b(designed, mode).probabilities["T_ba"]
    achievable_T_ab = scatter_from_a(designed, mode).probabilities["T_ab"]

    if p.g_b == 0:
        diagnostic = "g_b = 0: the TLS does not couple to arm b, nothing is transferred"
    elif no_decay_match:
        diagnostic = (
            f"decay match would need sin k = g_a/(sqrt(2) g_b) = "
            f"{p.g_a / (math.sqrt(2.0) * p.g_b):.6g} > 1"
        )
    elif not decay_matched:
        diagnostic = f"decay match at this energy needs g_a = {required_g_a:.6g}"
    else:
        diagnostic = ""

    logger.info(
        "design E=%r: omega_A=%r decay_matched=%s T_ba=%r",
        energy,
        resonant,
        decay_matched,
        achievable_T_ba,
    )
    return DesignReport(
        target_energy=float(energy),
        wavenumber=mode.k,
        resonant_omega_tls=resonant,
        decay_matched=decay_matched,
        no_decay_match=no_decay_match,
        required_g_a=required_g_a,
        achievable_T_ba=achievable_T_ba,
        achievable_T_ab=achievable_T_ab,
        lamb_shift=couplings.lamb_shift,
        gamma_a=couplings.gamma_a,
        gamma_b=couplings.gamma_b,
        matching_energies=_matching_energies(p),
        diagnostic=diagnostic,
    )


@dataclass(frozen=True)
class PeakResult:
    location: float
    value: float
    grid_index: int
    grid_value: float
    clipped: bool
    step: float = field(default=math.nan)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "omega_A": self.location,
            "value": self.value,
            "grid_index": self.grid_index,
            "grid_value": self.grid_value,
            "clipped": self.clipped,
            "step": self.step,
        }


def _parabola_vertex(x: np.ndarray, y: np.ndarray) -> float:
    x0, x1, x2 = x
    y0, y1, y2 = y
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    if not a < 0:
        return float(x1)
    return float(min(max(-b / (2.0 * a), x0), x2))


def peak_scan(p: ModelParams, port: Port, grid, energy: float) -> PeakResult:
    """Locate the transfer peak over a grid of TLS splittings at fixed ``energy``.

    The grid argmax (first occurrence, i.e. lowest omega_A, on ties) is
    refined by a three-point parabola; the reported value is the transfer
    evaluated at the refined location. A maximum on either end of the grid
    is returned unrefined with ``clipped`` set.
    """
    omega_grid = np.sort(np.asarray(grid, dtype=float).ravel())
    if omega_grid.size == 0:
        raise EmptyGridError("peak scan needs at least one omega_A grid point")
    p.require_closed_form()
    mode = wavenumber_from_energy(energy, p.omega, p.xi)

    def rate(omega_tls):
        return transfer_rate(port, mode.k, energy - omega_tls, p.xi, p.g_a, p.g_b)

    values = rate(omega_grid)
    index = int(np.argmax(values))
    clipped = index == 0 or index == omega_grid.size - 1
    if clipped:
        logger.warning(
            "transfer peak sits on the grid boundary omega_A=%r", omega_grid[index]
        )
        location = float(omega_grid[index])
    else:
        location = _parabola_vertex(
            omega_grid[index - 1 : index + 2], values[index - 1 : index + 2]
        )

    step = float(np.max(np.diff(omega_grid))) if omega_grid.size > 1 else math.nan
    return PeakResult(
        location=location,
        value=float(rate(location)),
        grid_index=index,
        grid_value=float(values[index]),
        clipped=clipped,
        step=step,
    )
