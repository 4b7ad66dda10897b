"""Closed-form scattering amplitudes for both incidence ports.

The amplitudes are evaluated in their cleared-denominator form,

    D = v_g (E - omega_A) + g_b^2 sin 2k + i (g_a^2 + 2 g_b^2 sin^2 k),

so nothing diverges at E = omega_A. The kernels accept broadcastable numpy
inputs; ``scatter_from_a`` / ``scatter_from_b`` wrap them for a single mode
and add the junction values needed to rebuild the stationary fields.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Tuple

import numpy as np

from .errors import InvalidParamsError, WindowTooSmallError
from .model import BlochMode, ModelParams, Port

# Below this |E - omega_A| the atom amplitude is taken from a cavity equation.
ATOM_EQUATION_SWITCH = 1e-3
# Residual checks need at least these sites around the junction.
MIN_WINDOW_A = 5
MIN_WINDOW_B = 6


def _denominator(k, detuning, xi, g_a, g_b):
    sin_k = np.sin(k)
    return (
        2.0 * xi * sin_k * detuning
        + g_b**2 * np.sin(2.0 * k)
        + 1j * (g_a**2 + 2.0 * g_b**2 * sin_k**2)
    )


def _decoupled(g_a, g_b):
    return (np.asarray(g_a) == 0) & (np.asarray(g_b) == 0)


def transfer_amplitude(k, detuning, xi, g_a, g_b):
    """Interchannel amplitude ``-2 g_a g_b sin k / D``.

    The same expression is the transfer amplitude t^b for incidence on arm a
    and t^a for incidence on arm b.
    """
    decoupled = _decoupled(g_a, g_b)
    denominator = np.where(decoupled, 1.0, _denominator(k, detuning, xi, g_a, g_b))
    return np.where(decoupled, 0j, -2.0 * g_a * g_b * np.sin(k) / denominator)


def amplitudes_from_a(k, detuning, xi, g_a, g_b):
    """Return ``(t, r, t_b)`` for a photon incident along the infinite arm."""
    decoupled = _decoupled(g_a, g_b)
    sin_k = np.sin(k)
    denominator = np.where(decoupled, 1.0, _denominator(k, detuning, xi, g_a, g_b))
    numerator = (
        2.0 * xi * sin_k * detuning
        + g_b**2 * np.sin(2.0 * k)
        + 2j * g_b**2 * sin_k**2
    )
    t = np.where(decoupled, 1.0 + 0j, numerator / denominator)
    return t, t - 1.0, transfer_amplitude(k, detuning, xi, g_a, g_b)


def amplitudes_from_b(k, detuning, xi, g_a, g_b):
    """Return ``(t_a, r_b)`` for a photon incident along the semi-infinite arm."""
    decoupled = _decoupled(g_a, g_b)
    sin_k = np.sin(k)
    denominator = np.where(decoupled, 1.0, _denominator(k, detuning, xi, g_a, g_b))
    numerator = (
        2.0 * xi * sin_k * detuning
        + g_b**2 * np.sin(2.0 * k)
        + 1j * (g_a**2 - 2.0 * g_b**2 * sin_k**2)
    )
    r_b = np.where(decoupled, -1.0 + 0j, -numerator / denominator)
    return transfer_amplitude(k, detuning, xi, g_a, g_b), r_b


@dataclass(frozen=True)
class ScatteringSolution:
    """Amplitudes, probabilities and junction values for one incidence port.

    ``amplitudes`` holds ``t, r, t_b`` (from a) or ``t_a, r_b`` (from b);
    ``probabilities`` holds ``T_aa, R_aa, T_ab`` or ``T_ba, R_bb``.
    ``boundary_amplitude`` is A with ``A sin k = U_1^[b]``.
    """

    port: Port
    mode: BlochMode
    params: ModelParams
    amplitudes: Mapping[str, complex]
    boundary_amplitude: complex
    atom_amplitude: complex
    probabilities: Mapping[str, float]
    physical: bool = True

    def amplitude(self, name: str) -> complex:
        return self.amplitudes[name]

    @property
    def unitarity_sum(self) -> float:
        return float(sum(self.probabilities.values()))

    @property
    def unitarity_residual(self) -> float:
        return abs(self.unitarity_sum - 1.0)

    @property
    def arm_probabilities(self) -> Dict[str, float]:
        """Probability of finding the photon in arm a and in arm b."""
        probs = self.probabilities
        if self.port is Port.FROM_A:
            return {"a": probs["T_aa"] + probs["R_aa"], "b": probs["T_ab"]}
        return {"a": probs["T_ba"], "b": probs["R_bb"]}

    @property
    def reflection_phase(self) -> float:
        key = "r" if self.port is Port.FROM_A else "r_b"
        return cmath.phase(self.amplitudes[key])

    def as_dict(self) -> Dict[str, Any]:
        return {
            "port": self.port.value,
            "mode": self.mode.as_dict(),
            "amplitudes": {
                name: [value.real, value.imag] for name, value in self.amplitudes.items()
            },
            "probabilities": dict(self.probabilities),
            "boundary_amplitude": [
                self.boundary_amplitude.real,
                self.boundary_amplitude.imag,
            ],
            "atom_amplitude": [self.atom_amplitude.real, self.atom_amplitude.imag],
            "unitarity_residual": self.unitarity_residual,
            "reflection_phase": self.reflection_phase,
            "physical": self.physical,
        }


@dataclass(frozen=True)
class _Junction:
    """Field values next to the TLS: a-sites -1, 0, +1 and b-sites 1, 2."""

    a_left: complex
    a_zero: complex
    a_right: complex
    b_one: complex
    b_two: complex


def _atom_amplitude(p: ModelParams, energy: float, junction: _Junction) -> complex:
    detuning = energy - p.require_omega_tls()
    if abs(detuning) >= ATOM_EQUATION_SWITCH:
        return (p.g_a * junction.a_zero + p.g_b * junction.b_one) / detuning
    # Near E = omega_A the atom equation is 0/0; solve the junction cavity
    # equation of the more strongly coupled arm instead.
    if p.g_a >= p.g_b and p.g_a > 0:
        return (
            (energy - p.omega_a) * junction.a_zero
            + p.xi_a * (junction.a_left + junction.a_right)
        ) / p.g_a
    if p.g_b > 0:
        return ((energy - p.omega_b) * junction.b_one + p.xi_b * junction.b_two) / p.g_b
    return 0j


def _closed_form_inputs(p: ModelParams, mode: BlochMode) -> Tuple[float, float]:
    p.require_closed_form()
    return mode.energy - p.require_omega_tls(), p.xi


def scatter_from_a(p: ModelParams, mode: BlochMode) -> ScatteringSolution:
    """Photon incident from the left along the infinite arm a."""
    detuning, xi = _closed_form_inputs(p, mode)
    k = mode.k
    t, r, t_b = (complex(x) for x in amplitudes_from_a(k, detuning, xi, p.g_a, p.g_b))

    phase = cmath.exp(1j * k)
    junction = _Junction(
        a_left=cmath.exp(-1j * k) + r * phase,
        a_zero=t,
        a_right=t * phase,
        b_one=t_b * phase,
        b_two=t_b * phase * phase,
    )
    return ScatteringSolution(
        port=Port.FROM_A,
        mode=mode,
        params=p,
        amplitudes={"t": t, "r": r, "t_b": t_b},
        boundary_amplitude=junction.b_one / math.sin(k),
        atom_amplitude=_atom_amplitude(p, mode.energy, junction),
        probabilities={"T_aa": abs(t) ** 2, "R_aa": abs(r) ** 2, "T_ab": abs(t_b) ** 2},
        physical=not mode.band_edge,
    )


def scatter_from_b(p: ModelParams, mode: BlochMode) -> ScatteringSolution:
    """Photon incident downwards along the semi-infinite arm b."""
    detuning, xi = _closed_form_inputs(p, mode)
    k = mode.k
    t_a, r_b = (complex(x) for x in amplitudes_from_b(k, detuning, xi, p.g_a, p.g_b))

    phase = cmath.exp(1j * k)
    # Forward and backward transfer share one amplitude, so U^[a] is continuous at 0.
    junction = _Junction(
        a_left=t_a * phase,
        a_zero=t_a,
        a_right=t_a * phase,
        b_one=1.0 / phase + r_b * phase,
        b_two=1.0 / (phase * phase) + r_b * phase * phase,
    )
    return ScatteringSolution(
        port=Port.FROM_B,
        mode=mode,
        params=p,
        amplitudes={"t_a": t_a, "r_b": r_b},
        boundary_amplitude=junction.b_one / math.sin(k),
        atom_amplitude=_atom_amplitude(p, mode.energy, junction),
        probabilities={"T_ba": 2.0 * abs(t_a) ** 2, "R_bb": abs(r_b) ** 2},
        physical=not mode.band_edge,
    )


def scatter(p: ModelParams, mode: BlochMode, port: Port) -> ScatteringSolution:
    if port is Port.FROM_A:
        return scatter_from_a(p, mode)
    return scatter_from_b(p, mode)


@dataclass(frozen=True)
class SiteWindow:
    """Sites ``a_min..a_max`` on arm a and ``1..b_max`` on arm b."""

    a_min: int = -MIN_WINDOW_A
    a_max: int = MIN_WINDOW_A
    b_max: int = MIN_WINDOW_B

    def __post_init__(self) -> None:
        if self.a_min > self.a_max or self.b_max < 1:
            raise WindowTooSmallError(f"empty site window {self}")

    @property
    def a_sites(self) -> np.ndarray:
        return np.arange(self.a_min, self.a_max + 1)

    @property
    def b_sites(self) -> np.ndarray:
        return np.arange(1, self.b_max + 1)


@dataclass(frozen=True, eq=False)
class FieldProfile:
    window: SiteWindow
    u_a: np.ndarray
    u_b: np.ndarray
    u_e: complex

    def site_a(self, j: int) -> complex:
        return complex(self.u_a[j - self.window.a_min])

    def site_b(self, j: int) -> complex:
        return complex(self.u_b[j - 1])


def reconstruct_fields(
    sol: ScatteringSolution, window: SiteWindow = SiteWindow()
) -> FieldProfile:
    """Evaluate the piecewise plane-wave ansatz of ``sol`` on ``window``."""
    if not sol.params.closed_form_valid:
        raise InvalidParamsError("field reconstruction uses the equal-arm ansatz")
    k = sol.mode.k
    j_a = window.a_sites
    j_b = window.b_sites
    amps = sol.amplitudes

    if sol.port is Port.FROM_A:
        u_a = np.where(
            j_a < 0,
            np.exp(1j * k * j_a) + amps["r"] * np.exp(-1j * k * j_a),
            amps["t"] * np.exp(1j * k * j_a),
        )
        u_b = amps["t_b"] * np.exp(1j * k * j_b)
    else:
        u_a = amps["t_a"] * np.exp(1j * k * np.abs(j_a))
        u_b = np.exp(-1j * k * j_b) + amps["r_b"] * np.exp(1j * k * j_b)

    return FieldProfile(window=window, u_a=u_a, u_b=u_b, u_e=sol.atom_amplitude)


def residual_check(
    p: ModelParams, sol: ScatteringSolution, profile: FieldProfile
) -> float:
    """Largest violation of the coupled stationary equations on ``profile``.

    Every interior a-site, every b-site below ``b_max`` (with the hard wall
    U_0^[b] = 0) and the atom equation are checked.
    """
    window = profile.window
    if window.a_min > -MIN_WINDOW_A or window.a_max < MIN_WINDOW_A or window.b_max < MIN_WINDOW_B:
        raise WindowTooSmallError(
            f"residual check needs j_a in [-{MIN_WINDOW_A}, {MIN_WINDOW_A}] and "
            f"j_b in [1, {MIN_WINDOW_B}], got {window}"
        )
    energy = sol.mode.energy
    u_a, u_b, u_e = profile.u_a, profile.u_b, profile.u_e

    arm_a = (energy - p.omega_a) * u_a[1:-1] + p.xi_a * (u_a[:-2] + u_a[2:])
    arm_a[-window.a_min - 1] -= p.g_a * u_e

    walled = np.concatenate(([0j], u_b))
    arm_b = (energy - p.omega_b) * walled[1:-1] + p.xi_b * (walled[:-2] + walled[2:])
    arm_b[0] -= p.g_b * u_e

    atom = (energy - p.require_omega_tls()) * u_e - p.g_a * profile.site_a(0) - p.g_b * u_b[0]
    return float(max(np.abs(arm_a).max(), np.abs(arm_b).max(), abs(atom)))
