"""Model parameters, the shared cosine band and the TLS-induced effective couplings.

All energies are expressed in the same units as the hopping strength; with
the default ``xi = 1`` that is the "units of xi" convention used for every
figure this package reproduces.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from numbers import Real
from typing import Any, Dict, Optional

import numpy as np

from .errors import (
    BandEdgeWarning,
    InvalidParamsError,
    OutOfBandError,
    PoleAtResonanceError,
)

logger = logging.getLogger(__name__)

# sin k below this value means v_g ~ 0 and the mode no longer propagates.
BAND_EDGE_TOLERANCE = 1e-6
# |E - omega_A| below this value leaves V_d(E) and G(E) undefined.
POLE_TOLERANCE = 1e-12
# Relative tolerance on g_a^2 vs 2 g_b^2 sin^2 k.
DECAY_MATCH_TOLERANCE = 1e-9


class Port(str, Enum):
    """Waveguide arm the photon is launched from."""

    FROM_A = "a"
    FROM_B = "b"

    @property
    def label(self) -> str:
        return "FromA" if self is Port.FROM_A else "FromB"


@dataclass(frozen=True)
class ModelParams:
    """Cavity frequencies, hoppings and TLS couplings of the T junction.

    ``omega_tls`` is the TLS splitting; it may be left unset (``None``) for
    operations that choose it themselves, such as router design or sweeps over
    the splitting.
    """

    omega_a: float
    omega_b: float
    xi_a: float
    xi_b: float
    g_a: float
    g_b: float
    omega_tls: Optional[float] = None

    def __post_init__(self) -> None:
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if value is None and field.name == "omega_tls":
                continue
            if not isinstance(value, Real) or isinstance(value, bool) or not math.isfinite(value):
                raise InvalidParamsError(
                    f"{field.name} must be a finite number, got {value!r}"
                )
            object.__setattr__(self, field.name, float(value))
        if self.xi_a <= 0 or self.xi_b <= 0:
            raise InvalidParamsError(
                f"hopping strengths must be positive (xi_a={self.xi_a}, xi_b={self.xi_b})"
            )
        if self.g_a < 0 or self.g_b < 0:
            raise InvalidParamsError(
                f"couplings must be non-negative (g_a={self.g_a}, g_b={self.g_b})"
            )

    @classmethod
    def uniform(
        cls,
        omega: float,
        xi: float,
        g_a: float,
        g_b: float,
        omega_tls: Optional[float] = None,
    ) -> "ModelParams":
        """Both arms share ``omega`` and ``xi``, the case the closed forms cover."""
        return cls(omega, omega, xi, xi, g_a, g_b, omega_tls)

    @property
    def closed_form_valid(self) -> bool:
        # Bitwise equality on purpose: near-equal arms belong to the lattice oracle.
        return self.omega_a == self.omega_b and self.xi_a == self.xi_b

    def require_closed_form(self) -> None:
        if not self.closed_form_valid:
            raise InvalidParamsError(
                "closed forms need omega_a == omega_b and xi_a == xi_b "
                f"(got omega_a={self.omega_a}, omega_b={self.omega_b}, "
                f"xi_a={self.xi_a}, xi_b={self.xi_b}); use the lattice oracle"
            )

    def require_omega_tls(self) -> float:
        if self.omega_tls is None:
            raise InvalidParamsError("the TLS splitting omega_A is not set")
        return self.omega_tls

    @property
    def omega(self) -> float:
        self.require_closed_form()
        return self.omega_a

    @property
    def xi(self) -> float:
        self.require_closed_form()
        return self.xi_a

    def with_omega_tls(self, omega_tls: Optional[float]) -> "ModelParams":
        return dataclasses.replace(self, omega_tls=omega_tls)

    def as_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class BlochMode:
    """A propagating mode of the cosine band: wavenumber, energy and group velocity."""

    k: float
    energy: float
    group_velocity: float
    band_edge: bool = False

    def as_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "E": self.energy,
            "v_g": self.group_velocity,
            "band_edge": self.band_edge,
        }


def dispersion(k, omega: float, xi: float):
    """Band energy ``omega - 2 xi cos k``; works on scalars and arrays."""
    return omega - 2.0 * xi * np.cos(k)


def _make_mode(k: float, energy: float, xi: float) -> BlochMode:
    sin_k = math.sin(k)
    band_edge = sin_k < BAND_EDGE_TOLERANCE
    if band_edge:
        warnings.warn(
            f"k={k!r} is within {BAND_EDGE_TOLERANCE} of a band edge; "
            "probabilities are not physical",
            BandEdgeWarning,
            stacklevel=3,
        )
    return BlochMode(
        k=k, energy=energy, group_velocity=2.0 * xi * sin_k, band_edge=band_edge
    )


def wavenumber_from_energy(energy: float, omega: float, xi: float) -> BlochMode:
    """Invert the dispersion relation on the branch k in (0, pi).

    Raises
    ------
    OutOfBandError
        If ``|energy - omega| >= 2 xi``.
    """
    cos_k = (omega - energy) / (2.0 * xi)
    if not abs(cos_k) < 1.0:
        raise OutOfBandError(
            f"E={energy} is outside the open band ({omega - 2 * xi}, {omega + 2 * xi})"
        )
    return _make_mode(math.acos(cos_k), float(energy), xi)


def mode_from_wavenumber(k: float, omega: float, xi: float) -> BlochMode:
    """Build the mode for a wavenumber strictly inside (0, pi)."""
    if not 0.0 < k < math.pi:
        raise OutOfBandError(f"k={k} must lie strictly inside (0, pi)")
    return _make_mode(float(k), float(dispersion(k, omega, xi)), xi)


@dataclass(frozen=True)
class EffectiveCouplings:
    """Deltalike potentials, interchannel coupling, Lamb shift and decay rates.

    ``potential_a``, ``potential_b`` and ``interchannel`` are ``None`` at the
    pole E = omega_A (or when the splitting is unset); the remaining fields
    are finite for every in-band mode.
    """

    potential_a: Optional[float]
    potential_b: Optional[float]
    interchannel: Optional[float]
    lamb_shift: float
    gamma_a: float
    gamma_b: float

    @property
    def at_pole(self) -> bool:
        return self.interchannel is None

    @property
    def total_decay(self) -> float:
        return self.gamma_a + self.gamma_b

    @property
    def decay_matched(self) -> bool:
        scale = max(self.gamma_a, self.gamma_b)
        return scale > 0 and abs(self.gamma_a - self.gamma_b) < DECAY_MATCH_TOLERANCE * scale

    def require_potentials(self) -> tuple[float, float, float]:
        if (
            self.potential_a is None
            or self.potential_b is None
            or self.interchannel is None
        ):
            raise PoleAtResonanceError(
                "V_a, V_b and G are undefined at E = omega_A"
            )
        return self.potential_a, self.potential_b, self.interchannel

    def as_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def effective_couplings(p: ModelParams, mode: BlochMode) -> EffectiveCouplings:
    """Evaluate V_a, V_b, G, the Lamb shift and both decay rates at ``mode``."""
    sin_k = math.sin(mode.k)
    lamb_shift = p.g_b**2 * math.cos(mode.k) / p.xi_b
    gamma_a = p.g_a**2 / mode.group_velocity
    gamma_b = 2.0 * p.g_b**2 * sin_k**2 / mode.group_velocity

    potential_a = potential_b = interchannel = None
    if p.omega_tls is not None:
        detuning = mode.energy - p.omega_tls
        if abs(detuning) < POLE_TOLERANCE:
            logger.debug("E=%r sits on the pole omega_A; V and G left undefined", mode.energy)
        else:
            potential_a = p.g_a**2 / detuning
            potential_b = p.g_b**2 / detuning
            interchannel = p.g_a * p.g_b / detuning

    return EffectiveCouplings(
        potential_a=potential_a,
        potential_b=potential_b,
        interchannel=interchannel,
        lamb_shift=lamb_shift,
        gamma_a=gamma_a,
        gamma_b=gamma_b,
    )


def renormalized_splitting(p: ModelParams) -> float:
    """Weak-coupling transition frequency omega_A + Delta(omega_A).

    Only meaningful when omega_A itself lies inside the band.
    """
    omega_tls = p.require_omega_tls()
    mode = wavenumber_from_energy(omega_tls, p.omega, p.xi)
    return omega_tls + p.g_b**2 * math.cos(mode.k) / p.xi
