"""Exception hierarchy shared by the library and the command-line entry point.

Every error carries the process exit code the CLI reports for it, so that
``main`` can translate any library failure without a lookup table:

* ``2`` for precondition violations (bad input, out-of-band energies, ...)
* ``3`` for internal tolerance failures (norm drift, singular solves)
"""

from __future__ import annotations

import math


class RouterError(Exception):
    """Base class for all errors raised by ``tshape_router``."""

    exit_code = 2


class PreconditionError(RouterError):
    """An operation was called with inputs outside its contract."""

    exit_code = 2


class OutOfBandError(PreconditionError):
    """Energy lies on or outside the band edge |E - omega| >= 2 xi."""


class InvalidParamsError(PreconditionError):
    """Model parameters violate their invariants or the closed-form assumptions."""


class PoleAtResonanceError(PreconditionError):
    """The deltalike potentials V_d(E), G(E) are undefined at E = omega_A."""


class WindowTooSmallError(PreconditionError):
    """A field window does not cover the sites needed for a residual check."""


class SizeTooSmallError(PreconditionError):
    """A truncated lattice is too short to hold the junction structure."""


class EmptyGridError(PreconditionError):
    """A sweep or scan grid has no usable points."""


class MismatchedConfigError(PreconditionError):
    """Two results being compared were produced for different configurations."""


class PacketClippedError(PreconditionError):
    """A wave packet does not fit on the lattice or leaked onto its ends."""


class IoFailureError(PreconditionError):
    """An output file could not be written or an input file could not be read."""


class ToleranceFailure(RouterError):
    """A numerical self-check failed; the result cannot be trusted."""

    exit_code = 3


class NormDriftError(ToleranceFailure):
    """Time evolution did not conserve the total probability."""


class SingularSystemError(ToleranceFailure):
    """The stationary linear system could not be solved reliably."""

    def __init__(self, message: str, condition: float = math.inf):
        super().__init__(f"{message} (condition estimate {condition:.3g})")
        self.condition = condition


class BandEdgeWarning(UserWarning):
    """The mode sits so close to a band edge that v_g is effectively zero."""
