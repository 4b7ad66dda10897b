"""Side-by-side comparison of closed-form results with the lattice oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Sequence, Union

from .errors import MismatchedConfigError
from .model import Port
from .scattering import ScatteringSolution
from .wavepacket import WavePacketResult

STATIONARY_TOLERANCE = 1e-10
WAVEPACKET_TOLERANCE = 0.02

OracleOutput = Union[ScatteringSolution, WavePacketResult]


@dataclass(frozen=True)
class ComparisonReport:
    method: str
    port: Port
    k: float
    diffs: Mapping[str, float]
    tolerance: float

    @property
    def max_diff(self) -> float:
        return max(self.diffs.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return all(math.isfinite(d) and d <= self.tolerance for d in self.diffs.values())

    def as_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "port": self.port.value,
            "k": self.k,
            "diffs": dict(self.diffs),
            "max_diff": self.max_diff,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _check_config(analytic: ScatteringSolution, port: Port, k: float, params) -> None:
    if analytic.port is not port:
        raise MismatchedConfigError(
            f"analytic result is for port {analytic.port.value}, oracle for {port.value}"
        )
    if analytic.params != params:
        raise MismatchedConfigError("analytic and oracle results use different parameters")
    if abs(analytic.mode.k - k) > 1e-12:
        raise MismatchedConfigError(f"analytic k={analytic.mode.k} but oracle k={k}")


def _stationary_diffs(
    analytic: ScatteringSolution, oracle: ScatteringSolution
) -> Dict[str, float]:
    diffs = {
        name: abs(value - oracle.amplitudes[name])
        for name, value in analytic.amplitudes.items()
    }
    diffs.update(
        {
            name: abs(value - oracle.probabilities[name])
            for name, value in analytic.probabilities.items()
        }
    )
    return diffs


def _wavepacket_diffs(
    analytic: ScatteringSolution, oracle: WavePacketResult
) -> Dict[str, float]:
    probs = analytic.probabilities
    regions = oracle.regions
    if analytic.port is Port.FROM_A:
        return {
            "P_right_a": abs(regions.right_a - probs["T_aa"]),
            "P_left_a": abs(regions.left_a - probs["R_aa"]),
            "P_b": abs(regions.b - probs["T_ab"]),
        }
    return {
        "P_left_a": abs(regions.left_a - probs["T_ba"] / 2.0),
        "P_right_a": abs(regions.right_a - probs["T_ba"] / 2.0),
        "P_b": abs(regions.b - probs["R_bb"]),
    }


def compare(
    analytic: ScatteringSolution,
    oracle: OracleOutput,
    tolerance: Optional[float] = None,
) -> ComparisonReport:
    """Absolute differences between a closed-form result and an oracle output.

    Stationary outputs are compared amplitude by amplitude and probability by
    probability (default tolerance 1e-10); wave-packet outputs are compared
    region by region against the closed-form probabilities (default 0.02).
    """
    if isinstance(oracle, WavePacketResult):
        _check_config(analytic, oracle.spec.port, oracle.spec.carrier_k0, oracle.params)
        return ComparisonReport(
            method="wavepacket",
            port=analytic.port,
            k=analytic.mode.k,
            diffs=_wavepacket_diffs(analytic, oracle),
            tolerance=WAVEPACKET_TOLERANCE if tolerance is None else tolerance,
        )
    _check_config(analytic, oracle.port, oracle.mode.k, oracle.params)
    return ComparisonReport(
        method="stationary",
        port=analytic.port,
        k=analytic.mode.k,
        diffs=_stationary_diffs(analytic, oracle),
        tolerance=STATIONARY_TOLERANCE if tolerance is None else tolerance,
    )


def convergence_trend(reports: Sequence[ComparisonReport]) -> bool:
    """True when the max difference strictly decreases along ``reports``."""
    errors = [report.max_diff for report in reports]
    return all(later < earlier for earlier, later in zip(errors, errors[1:]))
