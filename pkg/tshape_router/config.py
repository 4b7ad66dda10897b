"""Run configuration: environment defaults, parameter files and flag overrides.

Defaults can be set through a ``.env`` file placed in the working directory:

```env
# .env
TSHAPE_CONFIG=params/p0.toml   # parameter file used when --config is absent
TSHAPE_LOG_LEVEL=INFO          # CLI logging level (default: WARNING)
TSHAPE_STATIONARY_TOL=1e-10    # stationary-oracle comparison tolerance
TSHAPE_WAVEPACKET_TOL=0.02     # wave-packet comparison tolerance
```

Parameter files are flat TOML:

```toml
omega = 10.0
xi = 1.0
ga = 0.3
gb = 0.3
omegaA = 10.0
# optional per-arm overrides; unequal arms leave only the lattice oracle usable
omega_b = 10.5
```

The variables are loaded via *python-dotenv*.
"""

from __future__ import annotations

import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from dotenv import load_dotenv

from .errors import InvalidParamsError, IoFailureError
from .model import ModelParams

logger = logging.getLogger(__name__)

# --- Environment configuration ------------------------------------------------

# Load variables from .env if present; silently ignore missing file
load_dotenv()

DEFAULT_CONFIG_PATH = os.getenv("TSHAPE_CONFIG") or None
DEFAULT_LOG_LEVEL = os.getenv("TSHAPE_LOG_LEVEL", "WARNING").upper()
DEFAULT_STATIONARY_TOL = float(os.getenv("TSHAPE_STATIONARY_TOL", "1e-10"))
DEFAULT_WAVEPACKET_TOL = float(os.getenv("TSHAPE_WAVEPACKET_TOL", "0.02"))

# --- Parameter files ----------------------------------------------------------

# Keys accepted in a parameter file; every value must be a real number.
PARAM_KEYS = ("omega", "xi", "ga", "gb", "omegaA", "omega_a", "omega_b", "xi_a", "xi_b")

# Working point used throughout the tests and the README examples.
P0_DEFAULTS: Dict[str, float] = {
    "omega": 10.0,
    "xi": 1.0,
    "ga": 0.3,
    "gb": 0.3,
    "omegaA": 10.0,
}


def validate_param_values(values: Mapping[str, Any], source: str) -> Dict[str, float]:
    """Check keys and types of a parameter mapping and return it as floats.

    Raises
    ------
    InvalidParamsError
        On unknown keys or non-numeric values.
    """
    unknown = sorted(set(values) - set(PARAM_KEYS))
    if unknown:
        raise InvalidParamsError(
            f"unknown parameter(s) {', '.join(unknown)} in {source}; "
            f"allowed: {', '.join(PARAM_KEYS)}"
        )
    checked = {}
    for key, value in values.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidParamsError(
                f"invalid type for '{key}' in {source}: expected a number, "
                f"got {type(value).__name__}"
            )
        checked[key] = float(value)
    return checked


def load_param_file(path: Union[str, Path]) -> Dict[str, float]:
    """Load and validate a TOML parameter file.

    Raises
    ------
    IoFailureError
        If *path* cannot be read.
    InvalidParamsError
        If the file is not valid TOML or holds unknown keys or non-numbers.
    """
    try:
        with open(path, "rb") as fp:
            raw = tomllib.load(fp)
    except OSError as e:
        raise IoFailureError(f"cannot read parameter file {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise InvalidParamsError(f"parameter file {path} is not valid TOML: {e}") from e
    return validate_param_values(raw, str(path))


def resolve_params(
    file_values: Optional[Mapping[str, float]] = None,
    overrides: Optional[Mapping[str, Optional[float]]] = None,
) -> ModelParams:
    """Merge built-in defaults < file values < explicit overrides.

    Per-arm keys (``omega_a`` ...) fall back to the shared ``omega``/``xi``.
    ``None`` override values mean "not given".
    """
    merged: Dict[str, float] = dict(P0_DEFAULTS)
    merged.update(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    validate_param_values(merged, "resolved parameters")

    params = ModelParams(
        omega_a=merged.get("omega_a", merged["omega"]),
        omega_b=merged.get("omega_b", merged["omega"]),
        xi_a=merged.get("xi_a", merged["xi"]),
        xi_b=merged.get("xi_b", merged["xi"]),
        g_a=merged["ga"],
        g_b=merged["gb"],
        omega_tls=merged["omegaA"],
    )
    if not params.closed_form_valid:
        logger.warning(
            "unequal arms (omega_a=%g, omega_b=%g, xi_a=%g, xi_b=%g): "
            "closed forms disabled, only the lattice oracle applies",
            params.omega_a,
            params.omega_b,
            params.xi_a,
            params.xi_b,
        )
    return params


@dataclass
class RunConfig:
    """Fully resolved settings of one CLI invocation, echoed into its output."""

    command: str
    params: ModelParams
    config_file: Optional[str] = None
    payload: Dict[str, Any] = field(default_factory=dict)
    stationary_tolerance: Optional[float] = None
    wavepacket_tolerance: Optional[float] = None
    sources: List[str] = field(default_factory=list)

    def __post_init__(self):
        # Automatically fall back to the environment tolerances
        if self.stationary_tolerance is None:
            self.stationary_tolerance = DEFAULT_STATIONARY_TOL
        if self.wavepacket_tolerance is None:
            self.wavepacket_tolerance = DEFAULT_WAVEPACKET_TOL
        if not self.stationary_tolerance > 0 or not self.wavepacket_tolerance > 0:
            raise InvalidParamsError("comparison tolerances must be positive")
        if not self.sources:
            self.sources = ["defaults"] + ([f"file:{self.config_file}"] if self.config_file else [])

    def as_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "params": self.params.as_dict(),
            "config_file": self.config_file,
            "payload": dict(self.payload),
            "tolerances": {
                "stationary": self.stationary_tolerance,
                "wavepacket": self.wavepacket_tolerance,
            },
            "sources": list(self.sources),
        }
