"""Main entry point for the T-junction router tool."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from .compare import compare
from .config import (
    DEFAULT_CONFIG_PATH,
    DEFAULT_LOG_LEVEL,
    RunConfig,
    load_param_file,
    resolve_params,
)
from .design import design_for_energy
from .emit import Format, emit, emit_record
from .errors import InvalidParamsError, IoFailureError, OutOfBandError, RouterError
from .lattice import LatticeModel, stationary_scatter
from .model import (
    BlochMode,
    ModelParams,
    Port,
    effective_couplings,
    mode_from_wavenumber,
    renormalized_splitting,
    wavenumber_from_energy,
)
from .scattering import scatter
from .sweep import FIGURES, SweepSpec, SweepVariable, figure_specs, run_sweep
from .wavepacket import JUNCTION_TOLERANCE, WavePacketSpec, wavepacket_scatter

logger = logging.getLogger(__name__)

# (flag, key in the parameter file)
PARAM_FLAGS = (
    ("--omega", "omega"),
    ("--xi", "xi"),
    ("--ga", "ga"),
    ("--gb", "gb"),
    ("--omegaA", "omegaA"),
    ("--omega-a", "omega_a"),
    ("--omega-b", "omega_b"),
    ("--xi-a", "xi_a"),
    ("--xi-b", "xi_b"),
)
# Arguments that are not part of a subcommand's payload echo.
_NOT_PAYLOAD = {"command", "config", "log_level", "out", "format", "stationary_tol", "wavepacket_tol"}

STATIONARY_LATTICE = 200
WAVEPACKET_LATTICE = 600


def _print_record(record: Dict[str, Any]) -> None:
    print(json.dumps(record, indent=2, sort_keys=True))


def _incident_mode(args, omega: float, xi: float) -> BlochMode:
    if args.E is not None:
        return wavenumber_from_energy(args.E, omega, xi)
    return mode_from_wavenumber(args.k, omega, xi)


def build_run_config(args) -> RunConfig:
    """Resolve parameters from defaults, the config file and flags."""
    config_file = args.config or DEFAULT_CONFIG_PATH
    file_values = load_param_file(config_file) if config_file else {}
    overrides = {key: getattr(args, key) for _, key in PARAM_FLAGS}
    params = resolve_params(file_values, overrides)

    sources = ["defaults"]
    if config_file:
        sources.append(f"file:{config_file}")
    if any(value is not None for value in overrides.values()):
        sources.append("flags")
    payload = {
        key: value
        for key, value in vars(args).items()
        if key not in _NOT_PAYLOAD and key not in overrides
    }
    return RunConfig(
        command=args.command,
        params=params,
        config_file=config_file,
        payload=payload,
        stationary_tolerance=args.stationary_tol,
        wavepacket_tolerance=args.wavepacket_tol,
        sources=sources,
    )


def _renormalized_splitting(p: ModelParams) -> Optional[float]:
    try:
        return renormalized_splitting(p)
    except OutOfBandError:
        logger.debug("omega_A=%r lies outside the band; no renormalised splitting", p.omega_tls)
        return None


def cmd_point(args, run: RunConfig) -> int:
    """Evaluate the closed forms at one incident energy or wavenumber."""
    p = run.params
    port = Port(args.port)
    mode = _incident_mode(args, p.omega, p.xi)
    solution = scatter(p, mode, port)
    couplings = effective_couplings(p, mode)
    _print_record(
        {
            "config": run.as_dict(),
            "solution": solution.as_dict(),
            "couplings": couplings.as_dict(),
            "lamb_shift": couplings.lamb_shift,
            "gamma_a": couplings.gamma_a,
            "gamma_b": couplings.gamma_b,
            "total_decay": couplings.total_decay,
            "renormalized_splitting": _renormalized_splitting(p),
            "unitarity_residual": solution.unitarity_residual,
        }
    )
    return 0


def _custom_spec(args, params: ModelParams) -> SweepSpec:
    if args.lo is None or args.hi is None:
        raise InvalidParamsError("a custom sweep needs --lo and --hi (or use --figure)")
    variable = SweepVariable(args.variable)
    if args.quantities is None:
        quantities = None
    else:
        quantities = tuple(q.strip() for q in args.quantities.split(",") if q.strip())
    energy = None
    if variable is SweepVariable.ATOM_SPLITTING:
        params = params.with_omega_tls(None)
        energy = args.E
    return SweepSpec(
        variable=variable,
        lo=args.lo,
        hi=args.hi,
        n_points=args.n,
        port=Port(args.port),
        params=params,
        quantities=quantities,
        energy=energy,
    )


def cmd_sweep(args, run: RunConfig) -> int:
    """Tabulate a figure preset or a custom sweep and write it to ``--out``."""
    if args.figure:
        specs = figure_specs(args.figure)
        prefix = args.figure
        logger.info("figure %s uses its own parameters; parameter flags are ignored", prefix)
    else:
        specs = {"custom": _custom_spec(args, run.params)}
        prefix = "sweep"

    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoFailureError(f"cannot create output directory {out_dir}: {e}") from e

    files = []
    rows = {}
    all_unitary = True
    for label, spec in specs.items():
        table = run_sweep(spec).with_metadata(
            config=run.as_dict(), figure=args.figure, curve=label
        )
        rows[label] = table.n_rows
        for fmt in args.format:
            files.append(str(emit(table, fmt, out_dir / f"{prefix}_{label}.{Format(fmt).value}")))
        if not table.all_unitary:
            all_unitary = False
            logger.error("curve %s violates unitarity beyond tolerance", label)

    _print_record(
        {"config": run.as_dict(), "files": files, "rows": rows, "all_unitary": all_unitary}
    )
    return 0 if all_unitary else 3


def cmd_design(args, run: RunConfig) -> int:
    """Pick omega_A for a target energy and report the achievable transfer."""
    report = design_for_energy(run.params, args.E)
    record = {"config": run.as_dict(), "report": report.as_dict()}
    if args.out:
        emit_record(record, args.out)
    _print_record(record)
    return 0


def cmd_oracle(args, run: RunConfig) -> int:
    """Run a lattice oracle and compare it with the closed forms."""
    p = run.params
    port = Port(args.port)
    if port is Port.FROM_A:
        mode = _incident_mode(args, p.omega_a, p.xi_a)
    else:
        mode = _incident_mode(args, p.omega_b, p.xi_b)

    record: Dict[str, Any] = {"config": run.as_dict()}
    oracle: Any
    if args.method == "stationary":
        lat = LatticeModel(args.n_a or STATIONARY_LATTICE, args.n_b or STATIONARY_LATTICE, p)
        oracle = stationary_scatter(lat, port, mode.k)
        tolerance = run.stationary_tolerance
    else:
        lat = LatticeModel(args.n_a or WAVEPACKET_LATTICE, args.n_b or WAVEPACKET_LATTICE, p)
        if args.j0 is not None:
            j0 = args.j0
        else:
            j0 = -(lat.n_a // 2) if port is Port.FROM_A else lat.n_b // 2
        packet = WavePacketSpec(mode.k, args.sigma, j0, port)
        oracle = wavepacket_scatter(lat, packet, evolve_time=args.time)
        tolerance = run.wavepacket_tolerance
    record["oracle"] = oracle.as_dict()

    if p.closed_form_valid:
        report = compare(scatter(p, mode, port), oracle, tolerance)
        record["comparison"] = report.as_dict()
        passed = report.passed
    else:
        logger.warning("unequal arms: no closed form to compare against")
        if args.method == "stationary":
            passed = oracle.unitarity_residual <= (tolerance or 0.0)
        else:
            passed = True

    if args.out:
        emit_record(record, args.out)
    _print_record(record)
    if not passed:
        residue = getattr(oracle, "junction_probability", 0.0)
        if residue > JUNCTION_TOLERANCE:
            logger.error(
                "oracle check failed: %.3g of the packet is still at the junction; "
                "move --j0 further out or raise --time",
                residue,
            )
        else:
            logger.error("oracle check failed")
    return 0 if passed else 3


COMMANDS: Dict[str, Callable[[Any, RunConfig], int]] = {
    "point": cmd_point,
    "sweep": cmd_sweep,
    "design": cmd_design,
    "oracle": cmd_oracle,
}


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        default=None,
        help="TOML parameter file (default: $TSHAPE_CONFIG if set).",
    )
    for flag, key in PARAM_FLAGS:
        common.add_argument(flag, dest=key, type=float, default=None)
    common.add_argument(
        "--log-level",
        default=DEFAULT_LOG_LEVEL,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level for messages on stderr.",
    )
    common.add_argument("--stationary-tol", type=float, default=None)
    common.add_argument("--wavepacket-tol", type=float, default=None)
    return common


def _add_incidence(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--port", choices=["a", "b"], default="a", help="Incidence arm.")
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--E", type=float, default=None, help="Incident energy.")
    group.add_argument("--k", type=float, default=None, help="Incident wavenumber in (0, pi).")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Single-photon routing in a T-shaped waveguide coupled to a two-level system."
    )
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True)

    point = sub.add_parser("point", parents=[common], help="Closed-form amplitudes at one point.")
    _add_incidence(point)

    sweep = sub.add_parser("sweep", parents=[common], help="Tabulate and plot spectra.")
    sweep.add_argument("--figure", choices=FIGURES, default=None, help="Preset curve family.")
    sweep.add_argument("--variable", choices=["E", "omegaA"], default="E")
    sweep.add_argument("--lo", type=float, default=None)
    sweep.add_argument("--hi", type=float, default=None)
    sweep.add_argument("--n", type=int, default=2001, help="Grid points (default: 2001).")
    sweep.add_argument("--port", choices=["a", "b"], default="a")
    sweep.add_argument("--E", type=float, default=None, help="Fixed energy for omegaA sweeps.")
    sweep.add_argument(
        "--quantities",
        default=None,
        help="Comma-separated columns, e.g. T_aa,R_aa,T_ab (default: all for the port).",
    )
    sweep.add_argument("--out", default=".", help="Output directory.")
    sweep.add_argument(
        "--format",
        nargs="+",
        choices=[f.value for f in Format],
        default=["csv"],
    )

    design = sub.add_parser("design", parents=[common], help="Choose omega_A for a target energy.")
    design.add_argument("--E", type=float, required=True, help="Target incident energy.")
    design.add_argument("--out", default=None, help="Also write the report to this JSON file.")

    oracle = sub.add_parser("oracle", parents=[common], help="Check the closed forms on a lattice.")
    oracle.add_argument("--method", choices=["stationary", "wavepacket"], default="stationary")
    _add_incidence(oracle)
    oracle.add_argument("--n-a", type=int, default=None, help="Half-length of arm a.")
    oracle.add_argument("--n-b", type=int, default=None, help="Length of arm b.")
    oracle.add_argument("--sigma", type=float, default=40.0, help="Packet width in sites.")
    oracle.add_argument("--j0", type=int, default=None, help="Packet centre site.")
    oracle.add_argument("--time", type=float, default=None, help="Evolve time.")
    oracle.add_argument("--out", default=None, help="Also write the record to this JSON file.")
    return parser


def main():
    """Parses command-line arguments and runs the requested subcommand."""
    parser = build_parser()
    args = parser.parse_args()

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.captureWarnings(True)

    code: Optional[int]
    try:
        run = build_run_config(args)
        code = COMMANDS[args.command](args, run)
    except RouterError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
        return
    if code:
        sys.exit(code)


if __name__ == "__main__":
    main()
