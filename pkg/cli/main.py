"""
Command-line entry point for SchurScope.
"""
import argparse
import json
import sys
from typing import Any, Dict, List, Optional

import yaml
from loguru import logger
from pydantic import ValidationError

from config.settings import settings
from models.reports import RunConfig, Tolerances
from models.sources import SourceSpec
from orchestration import get_pipeline_manager
from services import get_export_service
from utils.exceptions import IngestionError
from utils.families import GAMMA_FAMILIES

# Exit code for bad flags, unreadable run files and invalid configuration.
EXIT_BAD_INPUT = 3


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    """Send logs to stderr and, when a log file is configured, to a rotating file."""
    level = level or settings.log_level
    log_file = settings.log_file if log_file is None else log_file
    logger.remove()
    logger.add(
        sys.stderr,
        level=level,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>"
    )
    if log_file:
        logger.add(
            log_file,
            rotation="50 MB",
            retention="10 days",
            level=level,
            format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function} - {message}"
        )


def _sizes(text: str) -> List[int]:
    try:
        return [int(part) for part in text.replace(" ", "").split(",") if part]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"--sizes expects comma-separated integers: {e}")


def _floats(text: str) -> List[float]:
    try:
        return [float(part) for part in text.replace(" ", "").split(",") if part]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {e}")


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    run = common.add_argument_group("run options")
    run.add_argument("--order", type=int, help="Truncation order N")
    run.add_argument("--grid", type=int, help="Quadrature grid size (>= 8 * order)")
    run.add_argument("--tol", type=float, help="Consistency tolerance between gamma routes")
    run.add_argument("--sizes", type=_sizes, help="Sweep sizes, e.g. 4,8,16,32")
    run.add_argument("--format", dest="output_format", choices=["json", "csv"])
    run.add_argument("--out", help="Output directory")
    run.add_argument("--seed", type=int, help="Seed for random campaigns")
    run.add_argument("--workers", type=int, help="Threads for sweeps and campaigns")
    run.add_argument("--config", help="YAML run file with RunConfig fields")
    run.add_argument("--log-level", help="Log level (DEBUG, INFO, WARNING, ...)")

    source = common.add_argument_group("input source")
    source.add_argument("--weight", help="constant, cosine, zero, zero-squared or a CSV file")
    source.add_argument("--cos-coeffs", type=_floats, help="Coefficients of the cosine weight")
    source.add_argument("--power", type=float, help="Exponent p of the zero weight")
    source.add_argument("--moments", help="Moments as JSON text or a JSON file")
    source.add_argument("--theta", help="Schur coefficients as JSON text or a JSON file")
    source.add_argument("--gamma-file", help="Schur parameter JSON file")
    source.add_argument("--gamma-family", choices=list(GAMMA_FAMILIES))
    source.add_argument("--family-param", type=float, help="q, amplitude or c of the family")
    source.add_argument("--spike-index", type=int, default=1, help="Index of the spike entry")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per workflow."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="schurscope",
        description="Schur parameters, finite-section matrices and Helson-Szegő diagnostics"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("gamma", parents=[common], help="Schur parameters of a measure")
    commands.add_parser("theta", parents=[common], help="theta, Phi and moments from parameters")

    lmatrix = commands.add_parser("lmatrix", parents=[common], help="Dump L_n or M_n")
    lmatrix.add_argument("--n", type=int, default=4, help="Matrix size")
    lmatrix.add_argument("--which", choices=["L", "M"], default="L")

    verify = commands.add_parser("verify", parents=[common], help="Randomized identity campaign")
    verify.add_argument("--trials", type=int, default=100, help="Random sequences per check")
    verify.add_argument("--n", type=int, default=8, help="Matrix size")

    commands.add_parser("diagnose", parents=[common], help="Helson-Szegő diagnosis")
    commands.add_parser("riesz", parents=[common], help="Moment-side projection sweeps")
    return parser


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """
    RunConfig from settings, an optional YAML run file and the flags.

    Flags override the file; the file overrides settings.
    """
    values: Dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                values = yaml.safe_load(handle) or {}
        except (OSError, yaml.YAMLError) as e:
            raise IngestionError(f"Cannot read run file {args.config}: {e}") from e
        if not isinstance(values, dict):
            raise IngestionError(f"Run file {args.config} must hold a mapping")

    flags = {
        "order": args.order,
        "grid": args.grid,
        "sweep_sizes": args.sizes,
        "output_format": args.output_format,
        "out": args.out,
        "seed": args.seed,
        "workers": args.workers,
    }
    values.update({k: v for k, v in flags.items() if v is not None})

    tolerances = dict(values.pop("tolerances", None) or {})
    if args.tol is not None:
        tolerances["tol_quadruple"] = args.tol
    values["tolerances"] = Tolerances(**tolerances)

    # Grid follows the order unless given explicitly.
    if "grid" not in values and "order" in values:
        values["grid"] = max(settings.default_grid, 8 * int(values["order"]))
    return RunConfig(**values)


def apply_tolerances(config: RunConfig) -> None:
    """Push the run's tolerances onto the shared settings."""
    for name, value in config.tolerances.model_dump().items():
        setattr(settings, name, value)
    logger.debug(f"Tolerances in effect: {config.tolerances.model_dump()}")


def source_from_args(args: argparse.Namespace) -> SourceSpec:
    """Source flags as a SourceSpec."""
    return SourceSpec(
        weight=args.weight,
        cos_coeffs=args.cos_coeffs,
        power=args.power,
        moments=args.moments,
        theta=args.theta,
        gamma_file=args.gamma_file,
        gamma_family=args.gamma_family,
        family_param=args.family_param,
        spike_index=args.spike_index
    )


def _finish(results: Dict[str, Any]) -> int:
    if results["status"] == "completed":
        print(get_export_service().render_json(results["output"]))
    else:
        for error in results["errors"]:
            print(f"error: {error}", file=sys.stderr)
    return results["exit_code"]


def cmd_gamma(args: argparse.Namespace, config: RunConfig) -> int:
    """Compute Schur parameters and print them as JSON."""
    return _finish(get_pipeline_manager().execute_gamma_workflow(source_from_args(args), config))


def cmd_theta(args: argparse.Namespace, config: RunConfig) -> int:
    """Rebuild theta, Phi and moments from Schur parameters."""
    return _finish(get_pipeline_manager().execute_theta_workflow(source_from_args(args), config))


def cmd_lmatrix(args: argparse.Namespace, config: RunConfig) -> int:
    """Dump L_n or M_n."""
    return _finish(get_pipeline_manager().execute_lmatrix_workflow(
        source_from_args(args), config, n=args.n, which=args.which
    ))


def cmd_verify(args: argparse.Namespace, config: RunConfig) -> int:
    """
    Run the identity campaign and print the largest residual per identity.

    Returns:
        0 when every residual is within tol_identity, 1 otherwise
    """
    results = get_pipeline_manager().execute_verify_workflow(config, trials=args.trials, n=args.n)
    if results["status"] == "completed":
        output = results["output"]
        for name, value in sorted(output["max_residuals"].items()):
            flag = "FAIL" if name in output["failures"] else "ok"
            print(f"{name:<26} {value:.3e}  {flag}")
        print(f"{'passes' if output['passes'] else 'FAILED'} "
              f"({output['trials']} trials, n={output['n']}, seed={output['seed']})")
        return results["exit_code"]
    return _finish(results)


def cmd_diagnose(args: argparse.Namespace, config: RunConfig) -> int:
    """
    Diagnose the Helson-Szegő property.

    Returns:
        0 for certified_hs or likely_hs, 1 for likely_not_hs or
        not_hs_necessary_violation, 2 for inconclusive, > 2 on errors
    """
    results = get_pipeline_manager().execute_diagnose_workflow(source_from_args(args), config)
    if results["status"] == "completed":
        report = results["output"]
        print(json.dumps({
            "verdict": report["verdict"],
            "sigma_inf": report["sigma_inf"],
            "c_bound": (report["strong_szego"] or {}).get("c_bound"),
            "notes": report["notes"],
            "files": results["files"]
        }, indent=2, sort_keys=True))
        return results["exit_code"]
    return _finish(results)


def cmd_riesz(args: argparse.Namespace, config: RunConfig) -> int:
    """Riesz, conjugation and oblique projection sweeps."""
    return _finish(get_pipeline_manager().execute_riesz_workflow(source_from_args(args), config))


COMMANDS = {
    "gamma": cmd_gamma,
    "theta": cmd_theta,
    "lmatrix": cmd_lmatrix,
    "verify": cmd_verify,
    "diagnose": cmd_diagnose,
    "riesz": cmd_riesz,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse flags, run one workflow and return its exit code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    logger.info(f"{settings.app_name} {settings.app_version}: {args.command}")

    try:
        config = load_run_config(args)
    except (IngestionError, ValidationError) as e:
        logger.error(f"Invalid run configuration: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT

    apply_tolerances(config)
    return COMMANDS[args.command](args, config)


if __name__ == "__main__":
    sys.exit(main())
