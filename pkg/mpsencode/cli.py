"""
Command-line entry: encode, circuit, validate and reproduce.
Run from project root: python -m mpsencode <command> ...
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Union, get_args

from pydantic import ValidationError

from .config import RunConfig, get_settings
from .errors import ConfigError, MpsEncodeError
from .funcspace import DistributionKind
from .logging_config import configure_logging
from .models import ReproduceTarget
from .pipeline import cmd_circuit, cmd_encode, cmd_reproduce, cmd_validate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2

RUN_CONFIG_FILE = "run_config.json"

# CLI flag -> (RunConfig section, field); section None means top level.
_FLAG_FIELDS = {
    "kind": ("distribution", "kind"),
    "mu": ("distribution", "mu"),
    "scale": ("distribution", "scale"),
    "shape": ("distribution", "shape"),
    "L": ("distribution", "L"),
    "n_qubits": ("distribution", "n_qubits"),
    "builder": (None, "builder"),
    "chi_max": (None, "chi_max"),
    "eps_svd": (None, "eps_svd"),
    "tci_max_rank": ("tci", "max_rank"),
    "tci_tol": ("tci", "tol"),
    "tci_seed": ("tci", "seed"),
    "n_layers": (None, "n_layers"),
    "origin": (None, "origin_policy"),
    "eps_trunc": (None, "eps_trunc"),
    "chi_sim": (None, "chi_sim"),
    "u_lambda_budget": (None, "u_lambda_budget"),
    "shots": (None, "shots"),
    "ks_samples": (None, "ks_samples"),
    "seed": (None, "seed"),
    "output_dir": (None, "output_dir"),
}


def _origin(value: str) -> Union[str, int]:
    if value == "scan":
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"origin must be 'scan' or a bond index, got {value!r}")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="run config JSON; flags override its fields")
    dist = parser.add_argument_group("distribution")
    dist.add_argument("--kind", choices=[k.value for k in DistributionKind])
    dist.add_argument("--mu", type=float)
    dist.add_argument("--scale", type=float, help="sigma, c or theta depending on --kind")
    dist.add_argument("--shape", type=float, help="Gamma shape k")
    dist.add_argument("--L", dest="L", type=float, help="support length")
    dist.add_argument("--n-qubits", type=int)
    enc = parser.add_argument_group("encoding")
    enc.add_argument("--builder", choices=["svd", "tci"])
    enc.add_argument("--chi-max", type=int)
    enc.add_argument("--eps-svd", type=float)
    enc.add_argument("--tci-max-rank", type=int)
    enc.add_argument("--tci-tol", type=float)
    enc.add_argument("--tci-seed", type=int, help="seed for TCI pivot and error sampling")
    circ = parser.add_argument_group("circuit")
    circ.add_argument("--n-layers", type=int)
    circ.add_argument("--origin", type=_origin, help="'scan' or a fixed bond index")
    circ.add_argument("--eps-trunc", type=float)
    circ.add_argument("--chi-sim", type=int)
    circ.add_argument("--u-lambda-budget", type=int)
    val = parser.add_argument_group("validation")
    val.add_argument("--shots", type=int)
    val.add_argument("--ks-samples", type=int)
    val.add_argument("--seed", type=int)
    parser.add_argument("--output-dir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpsencode", description="Shallow MPS encoding circuits for smooth distributions")
    parser.add_argument("--log-level", default=None, help="overrides MPSENCODE_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("encode", "build the MPS and write its entanglement profile"),
        ("circuit", "compile the MPS into an encoding circuit"),
        ("validate", "simulate, sample and score the circuit"),
    ):
        _add_run_flags(sub.add_parser(name, help=help_text))
    rep = sub.add_parser("reproduce", help="run a reproduction sweep with pass/fail checks")
    rep.add_argument("target", choices=list(get_args(ReproduceTarget)))
    rep.add_argument("--quick", action="store_true", help="fewer sweep points and repetitions")
    rep.add_argument("--workers", type=int)
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--output-dir")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file (if any) overlaid with the flags that were given."""
    overrides: Dict[str, Any] = {}
    for flag, (section, name) in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if section is None:
            overrides[name] = value
        else:
            overrides.setdefault(section, {})[name] = value

    if args.config is not None:
        raw = RunConfig.from_file(args.config).model_dump()
        for key, value in overrides.items():
            if isinstance(value, dict):
                raw[key] = {**raw.get(key, {}), **value}
            else:
                raw[key] = value
        try:
            return RunConfig.model_validate(raw)
        except ValidationError as e:
            raise ConfigError(str(e)) from e

    if "kind" not in overrides.get("distribution", {}):
        raise ConfigError("either --config or --kind is required")
    return RunConfig.from_env_defaults(**overrides)


def _run(args: argparse.Namespace) -> int:
    if args.command == "reproduce":
        bundle = cmd_reproduce(args.target, quick=args.quick, output_dir=args.output_dir, workers=args.workers, seed=args.seed)
        return EXIT_OK if bundle.passed else EXIT_FAILED

    cfg = resolve_config(args)
    cfg.to_file(Path(cfg.output_dir) / RUN_CONFIG_FILE)
    if args.command == "encode":
        cmd_encode(cfg)
        return EXIT_OK
    if args.command == "circuit":
        cmd_circuit(cfg)
        return EXIT_OK
    outcome = cmd_validate(cfg)
    return EXIT_OK if outcome.passed else EXIT_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    """CLI entry: 0 on success, 2 on a failed validation or reproduction, 1 on error."""
    args = build_parser().parse_args(argv)
    settings = get_settings()
    configure_logging(
        log_level=args.log_level or settings.log_level,
        log_dir=settings.log_dir,
        app_insights_connection_string=settings.applicationinsights_connection_string,
    )
    try:
        return _run(args)
    except MpsEncodeError as e:
        logger.error("%s failed: %s", args.command, e, extra={"command": args.command, "error": type(e).__name__})
        return EXIT_ERROR
    except Exception as e:
        logger.exception("%s crashed", args.command, extra={"command": args.command, "error": type(e).__name__})
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
