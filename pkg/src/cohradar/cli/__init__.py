"""Command-line front end."""

import argparse
from pathlib import Path
from typing import Callable, Optional

from pydantic import ValidationError

from ..core.config import get_settings
from ..models import RECEIVER_MODES
from .commands import (
    cmd_analyze,
    cmd_montecarlo,
    cmd_plan,
    cmd_spectrum,
    cmd_sweep,
    cmd_velocity,
)
from .io import load_scenario, validation_error
from .schemas import ScenarioConfig

Handler = Callable[[argparse.Namespace], None]


def _scenario(args: argparse.Namespace) -> ScenarioConfig:
    config = load_scenario(args.config)
    try:
        return config.with_overrides(
            seed=args.seed, mode=args.mode, trials=args.trials
        )
    except ValidationError as exc:
        raise validation_error(exc, "command line") from exc


def _out_dir(
    args: argparse.Namespace, config: Optional[ScenarioConfig] = None
) -> Path:
    if args.out is not None:
        return Path(args.out)
    if config is not None and config.out_dir is not None:
        return Path(config.out_dir)
    return Path(get_settings().output_dir)


def _run_sweep(args: argparse.Namespace) -> None:
    config = _scenario(args)
    cmd_sweep(config, _out_dir(args, config))


def _run_montecarlo(args: argparse.Namespace) -> None:
    config = _scenario(args)
    cmd_montecarlo(config, _out_dir(args, config))


def _run_analyze(args: argparse.Namespace) -> None:
    config = _scenario(args) if args.config else None
    k = args.k if args.k is not None else (config.k if config else None)
    offset = args.delay_offset_m
    if offset is None:
        offset = config.delay_offset_m if config else 0.0
    baseline = not args.no_baseline and (config.baseline if config else True)
    continuous = True if args.continuous else (config.continuous if config else None)
    cmd_analyze(
        [Path(p) for p in args.inputs],
        _out_dir(args, config),
        k=k,
        delay_offset=offset,
        baseline=baseline,
        continuous=continuous,
    )


def _run_plan(args: argparse.Namespace) -> None:
    config = _scenario(args)
    cmd_plan(config, _out_dir(args, config), separation_m=args.separation_m)


def _run_spectrum(args: argparse.Namespace) -> None:
    config = _scenario(args)
    cmd_spectrum(config, _out_dir(args, config), fs=args.fs_hz)


def _run_velocity(args: argparse.Namespace) -> None:
    config = _scenario(args)
    cmd_velocity(config, _out_dir(args, config))


def _common(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    parser.add_argument(
        "--config",
        required=config_required,
        help="scenario JSON file or built-in scenario name",
    )
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="override phase and noise seeds")
    parser.add_argument("--mode", choices=RECEIVER_MODES, help="receiver mode")
    parser.add_argument("--trials", type=int, help="override the trial count")
    parser.add_argument("--quiet", action="store_true", help="log warnings only")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per command."""
    parser = argparse.ArgumentParser(
        prog=get_settings().project_name,
        description="Partially coherent radar simulation and range estimation",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sweep = commands.add_parser("sweep", help="run one coherence sweep")
    _common(sweep)
    sweep.set_defaults(handler=_run_sweep)

    montecarlo = commands.add_parser("montecarlo", help="repeated sweeps vs theory")
    _common(montecarlo)
    montecarlo.set_defaults(handler=_run_montecarlo)

    analyze = commands.add_parser("analyze", help="breakpoint range estimation")
    _common(analyze, config_required=False)
    analyze.add_argument("inputs", nargs="+", help="sweep.csv or trials.csv files")
    analyze.add_argument("--k", type=int, help="number of targets; default detects")
    analyze.add_argument(
        "--delay-offset-m", type=float, help="cable and component round-trip [m]"
    )
    analyze.add_argument(
        "--no-baseline",
        action="store_true",
        help="pin the first segment to zero instead of fitting a free line",
    )
    analyze.add_argument(
        "--continuous",
        action="store_true",
        help="refine breaks with a continuous hinge fit",
    )
    analyze.set_defaults(handler=_run_analyze)

    plan = commands.add_parser("plan", help="sweep time and bandwidth figures")
    _common(plan)
    plan.add_argument(
        "--separation-m", type=float, help="target separation for the resolution ratio"
    )
    plan.set_defaults(handler=_run_plan)

    spectrum = commands.add_parser("spectrum", help="transmit spectrum null widths")
    _common(spectrum)
    spectrum.add_argument("--fs-hz", type=float, help="sampling rate [Hz]")
    spectrum.set_defaults(handler=_run_spectrum)

    velocity = commands.add_parser(
        "velocity", help="Doppler speed and moving-target fit of one sweep"
    )
    _common(velocity)
    velocity.set_defaults(handler=_run_velocity)

    return parser


__all__ = ["build_parser"]
