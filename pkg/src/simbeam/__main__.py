"""
Command line entry point:

    simbeam sweep --axis L --values 1,2,3 --trials 20 --out results/layers.csv
    simbeam trace --seed 3 --out results/trace.csv
    simbeam validate
    simbeam defaults --out simbeam.yml
"""
from pathlib import Path
from typing import List, Optional
import argparse
import sys

from loguru import logger
from pydantic import ValidationError
from rich import print
from rich.markup import escape

from .exceptions import SimbeamError, ConfigurationError
from .jobs import run_sweep, emit_trace, solve_trial, run_validation, small_config
from .jobs.sweep import SUMMARY_COLUMNS
from .lib.table import display
from .models import SimConfig, SweepSpec, load_config, SCHEMES

LOG_FORMAT = "{time} {level} {message}"


def configure_logging(level: str = 'INFO', log_dir: Optional[str] = 'logs'):
    logger.remove()
    logger.add(sys.stderr, format=LOG_FORMAT, level=level.upper())
    if log_dir:
        logger.add(str(Path(log_dir) / 'simbeam_{time:YYYY-MM-DD}.log'),
                   format=LOG_FORMAT,
                   level='WARNING')


def parse_list(text: Optional[str], cast=str) -> Optional[List]:
    if text is None:
        return None
    try:
        return [cast(x.strip()) for x in text.split(',') if x.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse list '{text}'") from None


def with_seed(config: SimConfig, seed: Optional[int]) -> SimConfig:
    if seed is None:
        return config
    data = config.dict()
    data['system']['base_seed'] = seed
    return SimConfig.parse(data)


def resolve_sweep(config: SimConfig, args) -> SweepSpec:
    """
    Sweep section of the config file with command line overrides on top.
    The trial count falls back to `system.trial_count`.
    """
    data = config.sweep.dict(exclude_unset=True) if config.sweep is not None else {}
    overrides = dict(axis=args.axis,
                     values=parse_list(args.values, float),
                     schemes=parse_list(args.schemes),
                     trials=args.trials,
                     codebook_size=args.codebook_size)
    data.update({key: value for key, value in overrides.items() if value is not None})
    data.setdefault('trials', config.system.trial_count)
    try:
        return SweepSpec(**data)
    except ValidationError as exc:
        raise ConfigurationError.from_validation(exc, prefix='sweep') from None


def cmd_sweep(args) -> int:
    config = with_seed(load_config(args.config), args.seed)
    sweep = resolve_sweep(config, args)
    out = Path(args.out or f"results/sweep_{sweep.axis}.csv")

    summary = run_sweep(config, sweep, out, jobs=args.jobs)

    display(list(SUMMARY_COLUMNS), [[getattr(row, col) for col in SUMMARY_COLUMNS]
                                    for row in summary],
            caption=f"{sweep.trials} trials per value, base seed {config.system.base_seed}")
    print(f":floppy_disk: [chartreuse2]Wrote results to {out}[/chartreuse2]")
    return 0


def cmd_trace(args) -> int:
    config = with_seed(load_config(args.config), args.seed)
    result, wall_ms = solve_trial(config, args.trial, schemes=[args.scheme])[args.scheme]
    out = Path(args.out or f"results/trace_{args.scheme}_seed{config.system.base_seed}.csv")

    emit_trace(result, out, outer=args.outer)
    trace = result.trace
    print(f":chart_with_upwards_trend: [chartreuse2]{args.scheme}[/chartreuse2] "
          f"R = {trace.initial_rate:.4f} -> {result.sum_rate:.4f} bits/s/Hz, "
          f"{trace.outer_iterations} outer rounds, {trace.gradient_steps} gradient steps, "
          f"status {result.status} ({wall_ms:.0f} ms)")
    print(f":floppy_disk: [chartreuse2]Wrote trace to {out}[/chartreuse2]")
    return 0


def cmd_validate(args) -> int:
    config = load_config(args.config) if args.config else small_config()
    results = run_validation(config, instances=args.instances,
                             checks=parse_list(args.checks))

    display(['check', 'result', 'detail', 'seconds'],
            [[r.name, '[green]ok[/green]' if r.passed else '[red]FAILED[/red]', escape(r.detail), r.seconds]
             for r in results],
            title=':mag: Property checks', numeric_format='{:.2f}')
    return 0 if all(r.passed for r in results) else 1


def cmd_defaults(args) -> int:
    path = SimConfig().write(args.out)
    print(f":floppy_disk: [chartreuse2]Wrote default configuration to {path}[/chartreuse2]")
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='simbeam',
                                     description="Stacked intelligent metasurface multiuser "
                                                 "beamforming simulator")
    parser.add_argument('--log-level', default='INFO', help='stderr log level')
    parser.add_argument('--log-dir', default='logs', help='directory of the daily log file')
    commands = parser.add_subparsers(dest='command', required=True)

    sweep = commands.add_parser('sweep', help='Monte Carlo sweep over one parameter')
    sweep.add_argument('--config', help='YAML configuration file')
    sweep.add_argument('--axis', choices=['L', 'K', 'PT', 'N'])
    sweep.add_argument('--values', help='comma separated axis values')
    sweep.add_argument('--schemes', help=f"comma separated subset of {','.join(SCHEMES)}")
    sweep.add_argument('--trials', type=int, help='channel realizations per value')
    sweep.add_argument('--seed', type=int, help='base seed')
    sweep.add_argument('--codebook-size', type=int, help='codebook candidates, 10*L*N by default')
    sweep.add_argument('--out', help='results CSV path')
    sweep.add_argument('--jobs', type=int, default=1, help='worker processes')
    sweep.set_defaults(func=cmd_sweep)

    trace = commands.add_parser('trace', help='single solve with its convergence trace')
    trace.add_argument('--config', help='YAML configuration file')
    trace.add_argument('--seed', type=int, help='base seed')
    trace.add_argument('--trial', type=int, default=0, help='trial index below the base seed')
    trace.add_argument('--scheme', choices=list(SCHEMES), default='ao')
    trace.add_argument('--outer', action='store_true', help='one row per alternating round')
    trace.add_argument('--out', help='trace CSV path')
    trace.set_defaults(func=cmd_trace)

    validate = commands.add_parser('validate', help='run the property suite')
    validate.add_argument('--config', help='YAML configuration file, a 16 meta-atom setup by default')
    validate.add_argument('--instances', type=int, default=10, help='random instances per check')
    validate.add_argument('--checks', help='comma separated subset of the checks')
    validate.set_defaults(func=cmd_validate)

    defaults = commands.add_parser('defaults', help='write the default configuration')
    defaults.add_argument('--out', default='simbeam.yml')
    defaults.set_defaults(func=cmd_defaults)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_arg_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_dir)
    try:
        return args.func(args)
    except SimbeamError as exc:
        print(f":warning: [red]{escape(str(exc))}[/red]")
        return 1


if __name__ == '__main__':
    sys.exit(main())
