"""
Monte Carlo sweeps over one experiment axis, with CSV output.
"""
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence
import csv

from loguru import logger
import numpy as np

from ..exceptions import ConfigurationError, OutputError
from ..models.config import SimConfig, SweepSpec, SCHEMES
from ..models.extensions import ExtendedBaseModel
from ..models.results import ResultRow, SolveResult, RESULT_COLUMNS
from .trial import run_trial

SUMMARY_COLUMNS = ('axis', 'value', 'scheme', 'trials', 'mean_sum_rate_bpshz',
                   'stderr_sum_rate_bpshz', 'mean_outer_iters', 'mean_grad_steps')
TRACE_COLUMNS = ('iter', 'sum_rate_bpshz')


class SummaryRow(ExtendedBaseModel):
    axis: str
    value: float
    scheme: str
    trials: int
    mean_sum_rate_bpshz: float
    stderr_sum_rate_bpshz: float
    mean_outer_iters: float
    mean_grad_steps: float

    def csv_fields(self) -> List[str]:
        return [self.axis, f"{self.value:g}", self.scheme, str(self.trials),
                repr(self.mean_sum_rate_bpshz), repr(self.stderr_sum_rate_bpshz),
                repr(self.mean_outer_iters), repr(self.mean_grad_steps)]


def summary_path_for(output_path) -> Path:
    output_path = Path(output_path)
    return output_path.with_name(f"{output_path.stem}_summary.csv")


def ensure_writable(path) -> Path:
    """Fail before any computation when `path` cannot be written"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'a'):
            pass
    except OSError as exc:
        raise OutputError(f"cannot write to {path}: {exc.strerror or exc}") from None
    return path


def _row_order(row: ResultRow):
    return (row.trial, SCHEMES.index(row.scheme))


def _sweep_unit(args) -> List[ResultRow]:
    config, trial, schemes, axis, value, codebook_size = args
    return run_trial(config, trial, schemes, axis=axis, value=value,
                     codebook_size=codebook_size)


def execute_sweep(config: SimConfig, sweep: SweepSpec, jobs: int = 1) -> List[ResultRow]:
    """
    Run every (value, trial) unit and return the rows sorted by
    (axis value order, trial, scheme), independent of execution order.
    """
    units = []
    for value in sweep.values:
        value_config = config.with_axis(sweep.axis, value)
        for trial in range(sweep.trials):
            units.append((value_config, trial, tuple(sweep.schemes), sweep.axis, value,
                          sweep.codebook_size))

    logger.info(f"Sweeping {sweep.axis} over {sweep.values}: {len(units)} trials, "
                f"schemes {sweep.schemes}, {jobs} job(s)")

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(_sweep_unit, units))
    else:
        batches = [_sweep_unit(unit) for unit in units]

    rows = []
    for index, value in enumerate(sweep.values):
        value_rows = [row for batch in batches[index * sweep.trials:(index + 1) * sweep.trials]
                      for row in batch]
        rows.extend(sorted(value_rows, key=_row_order))
    return rows


def summarize(rows: Sequence[ResultRow], sweep: SweepSpec) -> List[SummaryRow]:
    """Mean and standard error of the sum rate per (axis value, scheme)"""
    summary = []
    for value in sweep.values:
        for scheme in sweep.schemes:
            group = sorted((r for r in rows if r.value == value and r.scheme == scheme),
                           key=_row_order)
            if not group:
                continue
            rates = np.array([r.sum_rate_bpshz for r in group])
            stderr = rates.std(ddof=1) / np.sqrt(rates.size) if rates.size > 1 else 0.0
            summary.append(SummaryRow(axis=sweep.axis, value=value, scheme=scheme,
                                      trials=rates.size,
                                      mean_sum_rate_bpshz=float(rates.mean()),
                                      stderr_sum_rate_bpshz=float(stderr),
                                      mean_outer_iters=float(np.mean([r.outer_iters for r in group])),
                                      mean_grad_steps=float(np.mean([r.grad_steps for r in group]))))
    return summary


def write_csv(path, header: Sequence[str], records) -> Path:
    path = Path(path)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for record in records:
            writer.writerow(record)
    return path


def run_sweep(config: SimConfig, sweep: SweepSpec, output_path,
              jobs: int = 1, summary_path: Optional[Path] = None) -> List[SummaryRow]:
    """
    Run `sweep.trials` trials for every axis value, write all rows to
    `output_path` and the per-value means to the summary file.
    """
    if jobs < 1:
        raise ConfigurationError(f"--jobs must be >= 1, got {jobs}")
    output_path = ensure_writable(output_path)
    summary_path = ensure_writable(summary_path or summary_path_for(output_path))

    rows = execute_sweep(config, sweep, jobs=jobs)
    write_csv(output_path, RESULT_COLUMNS, (row.csv_fields() for row in rows))

    summary = summarize(rows, sweep)
    write_csv(summary_path, SUMMARY_COLUMNS, (row.csv_fields() for row in summary))
    logger.info(f"Wrote {len(rows)} rows to {output_path} and summary to {summary_path}")
    return summary


def emit_trace(result: SolveResult, path, outer: bool = False) -> Path:
    """
    Write the iteration-indexed sum rate of a solve, one row per solver
    step (or per alternating round with `outer`)
    """
    path = ensure_writable(path)
    rates = result.trace.outer_rates if outer else result.trace.sum_rates
    return write_csv(path, TRACE_COLUMNS,
                     ([str(i), repr(float(r))] for i, r in enumerate(rates, start=1)))
