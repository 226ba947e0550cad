import csv

import numpy as np
import pytest

from simbeam.__main__ import main
from simbeam.exceptions import ConfigurationError, OutputError
from simbeam.jobs import (emit_trace, execute_sweep, run_sweep, run_trial, run_validation,
                          solve_trial, summary_path_for)
from simbeam.models import RESULT_COLUMNS, SimConfig, SweepSpec, load_config


def read_rows(path):
    with open(path, newline='') as f:
        return list(csv.DictReader(f))


def without_wall_time(rows):
    return [{key: value for key, value in row.items() if key != 'wall_ms'} for row in rows]


@pytest.fixture
def sweep():
    return SweepSpec(axis='L', values=[1, 2], schemes=['ao', 'uniform', 'codebook'],
                     trials=2, codebook_size=8)


def test_run_trial_rows(config):
    rows = run_trial(config, 1, codebook_size=8)

    assert [row.scheme for row in rows] == ['ao', 'uniform', 'codebook']
    assert len({row.seed for row in rows}) == 1
    assert all(row.trial == 1 and row.sum_rate_bpshz >= 0 and row.wall_ms >= 0 for row in rows)
    assert rows[2].grad_steps == 0


def test_run_trial_is_deterministic(config):
    first = run_trial(config, 3, schemes=['ao', 'uniform'])
    again = run_trial(config, 3, schemes=['ao', 'uniform'])
    assert [r.csv_fields()[:-1] for r in first] == [r.csv_fields()[:-1] for r in again]


def test_run_sweep_writes_rows_and_summary(config, sweep, tmp_path):
    out = tmp_path / 'results' / 'layers.csv'
    summary = run_sweep(config, sweep, out)

    with open(out) as f:
        assert f.readline().strip() == ','.join(RESULT_COLUMNS)
    rows = read_rows(out)
    assert len(rows) == 2 * 2 * 3
    assert [(float(r['value']), int(r['trial'])) for r in rows[::3]] == \
        [(1.0, 0), (1.0, 1), (2.0, 0), (2.0, 1)]
    assert [r['scheme'] for r in rows[:3]] == ['ao', 'uniform', 'codebook']

    summary_rows = read_rows(summary_path_for(out))
    assert len(summary_rows) == len(summary) == 6
    for entry in summary:
        rates = [float(r['sum_rate_bpshz']) for r in rows
                 if float(r['value']) == entry.value and r['scheme'] == entry.scheme]
        assert entry.trials == 2
        assert entry.mean_sum_rate_bpshz == pytest.approx(np.mean(rates))
        assert entry.stderr_sum_rate_bpshz == pytest.approx(np.std(rates, ddof=1) / np.sqrt(2))


def test_sweep_is_reproducible_and_parallel_safe(config, sweep, tmp_path):
    sequential = run_sweep(config, sweep, tmp_path / 'a.csv')
    repeated = run_sweep(config, sweep, tmp_path / 'b.csv')
    parallel = run_sweep(config, sweep, tmp_path / 'c.csv', jobs=2)

    a, b, c = (without_wall_time(read_rows(tmp_path / name)) for name in ('a.csv', 'b.csv', 'c.csv'))
    assert a == b == c
    assert sequential == repeated == parallel


def test_user_sweep_sets_antennas(config, tmp_path):
    rows = execute_sweep(config, SweepSpec(axis='K', values=[1, 3], schemes=['uniform'], trials=1))
    assert [row.value for row in rows] == [1.0, 3.0]


def test_unwritable_output_fails_before_computing(config, sweep, tmp_path):
    blocker = tmp_path / 'file'
    blocker.write_text('')
    with pytest.raises(OutputError):
        run_sweep(config, sweep, blocker / 'out.csv')


def test_jobs_must_be_positive(config, sweep, tmp_path):
    with pytest.raises(ConfigurationError):
        run_sweep(config, sweep, tmp_path / 'out.csv', jobs=0)


@pytest.mark.parametrize('outer', [False, True])
def test_emit_trace(config, tmp_path, outer):
    result, _ = solve_trial(config, 0, schemes=['ao'])['ao']
    path = emit_trace(result, tmp_path / 'trace.csv', outer=outer)

    rows = read_rows(path)
    expected = result.trace.outer_rates if outer else result.trace.sum_rates
    assert list(rows[0]) == ['iter', 'sum_rate_bpshz']
    assert [int(r['iter']) for r in rows] == list(range(1, len(expected) + 1))
    values = [float(r['sum_rate_bpshz']) for r in rows]
    assert values == expected
    assert np.all(np.diff(values) >= -1e-9)


def test_validation_suite_passes(config):
    results = run_validation(config, instances=3)
    failed = [(r.name, r.detail) for r in results if not r.passed]
    assert not failed


def test_validation_rejects_unknown_checks(config):
    with pytest.raises(ConfigurationError):
        run_validation(config, checks=['nonsense'])


def test_cli_defaults(tmp_path):
    path = tmp_path / 'simbeam.yml'
    assert main(['--log-dir', '', 'defaults', '--out', str(path)]) == 0
    assert load_config(path) == SimConfig()


def test_cli_sweep(config, tmp_path):
    config_path = config.write(tmp_path / 'small.yml')
    out = tmp_path / 'power.csv'

    code = main(['--log-dir', str(tmp_path / 'logs'), 'sweep', '--config', str(config_path),
                 '--axis', 'PT', '--values', '0,10', '--schemes', 'uniform,ao',
                 '--trials', '1', '--seed', '5', '--out', str(out)])

    assert code == 0
    rows = read_rows(out)
    assert [(r['value'], r['scheme']) for r in rows] == [('0', 'ao'), ('0', 'uniform'),
                                                        ('10', 'ao'), ('10', 'uniform')]
    assert summary_path_for(out).exists()


def test_cli_trace(config, tmp_path):
    config_path = config.write(tmp_path / 'small.yml')
    out = tmp_path / 'trace.csv'
    code = main(['--log-dir', '', 'trace', '--config', str(config_path), '--scheme', 'uniform',
                 '--out', str(out)])
    assert code == 0 and len(read_rows(out)) >= 1


def test_cli_reports_errors(tmp_path):
    assert main(['--log-dir', '', 'sweep', '--config', str(tmp_path / 'absent.yml')]) == 1
    assert main(['--log-dir', '', 'sweep', '--axis', 'L', '--values', 'a,b']) == 1
    assert main(['--log-dir', '', 'validate', '--checks', 'budget,water_filling',
                 '--instances', '2']) == 0
