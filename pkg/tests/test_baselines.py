import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from simbeam.baselines import CodebookSpec, codebook_scheme, uniform_power_scheme
from simbeam.channel.sampling import STREAM_CODEBOOK, stream
from simbeam.jobs import solve_trial
from simbeam.metrics import effective_gains, sinr, sum_rate
from simbeam.optimize import alternating_optimize, damped_power_iteration, initial_phases
from simbeam.sim import PhaseState, compose_beamformer


def test_uniform_power_scheme(instance, config):
    stack, channels = instance
    result = uniform_power_scheme(stack, channels, config)

    assert result.scheme == 'uniform'
    assert np.allclose(result.power.p, config.transmit_power_mw / 2)
    assert result.trace.is_monotone()
    assert result.trace.outer_iterations == len(result.trace.gradient_steps_per_round)
    assert result.status in ('converged', 'stalled')
    assert result.sum_rate == pytest.approx(result.trace.final_rate)


def test_codebook_keeps_the_best_candidate(instance, config):
    stack, channels = instance
    result = codebook_scheme(stack, channels, config, CodebookSpec(size=25))
    trace = result.trace

    assert result.scheme == 'codebook'
    assert trace.iterations == 25
    assert trace.is_monotone(0.0)
    assert result.sum_rate == pytest.approx(max(trace.sum_rates))
    assert result.power.total == pytest.approx(config.transmit_power_mw, abs=1e-9)
    assert trace.gradient_steps == 0


def test_codebook_is_seeded(instance, config):
    stack, channels = instance
    first = codebook_scheme(stack, channels, config, CodebookSpec(size=10))
    again = codebook_scheme(stack, channels, config, CodebookSpec(size=10))
    other = codebook_scheme(stack, channels, config, CodebookSpec(size=10, seed=99))

    assert first.sum_rate == again.sum_rate
    assert np.array_equal(first.phases.theta, again.phases.theta)
    assert not np.array_equal(first.phases.theta, other.phases.theta)


def test_codebook_prefix_property(instance, config):
    """A larger codebook extends the candidate stream of a smaller one"""
    stack, channels = instance
    small = codebook_scheme(stack, channels, config, CodebookSpec(size=5))
    large = codebook_scheme(stack, channels, config, CodebookSpec(size=15))

    assert large.trace.sum_rates[:5] == small.trace.sum_rates
    assert large.sum_rate >= small.sum_rate


def test_default_codebook_size(instance):
    stack, _ = instance
    assert CodebookSpec().resolved_size(stack) == 10 * 3 * 16
    assert CodebookSpec(size=7).resolved_size(stack) == 7
    with pytest.raises(ValidationError):
        CodebookSpec(size=0)


@pytest.mark.parametrize('trial', range(20))
def test_alternating_dominates_uniform_power(config, trial):
    solved = solve_trial(config, trial, schemes=['ao', 'uniform'])
    ao, _ = solved['ao']
    uniform, _ = solved['uniform']
    assert ao.sum_rate >= uniform.sum_rate - 1e-9


def test_shared_start(instance, config):
    stack, channels = instance
    start = initial_phases(stack, channels)
    ao = alternating_optimize(stack, channels, config, phases=start)
    uniform = uniform_power_scheme(stack, channels, config, phases=start)

    assert ao.trace.initial_rate == pytest.approx(uniform.trace.initial_rate)


def test_first_phase_update_is_the_uniform_solve(instance, config):
    stack, channels = instance
    ao = alternating_optimize(stack, channels, config)
    uniform = uniform_power_scheme(stack, channels, config)

    steps = uniform.trace.iterations
    assert ao.trace.sum_rates[:steps] == uniform.trace.sum_rates
    assert ao.trace.gradient_steps_per_round[:uniform.trace.outer_iterations] == \
        uniform.trace.gradient_steps_per_round


def test_single_candidate_codebook(instance, config):
    stack, channels = instance
    result = codebook_scheme(stack, channels, config, CodebookSpec(size=1))

    phases = PhaseState.random(stack.L, stack.N, stream(channels.seed, STREAM_CODEBOOK))
    q = effective_gains(channels, compose_beamformer(phases, stack), stack.W1)
    power, _, _ = damped_power_iteration(q, channels.sigma2, config.transmit_power_mw,
                                         config.optimizer)

    assert np.array_equal(result.phases.theta, phases.theta)
    assert_allclose(result.power.p, power.p)
    assert result.sum_rate == pytest.approx(sum_rate(sinr(q, power, channels.sigma2)))
    assert result.trace.iterations == 1
