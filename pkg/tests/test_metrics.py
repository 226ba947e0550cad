import numpy as np
import pytest
from numpy.testing import assert_allclose

from simbeam.channel import ChannelSet
from simbeam.exceptions import ContractError
from simbeam.metrics import effective_gains, rate_report, sinr, sum_rate
from simbeam.sim import PhaseState, compose_beamformer


def test_sinr_by_hand():
    q = np.array([[1.0, 0.5], [0.2, 2.0]])
    gamma = sinr(q, [1.0, 1.0], [0.1, 0.1])
    assert_allclose(gamma, [1.0 / (0.25 + 0.1), 4.0 / (0.04 + 0.1)])


def test_sinr_without_interference_is_snr():
    q = np.diag([1.0 + 1.0j, 0.5j])
    assert_allclose(sinr(q, [2.0, 4.0], 0.5), [2.0 * 2.0 / 0.5, 0.25 * 4.0 / 0.5])


def test_sum_rate():
    assert sum_rate([1.0, 3.0]) == pytest.approx(3.0)
    assert sum_rate([0.0, 0.0]) == 0.0
    with pytest.raises(ContractError):
        sum_rate([1.0, -0.5])


def test_rate_report():
    q = np.array([[1.0, 0.3], [0.1, 0.8]])
    report = rate_report(q, [0.5, 0.5], [0.01, 0.01])

    assert report.sum_rate == pytest.approx(sum_rate(report.gamma))
    assert_allclose(report.rate_per_user, np.log2(1 + report.gamma))


def test_effective_gains(instance, rng):
    stack, channels = instance
    phases = PhaseState.random(stack.L, stack.N, rng)
    G = compose_beamformer(phases, stack)

    q = effective_gains(channels, G, stack.W1)
    assert q.q.shape == (2, 2)
    for k in range(2):
        for j in range(2):
            assert q.q[k, j] == pytest.approx(np.vdot(channels.h[k], G.G @ stack.W1[:, j]))
    assert_allclose(q.power_gains, np.abs(q.q) ** 2)


def test_effective_gains_contract(instance, rng):
    stack, channels = instance
    short = ChannelSet(h=channels.h[:, :9], beta=channels.beta, sigma2=channels.sigma2, seed=0)
    with pytest.raises(ContractError):
        effective_gains(short, np.eye(16), stack.W1)
    with pytest.raises(ContractError):
        effective_gains(channels, np.eye(16), stack.W1[:, :1])


def test_sinr_is_scale_invariant(rng):
    q = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    p, noise = rng.uniform(0.1, 1.0, 3), rng.uniform(0.01, 0.1, 3)
    assert_allclose(sinr(q, 1e3 * p, 1e3 * noise), sinr(q, p, noise), rtol=1e-12)


def test_sinr_is_monotone_in_own_power():
    q = np.array([[1.0, 0.4], [0.3, 0.9]])
    noise = [0.1, 0.1]
    before = sinr(q, [1.0, 1.0], noise)
    after = sinr(q, [2.0, 1.0], noise)

    assert after[0] > before[0]
    assert after[1] < before[1]
