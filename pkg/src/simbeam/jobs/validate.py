"""
Property suite run by `simbeam validate`: cheap numerical checks of the
model, the gradient and the power allocation on small random instances.
"""
from typing import Callable, Dict, List, Optional
import time

from loguru import logger
import numpy as np

from ..channel.sampling import sample_channels, stream, trial_seed
from ..exceptions import ConfigurationError
from ..metrics import effective_gains
from ..models.config import SimConfig
from ..models.extensions import ExtendedBaseModel
from ..optimize.alternating import alternating_optimize, initial_phases
from ..optimize.phases import evaluate_sum_rate, sum_rate_gradient
from ..optimize.power import PowerAllocation, damped_power_iteration, water_fill_update
from ..sim.beamformer import PhaseState, compose_beamformer, partial_product_chain
from .trial import trial_channels

FD_STEP = 1e-6
FD_RTOL = 1e-5
NULL_TOL = 1e-8
ORACLE_TOL = 1e-6
BUDGET_TOL = 1e-9
MONOTONE_TOL = 1e-9
BOUND_RTOL = 1e-4

# spawn key of the random powers and gains drawn by the checks
STREAM_CHECKS = 3


class CheckResult(ExtendedBaseModel):
    name: str
    passed: bool
    detail: str = ''
    seconds: float = 0.0


def small_config(base_seed: int = 0, **sections) -> SimConfig:
    """4x4 meta-atoms, 3 layers, 2 users; everything else at the defaults"""
    data = {'system': {'M': 2, 'K': 2, 'base_seed': base_seed},
            'geometry': {'N_x': 4, 'N_y': 4, 'L': 3}}
    for section, values in sections.items():
        data.setdefault(section, {}).update(values)
    return SimConfig.parse(data)


def random_instances(config: SimConfig, count: int):
    """(stack, channels, phases, power) for `count` trials of `config`"""
    for trial in range(count):
        context, channels = trial_channels(config, trial)
        rng = stream(channels.seed, STREAM_CHECKS)
        power = PowerAllocation(p=rng.dirichlet(np.ones(channels.K)) * config.transmit_power_mw)
        yield context.stack, channels, initial_phases(context.stack, channels), power


def check_recomposition(config: SimConfig, instances: int) -> CheckResult:
    worst = 0.0
    for stack, channels, phases, _ in random_instances(config, instances):
        G = compose_beamformer(phases, stack).G
        U, V = partial_product_chain(phases, stack)
        phi = phases.phasors()
        for l in range(stack.L):
            rebuilt = (V[l] * phi[l][None, :]) @ U[l]
            worst = max(worst, np.linalg.norm(rebuilt - G) / np.linalg.norm(G))
    return CheckResult(name='recomposition', passed=worst <= 1e-10,
                       detail=f"max relative error {worst:.2e}")


def check_unit_modulus(config: SimConfig, instances: int) -> CheckResult:
    worst = 0.0
    in_range = True
    for _, _, phases, _ in random_instances(config, instances):
        worst = max(worst, float(np.max(np.abs(np.abs(phases.phasors()) - 1.0))))
        in_range &= bool(np.all((phases.theta >= 0) & (phases.theta < 2 * np.pi)))
    return CheckResult(name='unit modulus', passed=worst <= 1e-12 and in_range,
                       detail=f"max ||phi| - 1| {worst:.2e}, phases in [0, 2pi): {in_range}")


def finite_difference_gradient(phases: PhaseState, stack, channels, power,
                               step: float = FD_STEP) -> np.ndarray:
    """Central differences of the sum rate in every phase"""
    grad = np.empty_like(phases.theta)
    for index in np.ndindex(*phases.theta.shape):
        e = np.zeros_like(phases.theta)
        e[index] = 1.0
        up = evaluate_sum_rate(phases.shifted(e, step), stack, channels, power)
        down = evaluate_sum_rate(phases.shifted(e, -step), stack, channels, power)
        grad[index] = (up - down) / (2 * step)
    return grad


def check_gradient(config: SimConfig, instances: int) -> CheckResult:
    failures = 0
    worst = 0.0
    for stack, channels, phases, power in random_instances(config, instances):
        analytic = sum_rate_gradient(phases, stack, channels, power)
        numeric = finite_difference_gradient(phases, stack, channels, power)
        scale = np.max(np.abs(analytic))
        err = np.abs(numeric - analytic)
        failures += int(np.sum(err > FD_RTOL * np.abs(analytic) + 1e-7 * scale))
        worst = max(worst, float(np.max(err / (np.abs(analytic) + scale))))
    return CheckResult(name='gradient vs finite differences', passed=failures == 0,
                       detail=f"{failures} mismatched partials, worst scaled error {worst:.2e}")


def check_null_direction(config: SimConfig, instances: int) -> CheckResult:
    """A common phase rotation of one layer leaves every |q| unchanged"""
    worst = 0.0
    for stack, channels, phases, power in random_instances(config, instances):
        g = sum_rate_gradient(phases, stack, channels, power)
        worst = max(worst, float(np.max(np.abs(g.sum(axis=1))) / np.linalg.norm(g)))
    return CheckResult(name='null direction', passed=worst <= NULL_TOL,
                       detail=f"max |sum_n dR/dtheta| / ||g|| {worst:.2e}")


def kkt_water_filling(gains: np.ndarray, noise: np.ndarray, budget: float,
                      iterations: int = 500) -> np.ndarray:
    """
    Reference water-filling over parallel channels by plain bisection on the
    water level
    """
    floors = noise / gains
    lo, hi = 0.0, budget + floors.max()
    for _ in range(iterations):
        level = 0.5 * (lo + hi)
        if np.maximum(level - floors, 0.0).sum() > budget:
            hi = level
        else:
            lo = level
    return np.maximum(0.5 * (lo + hi) - floors, 0.0)


def check_water_filling(config: SimConfig, instances: int) -> CheckResult:
    worst = 0.0
    budget = config.transmit_power_mw
    for trial in range(instances):
        rng = stream(trial_seed(config.system.base_seed, trial), STREAM_CHECKS)
        # spread the gains over two decades so some draws switch a user off
        gains = 10.0 ** rng.uniform(-2.0, 0.0, size=2)
        noise = rng.uniform(0.5, 2.0, size=2) * budget / 4
        q = np.diag(np.sqrt(gains)).astype(complex)

        p = water_fill_update(q, np.zeros(2), noise, budget).p
        worst = max(worst, float(np.max(np.abs(p - kkt_water_filling(gains, noise, budget)))))
    return CheckResult(name='water-filling oracle', passed=worst <= ORACLE_TOL,
                       detail=f"max |p - p_kkt| {worst:.2e} mW")


def check_budget(config: SimConfig, instances: int) -> CheckResult:
    worst = 0.0
    budget = config.transmit_power_mw
    for stack, channels, phases, _ in random_instances(config, instances):
        q = effective_gains(channels, compose_beamformer(phases, stack), stack.W1)
        power, _, _ = damped_power_iteration(q, channels.sigma2, budget, config.optimizer)
        worst = max(worst, abs(power.total - budget))
    return CheckResult(name='power budget', passed=worst <= BUDGET_TOL,
                       detail=f"max |sum p - P_T| {worst:.2e} mW")


def check_channel_statistics(config: SimConfig, draws: int = 10000,
                             tolerance: float = 0.05) -> CheckResult:
    """
    Sample covariance of h_1 against g beta_1 R, and the pseudo-covariance
    against zero
    """
    context, reference = trial_channels(config, 0)
    F = context.covariance.F
    beta = reference.beta[:1]
    gains = (config.channel.gain_bs, config.channel.gain_ue)

    samples = np.empty((draws, config.N), dtype=complex)
    for i in range(draws):
        seed = trial_seed(config.system.base_seed, i)
        samples[i] = sample_channels(seed, F, beta, gains=gains).h[0]

    expected = config.antenna_gain * beta[0] * context.covariance.R
    sample_cov = samples.T @ samples.conj() / draws
    pseudo = samples.T @ samples / draws
    norm = np.linalg.norm(expected)
    cov_err = np.linalg.norm(sample_cov - expected) / norm
    pseudo_err = np.linalg.norm(pseudo) / norm

    return CheckResult(name='channel statistics',
                       passed=cov_err <= tolerance and pseudo_err <= tolerance,
                       detail=f"covariance error {cov_err:.2%}, pseudo-covariance {pseudo_err:.2%} "
                              f"({draws} draws)")


def check_monotone(config: SimConfig, instances: int) -> CheckResult:
    bad = 0
    for trial in range(instances):
        context, channels = trial_channels(config, trial)
        result = alternating_optimize(context.stack, channels, config)
        bad += int(not result.trace.is_monotone(MONOTONE_TOL))
    return CheckResult(name='monotone alternating optimization', passed=bad == 0,
                       detail=f"{bad} of {instances} traces decrease")


def single_user_bound(stack, channels, budget: float) -> float:
    """
    With one user and one layer the gain |sum_n conj(h_n) phi_n w_n| is
    largest when every term is phase-aligned
    """
    gain = np.sum(np.abs(channels.h[0]) * np.abs(stack.W1[:, 0]))
    return float(np.log2(1.0 + budget * gain ** 2 / channels.sigma2[0]))


def check_single_user(config: SimConfig, instances: int) -> CheckResult:
    data = config.dict()
    data['system'].update(M=1, K=1)
    data['geometry'].update(L=1)
    data['optimizer'].update(ao_tolerance=1e-10, inner_max=1000)
    single = SimConfig.parse(data)

    worst = 0.0
    for trial in range(instances):
        context, channels = trial_channels(single, trial)
        result = alternating_optimize(context.stack, channels, single)
        bound = single_user_bound(context.stack, channels, single.transmit_power_mw)
        worst = max(worst, (bound - result.sum_rate) / bound)
    return CheckResult(name='single-user bound', passed=worst <= BOUND_RTOL,
                       detail=f"max relative gap to the aligned-phase rate {worst:.2e}")


CHECKS: Dict[str, Callable[[SimConfig, int], CheckResult]] = {
    'recomposition': check_recomposition,
    'unit_modulus': check_unit_modulus,
    'gradient': check_gradient,
    'null_direction': check_null_direction,
    'water_filling': check_water_filling,
    'budget': check_budget,
    'channel_statistics': lambda config, instances: check_channel_statistics(config),
    'monotone': check_monotone,
    'single_user': check_single_user,
}


def run_validation(config: Optional[SimConfig] = None, instances: int = 10,
                   checks: Optional[List[str]] = None) -> List[CheckResult]:
    """
    Run the named checks (all of them by default) on `instances` random
    instances of `config`, a small 16 meta-atom setup when omitted
    """
    config = config or small_config()
    checks = checks or list(CHECKS)
    unknown = [name for name in checks if name not in CHECKS]
    if unknown:
        raise ConfigurationError(f"unknown checks {unknown}, choose from {list(CHECKS)}")

    results = []
    for name in checks:
        started = time.perf_counter()
        result = CHECKS[name](config, instances)
        result.seconds = time.perf_counter() - started
        level = 'INFO' if result.passed else 'ERROR'
        logger.log(level, f"{result.name}: {'ok' if result.passed else 'FAILED'} ({result.detail})")
        results.append(result)
    return results
