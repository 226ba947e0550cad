"""
Benchmark schemes: phase optimization at uniform power, and the best of a
codebook of random SIM configurations with water-filled powers.
"""
from typing import Optional
import time

from pydantic import validator
from loguru import logger

from .channel.sampling import stream, STREAM_CODEBOOK
from .metrics import effective_gains, sinr, sum_rate
from .models.extensions import ExtendedBaseModel
from .models.results import SolveTrace, SolveResult
from .optimize.alternating import initial_phases, finish
from .optimize.phases import optimize_phases
from .optimize.power import PowerAllocation, damped_power_iteration
from .sim.beamformer import PhaseState, compose_beamformer


class CodebookSpec(ExtendedBaseModel):
    """
    Attributes:
        size: number of random SIM configurations, 10 * L * N when unset
        seed: seed of the candidate stream, the trial seed when unset
    """
    size: Optional[int] = None
    seed: Optional[int] = None

    @validator('size')
    def at_least_one(cls, v):
        if v is not None and v < 1:
            raise ValueError('codebook size must be >= 1')
        return v

    def resolved_size(self, stack) -> int:
        return self.get('size', 10 * stack.L * stack.N)


def uniform_power_scheme(stack, channels, config, phases: PhaseState = None) -> SolveResult:
    """
    p_k = P_T / K for every user, phases optimized from the same random start
    and to the same stopping rule as the alternating solver.
    """
    if phases is None:
        phases = initial_phases(stack, channels)
    power = PowerAllocation.uniform(channels.K, config.transmit_power_mw)

    phases, trace = optimize_phases(phases, stack, channels, power, config.optimizer)
    return finish('uniform', phases, power, stack, channels, trace)


def codebook_scheme(stack, channels, config, spec: CodebookSpec = None) -> SolveResult:
    """
    Draw `spec.size` complete phase configurations uniformly at random,
    water-fill the power for each, and keep the best one. Ties go to the
    earliest candidate.
    """
    spec = spec or CodebookSpec()
    size = spec.resolved_size(stack)
    rng = stream(spec.get('seed', channels.seed), STREAM_CODEBOOK)
    params = config.optimizer
    budget = config.transmit_power_mw

    started = time.perf_counter()
    best = None
    trace = SolveTrace(status='converged')

    for index in range(size):
        phases = PhaseState.random(stack.L, stack.N, rng)
        q = effective_gains(channels, compose_beamformer(phases, stack), stack.W1)
        power, passes, converged = damped_power_iteration(q, channels.sigma2, budget, params)
        R = sum_rate(sinr(q, power, channels.sigma2))

        if index == 0:
            trace.initial_rate = R
        if best is None or R > best[0]:
            best = (R, phases, power, converged)
        trace.sum_rates.append(best[0])
        trace.power_passes_per_round.append(passes)

    R, phases, power, converged = best
    if not converged:
        trace.status = 'max_iter'
    trace.outer_rates.append(R)
    trace.power_seconds = time.perf_counter() - started
    logger.debug(f"Codebook of {size} candidates, best R={R:.4f} bits/s/Hz")
    return finish('codebook', phases, power, stack, channels, trace)
