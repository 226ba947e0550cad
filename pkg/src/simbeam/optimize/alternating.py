import time

from loguru import logger

from ..channel.sampling import stream, STREAM_PHASES
from ..metrics import effective_gains, rate_report
from ..models.results import SolveTrace, SolveResult
from ..sim.beamformer import PhaseState, compose_beamformer
from .phases import optimize_phases, fractional_increase
from .power import PowerAllocation, damped_power_iteration


def initial_phases(stack, channels) -> PhaseState:
    """Uniform random phases drawn from the trial's phase stream"""
    return PhaseState.random(stack.L, stack.N, stream(channels.seed, STREAM_PHASES))


def finish(scheme: str, phases: PhaseState, power: PowerAllocation, stack, channels,
           trace: SolveTrace) -> SolveResult:
    q = effective_gains(channels, compose_beamformer(phases, stack), stack.W1)
    report = rate_report(q, power, channels.sigma2)
    return SolveResult(scheme=scheme, phases=phases, power=power,
                       sum_rate=report.sum_rate, rate_per_user=report.rate_per_user,
                       trace=trace, status=trace.status)


def alternating_optimize(stack, channels, config, phases: PhaseState = None) -> SolveResult:
    """
    Joint power allocation and phase optimization. Every round runs a phase
    update (`optimize_phases` at fixed powers) followed by a power update
    (damped water-filling at fixed phases), until the fractional sum rate
    increase of a round drops below the tolerance or `outer_max` rounds.

    A power update that would lower the sum rate is discarded, so the trace
    never decreases. The first phase update runs at uniform power from the
    same start as `uniform_power_scheme`, so the result never falls below
    that baseline.
    """
    params = config.optimizer
    budget = config.transmit_power_mw
    sigma2 = channels.sigma2

    if phases is None:
        phases = initial_phases(stack, channels)
    power = PowerAllocation.uniform(channels.K, budget)

    R = finish('ao', phases, power, stack, channels, SolveTrace()).sum_rate
    trace = SolveTrace(initial_rate=R, status='max_iter')

    for round_ in range(1, params.outer_max + 1):
        phases, phase_trace = optimize_phases(phases, stack, channels, power, params)
        trace.absorb(phase_trace)
        R_phase = phase_trace.final_rate

        started = time.perf_counter()
        q = effective_gains(channels, compose_beamformer(phases, stack), stack.W1)
        candidate, passes, converged = damped_power_iteration(q, sigma2, budget, params)
        R_power = rate_report(q, candidate, sigma2).sum_rate
        trace.power_seconds += time.perf_counter() - started
        trace.power_passes_per_round.append(passes)

        if R_power >= R_phase:
            power, R_round = candidate, R_power
        else:
            logger.debug(f"Round {round_}: water-filling lowers R "
                         f"({R_power:.6f} < {R_phase:.6f}), keeping previous powers")
            R_round = R_phase

        trace.sum_rates.append(R_round)
        trace.outer_rates.append(R_round)

        gain = fractional_increase(R, R_round)
        R = R_round
        if gain < params.ao_tolerance:
            trace.status = 'converged'
            break

    if trace.status == 'max_iter':
        logger.warning(f"Alternating optimization stopped after {params.outer_max} rounds "
                       f"at R={R:.4f} bits/s/Hz")
    else:
        logger.debug(f"Alternating optimization converged in {trace.outer_iterations} rounds "
                     f"({trace.gradient_steps} gradient steps), R={R:.4f} bits/s/Hz")

    return finish('ao', phases, power, stack, channels, trace)
