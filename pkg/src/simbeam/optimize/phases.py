"""
Phase optimization for a fixed power allocation: analytic gradient of the
sum rate with respect to every meta-atom phase and gradient ascent with
Armijo backtracking.
"""
from functools import partial
from typing import Callable, Tuple
import time

from loguru import logger
import numpy as np

from ..exceptions import ContractError
from ..metrics import effective_gains, sinr, sum_rate
from ..models.results import SolveTrace
from ..sim.beamformer import PhaseState, compose_beamformer, partial_product_chain

LOG2_E = np.log2(np.e)


def fractional_increase(before: float, after: float) -> float:
    if before > 0:
        return (after - before) / before
    return np.inf if after > before else 0.0


def evaluate_sum_rate(phases: PhaseState, stack, channels, p) -> float:
    """Sum rate of a phase configuration at fixed powers"""
    q = effective_gains(channels, compose_beamformer(phases, stack), stack.W1)
    return sum_rate(sinr(q, p, channels.sigma2))


def sum_rate_gradient(phases: PhaseState, stack, channels, p, sigma2=None) -> np.ndarray:
    """
    dR/dtheta_n^l = 2 log2(e) sum_k delta_k (p_k eta_kk - gamma_k sum_{k' != k} p_k' eta_kk')

    with delta_k the inverse of the total received power at user k and
    eta_kk' = Im[conj(phi_n) (w^1_k')^H u_n^l (v_n^l)^H h_k q_kk'] the
    per-atom sensitivity of |q_kk'|^2 / 2. The partial products of every
    layer and the effective gains q are computed once per call.
    """
    if channels.N != stack.N or phases.N != stack.N:
        raise ContractError(f"channels of length {channels.N} for {stack.N} meta-atoms")

    p = np.asarray(getattr(p, 'p', p), dtype=float)
    sigma2 = channels.sigma2 if sigma2 is None else np.asarray(sigma2, dtype=float)
    if p.size != channels.K:
        raise ContractError(f"{p.size} powers for {channels.K} users")

    phi = phases.phasors()
    U, V = partial_product_chain(phases, stack)
    W1 = stack.W1
    hH = channels.h.conj()

    G = V[0] * phi[0][None, :]
    q = hH @ G @ W1
    S = np.abs(q) ** 2

    total = S @ p + sigma2
    delta = 1.0 / total
    own = np.diag(S) * p
    gamma = own / (total - own)

    weights = -(delta * gamma)[:, None] * p[None, :]
    np.fill_diagonal(weights, delta * p)
    weighted_q = weights * q

    grad = np.empty((phases.L, phases.N))
    for l in range(phases.L):
        A = hH @ V[l]                          # rows h_k^H V^l
        B = U[l] @ W1                          # columns U^l w^1_k'
        C = weighted_q @ B.conj().T
        grad[l] = np.imag(phi[l].conj() * np.sum(A.conj() * C, axis=0))
    return 2.0 * LOG2_E * grad


def armijo_ascent_step(phases: PhaseState, gradient: np.ndarray,
                       evaluate_R: Callable[[PhaseState], float], params,
                       R_current: float = None, mu0: float = None) -> Tuple[PhaseState, float, float]:
    """
    Backtrack mu = mu0 * rho^t until

        R(theta + mu g) >= R(theta) + c mu ||g||^2

    with mu0 = `params.armijo_init` unless given. Returns the unchanged state
    and mu = 0 when no step is accepted within `params.inner_max` reductions
    (a stationary point at working precision).
    """
    R0 = evaluate_R(phases) if R_current is None else R_current
    slope = float(np.sum(gradient ** 2))
    if slope == 0.0:
        return phases, 0.0, R0

    mu = params.armijo_init if mu0 is None else mu0
    for _ in range(params.inner_max):
        candidate = phases.shifted(gradient, mu)
        R_new = evaluate_R(candidate)
        if R_new >= R0 + params.armijo_slope * mu * slope:
            return candidate, mu, R_new
        mu *= params.armijo_shrink

    return phases, 0.0, R0


def spectral_step(step: np.ndarray, gradient_change: np.ndarray, gradient: np.ndarray,
                  params) -> float:
    """
    Barzilai-Borwein trial step <s, s> / -<s, y> for the next line search,
    with s the last phase move and y the change of the gradient it caused.

    The estimate is kept between `armijo_init` and the step that turns the
    steepest meta-atom by half a period. Where the rate is not concave along
    s the half-period step is tried.
    """
    peak = float(np.abs(gradient).max())
    if peak == 0.0:
        return params.armijo_init
    cap = np.pi / peak

    curvature = -float(np.sum(step * gradient_change))
    mu = float(np.sum(step ** 2)) / curvature if curvature > 0 else cap
    return max(params.armijo_init, min(mu, cap))


def gradient_ascent(phases: PhaseState, stack, channels, p, params) -> Tuple[PhaseState, SolveTrace]:
    """
    One ascent sweep: repeat gradient and Armijo steps until the fractional
    sum rate increase of a step falls below `params.ao_tolerance`, the line
    search stalls, or `params.inner_max` steps were taken.
    """
    started = time.perf_counter()
    evaluate_R = partial(evaluate_sum_rate, stack=stack, channels=channels, p=p)

    R = evaluate_R(phases)
    trace = SolveTrace(initial_rate=R, status='max_iter')
    steps = 0
    mu_trial = params.armijo_init
    g = sum_rate_gradient(phases, stack, channels, p)

    for _ in range(params.inner_max):
        candidate, mu, R_new = armijo_ascent_step(phases, g, evaluate_R, params,
                                                  R_current=R, mu0=mu_trial)
        if mu == 0.0:
            trace.status = 'stalled' if np.any(g) else 'converged'
            break

        steps += 1
        trace.sum_rates.append(R_new)
        gain = fractional_increase(R, R_new)
        phases, R = candidate, R_new
        if gain < params.ao_tolerance:
            trace.status = 'converged'
            break

        g_next = sum_rate_gradient(phases, stack, channels, p)
        if params.step_rule == 'spectral':
            mu_trial = spectral_step(mu * g, g_next - g, g_next, params)
        g = g_next

    if trace.status == 'max_iter':
        logger.debug(f"Gradient ascent hit the {params.inner_max} step cap at R={R:.4f}")

    trace.gradient_steps_per_round.append(steps)
    trace.phase_seconds += time.perf_counter() - started
    return phases, trace


def optimize_phases(phases: PhaseState, stack, channels, p, params) -> Tuple[PhaseState, SolveTrace]:
    """
    Phase update at fixed powers. Ascent sweeps restart from a fresh trial
    step until a whole sweep raises the sum rate by a fraction below
    `params.ao_tolerance`, or `params.outer_max` sweeps. `outer_rates` of the
    returned trace holds the rate after every sweep.
    """
    trace = None
    for _ in range(params.outer_max):
        phases, sweep = gradient_ascent(phases, stack, channels, p, params)
        if trace is None:
            trace = SolveTrace(initial_rate=sweep.initial_rate, status='max_iter')
        trace.absorb(sweep)
        trace.outer_rates.append(sweep.final_rate)

        if fractional_increase(sweep.initial_rate, sweep.final_rate) < params.ao_tolerance:
            trace.status = 'stalled' if sweep.status == 'stalled' else 'converged'
            break

    if trace.status == 'max_iter':
        logger.debug(f"Phase update stopped after {params.outer_max} sweeps "
                     f"at R={trace.final_rate:.4f}")
    return phases, trace
