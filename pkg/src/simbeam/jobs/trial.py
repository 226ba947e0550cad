from typing import Dict, List, Optional, Sequence, Tuple
import time

from pydantic import BaseModel
from loguru import logger

from ..baselines import CodebookSpec, codebook_scheme, uniform_power_scheme
from ..channel.covariance import SpatialCovariance, build_covariance
from ..channel.sampling import ChannelSet, draw_channels, trial_seed
from ..models.config import SimConfig, SCHEMES
from ..models.results import ResultRow, SolveResult
from ..optimize.alternating import alternating_optimize, initial_phases
from ..sim.geometry import SimGeometry, build_geometry
from ..sim.propagation import PropagationStack, build_propagation_stack


class TrialContext(BaseModel):
    """
    Deterministic part of a simulation: everything that depends on the
    configuration but not on the channel realization.
    """
    geometry: SimGeometry
    stack: PropagationStack
    covariance: SpatialCovariance

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False


# per-process, keyed by SimConfig.geometry_key()
_CONTEXTS: Dict[tuple, TrialContext] = {}


def trial_context(config: SimConfig) -> TrialContext:
    key = config.geometry_key()
    context = _CONTEXTS.get(key)
    if context is None:
        geometry = build_geometry(config)
        context = TrialContext(geometry=geometry,
                               stack=build_propagation_stack(geometry),
                               covariance=build_covariance(geometry.layer_positions[-1],
                                                           geometry.wavelength))
        _CONTEXTS[key] = context
        logger.debug(f"Built propagation stack for N={config.N}, L={config.L}, M={config.M}")
    return context


def trial_channels(config: SimConfig, trial_index: int) -> Tuple[TrialContext, ChannelSet]:
    context = trial_context(config)
    seed = trial_seed(config.system.base_seed, trial_index)
    return context, draw_channels(config, context.geometry, context.covariance, seed)


def solve_trial(config: SimConfig, trial_index: int,
                schemes: Sequence[str] = SCHEMES,
                codebook_size: Optional[int] = None) -> Dict[str, Tuple[SolveResult, float]]:
    """
    Run every requested scheme on the channels of one trial, all starting
    from the same random phases. Returns {scheme: (result, wall ms)}.
    """
    context, channels = trial_channels(config, trial_index)
    stack = context.stack
    start_phases = initial_phases(stack, channels)

    runners = {
        'ao': lambda: alternating_optimize(stack, channels, config, phases=start_phases),
        'uniform': lambda: uniform_power_scheme(stack, channels, config, phases=start_phases),
        'codebook': lambda: codebook_scheme(stack, channels, config,
                                            CodebookSpec(size=codebook_size)),
    }

    solved = {}
    for scheme in (s for s in SCHEMES if s in schemes):
        started = time.perf_counter()
        result = runners[scheme]()
        solved[scheme] = (result, 1000.0 * (time.perf_counter() - started))
    return solved


def run_trial(config: SimConfig, trial_index: int,
              schemes: Sequence[str] = SCHEMES,
              axis: str = 'none', value: Optional[float] = None,
              codebook_size: Optional[int] = None) -> List[ResultRow]:
    """
    One row per scheme for a single channel realization. Solver flags end up
    in the row status.
    """
    seed = trial_seed(config.system.base_seed, trial_index)
    rows = []
    for scheme, (result, wall_ms) in solve_trial(config, trial_index, schemes,
                                                 codebook_size).items():
        rows.append(ResultRow(axis=axis, value=value, scheme=scheme, trial=trial_index,
                              seed=seed, sum_rate_bpshz=result.sum_rate,
                              outer_iters=result.trace.outer_iterations,
                              grad_steps=result.trace.gradient_steps,
                              status=result.status, wall_ms=wall_ms))
        if result.status == 'max_iter':
            logger.warning(f"Trial {trial_index} ({axis}={value}): {scheme} hit an iteration cap")
    return rows
