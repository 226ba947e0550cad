from .exceptions import (SimbeamError, ConfigurationError, DomainError, ContractError,
                         ModelError, OutputError)
from .models import SimConfig, SweepSpec, OptimizerParams, load_config, SCHEMES
from .models import SolveTrace, SolveResult, ResultRow
from .sim import build_geometry, build_propagation_stack, compose_beamformer, PhaseState
from .channel import build_covariance, draw_channels, trial_seed
from .metrics import effective_gains, sinr, sum_rate, rate_report
from .optimize import alternating_optimize, damped_power_iteration, gradient_ascent, optimize_phases
from .baselines import uniform_power_scheme, codebook_scheme, CodebookSpec
from .jobs import run_trial, run_sweep, emit_trace, solve_trial, run_validation
