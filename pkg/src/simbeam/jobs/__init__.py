from .trial import TrialContext, trial_context, trial_channels, solve_trial, run_trial
from .sweep import (SummaryRow, run_sweep, execute_sweep, summarize, emit_trace,
                    summary_path_for, ensure_writable)
from .validate import CheckResult, CHECKS, run_validation, small_config
