from pydantic import Field, validator
from typing import List, Literal, Optional, Any
import numpy as np

from .extensions import ExtendedBaseModel


"""
Solver status.

Attributes:
    status: how the solver stopped, where
        * converged: fractional sum rate increase fell below the tolerance
        * stalled: the line search found no ascent step (stationary point)
        * max_iter: an iteration cap was reached, the best iterate is returned
"""
SolveStatus = Literal['converged', 'stalled', 'max_iter']

RESULT_COLUMNS = ('axis', 'value', 'scheme', 'trial', 'seed', 'sum_rate_bpshz',
                  'outer_iters', 'grad_steps', 'status', 'wall_ms')


class SolveTrace(ExtendedBaseModel):
    """
    Convergence record of one solve.

    Attributes:
        initial_rate: sum rate at the starting point
        sum_rates: sum rate after every solver step (gradient steps, power
            updates, codebook candidates)
        outer_rates: sum rate at the end of every alternating round
        gradient_steps_per_round: accepted gradient steps in each ascent sweep
        power_passes_per_round: water-filling passes in each power update
        phase_seconds: wall time spent optimizing phases
        power_seconds: wall time spent allocating power
    """
    initial_rate: float = 0.0
    sum_rates: List[float] = Field(default_factory=list)
    outer_rates: List[float] = Field(default_factory=list)
    gradient_steps_per_round: List[int] = Field(default_factory=list)
    power_passes_per_round: List[int] = Field(default_factory=list)
    phase_seconds: float = 0.0
    power_seconds: float = 0.0
    status: SolveStatus = 'converged'

    @property
    def iterations(self) -> int:
        return len(self.sum_rates)

    @property
    def outer_iterations(self) -> int:
        return len(self.outer_rates)

    @property
    def gradient_steps(self) -> int:
        return sum(self.gradient_steps_per_round)

    @property
    def final_rate(self) -> float:
        return self.sum_rates[-1] if self.sum_rates else self.initial_rate

    def absorb(self, other: 'SolveTrace'):
        """Append the steps of a sub-solve (e.g. one phase update)"""
        self.sum_rates.extend(other.sum_rates)
        self.gradient_steps_per_round.extend(other.gradient_steps_per_round)
        self.power_passes_per_round.extend(other.power_passes_per_round)
        self.phase_seconds += other.phase_seconds
        self.power_seconds += other.power_seconds

    def is_monotone(self, tol: float = 1e-9) -> bool:
        rates = np.array([self.initial_rate] + list(self.sum_rates))
        return bool(np.all(np.diff(rates) >= -tol))


class SolveResult(ExtendedBaseModel):
    """
    Outcome of one scheme on one channel realization.

    Attributes:
        scheme: ao, uniform or codebook
        phases: optimized `PhaseState`
        power: optimized `PowerAllocation` in mW
        sum_rate: final sum rate in bits/s/Hz
        rate_per_user: per-user rates in bits/s/Hz
        trace: convergence record
        status: solver status (see `SolveStatus`)
    """
    scheme: str
    phases: Any
    power: Any
    sum_rate: float
    rate_per_user: np.ndarray
    trace: SolveTrace
    status: SolveStatus = 'converged'

    class Config:
        arbitrary_types_allowed = True


class ResultRow(ExtendedBaseModel):
    """
    One line of a sweep result file.
    """
    axis: str = 'none'
    value: Optional[float] = None
    scheme: str
    trial: int
    seed: int
    sum_rate_bpshz: float
    outer_iters: int
    grad_steps: int
    status: SolveStatus
    wall_ms: float

    @validator('sum_rate_bpshz', 'wall_ms')
    def nonnegative(cls, v):
        if v < 0:
            raise ValueError('must be nonnegative')
        return v

    def csv_fields(self) -> List[str]:
        value = '' if self.value is None else f"{self.value:g}"
        return [self.axis, value, self.scheme, str(self.trial), str(self.seed),
                repr(self.sum_rate_bpshz), str(self.outer_iters), str(self.grad_steps),
                self.status, f"{self.wall_ms:.3f}"]
