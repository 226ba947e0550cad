"""
Power allocation over K interfering streams for fixed SIM phases:
iterative water-filling with a damping term.
"""
from typing import NamedTuple
from pydantic import BaseModel, validator
from loguru import logger
import numpy as np

# bisection stopping rule on the budget residual, in mW
BUDGET_TOL = 1e-12
MAX_BISECTIONS = 200


class PowerAllocation(BaseModel):
    """Per-user transmit powers in mW"""
    p: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator('p', pre=True)
    def nonnegative(cls, v):
        v = np.array(v, dtype=float, ndmin=1)
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError('powers must be finite and nonnegative')
        v.setflags(write=False)
        return v

    @classmethod
    def uniform(cls, K: int, budget: float):
        return cls(p=np.full(K, budget / K))

    @property
    def total(self) -> float:
        return float(self.p.sum())


class PowerIteration(NamedTuple):
    allocation: PowerAllocation
    iterations: int
    converged: bool


def water_level(floors: np.ndarray, budget: float, tol: float = BUDGET_TOL) -> float:
    """
    Level p_o with sum_k (p_o - floors_k)^+ = budget. The level is bracketed
    by bisection until the set of users above water is settled, then solved
    exactly on that set.
    """
    floors = np.asarray(floors, dtype=float)
    if floors.size == 0 or budget <= 0:
        return float(floors.min(initial=0.0))

    lo, hi = float(floors.min()), budget + float(floors.max())
    mid = hi
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        residual = np.maximum(mid - floors, 0.0).sum() - budget
        if abs(residual) <= tol:
            break
        if residual > 0:
            hi = mid
        else:
            lo = mid
        if not np.any((floors > lo) & (floors < hi)):
            break

    level = mid
    for _ in range(floors.size + 1):
        active = floors < level
        if not active.any():
            active = floors <= floors.min()
        exact = (budget + floors[active].sum()) / active.sum()
        if np.array_equal(floors < exact, active):
            return float(exact)
        level = exact
    return float(level)


def water_fill_update(q, p_prev, sigma2, P_T: float) -> PowerAllocation:
    """
    p_k = (p_o - (sum_{k' != k} |q_kk'|^2 p_k' + sigma_k^2) / |q_kk|^2)^+

    with interference evaluated at `p_prev`. Users whose own gain vanishes
    get zero power and the budget is water-filled over the rest.
    """
    S = np.abs(getattr(q, 'q', q)) ** 2
    p_prev = np.asarray(getattr(p_prev, 'p', p_prev), dtype=float)
    own = np.diag(S)
    interference = S @ p_prev - own * p_prev + np.asarray(sigma2, dtype=float)

    p = np.zeros(own.size)
    active = own > 0
    if not active.any():
        logger.warning("Every user has zero effective gain, allocating no power")
        return PowerAllocation(p=p)

    floors = interference[active] / own[active]
    level = water_level(floors, P_T)
    p[active] = np.maximum(level - floors, 0.0)
    return PowerAllocation(p=p)


def damped_power_iteration(q, sigma2, P_T: float, params, p0=None) -> PowerIteration:
    """
    Damped iterative water-filling

        p <- (1 - damping) p + damping * water_fill_update(p)

    from a uniform split (or `p0`) until the l1 change relative to P_T drops
    below `params.power_tolerance` or `params.inner_max` passes. The returned
    allocation spends exactly P_T.
    """
    own = np.abs(np.diag(getattr(q, 'q', q))) ** 2
    active = own > 0
    kappa = params.damping

    if p0 is None:
        p = np.where(active, P_T / max(active.sum(), 1), 0.0)
    else:
        p = np.array(getattr(p0, 'p', p0), dtype=float)

    converged = False
    passes = 0
    for passes in range(1, params.inner_max + 1):
        target = water_fill_update(q, p, sigma2, P_T).p
        updated = (1.0 - kappa) * p + kappa * target
        change = np.abs(updated - p).sum() / P_T
        p = updated
        if change < params.power_tolerance:
            converged = True
            break

    if not converged:
        logger.debug(f"Damped water-filling stopped after {passes} passes without converging")

    p[~active] = 0.0
    total = p.sum()
    if total > 0:
        p *= P_T / total
    return PowerIteration(PowerAllocation(p=p), passes, converged)
