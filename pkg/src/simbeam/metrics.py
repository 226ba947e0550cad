"""
Effective gains, SINR and sum rate. Users are single-antenna receivers that
treat interference as noise; rates are in bits/s/Hz.
"""
from pydantic import BaseModel
import numpy as np

from .exceptions import ContractError


class EffectiveGains(BaseModel):
    """
    q[k, k'] = h_k^H G w^1_k', the gain from antenna (stream) k' to user k.
    """
    q: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @property
    def K(self) -> int:
        return self.q.shape[0]

    @property
    def power_gains(self) -> np.ndarray:
        return np.abs(self.q) ** 2


class RateReport(BaseModel):
    gamma: np.ndarray
    rate_per_user: np.ndarray
    sum_rate: float

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False


def _matrix(x):
    return getattr(x, 'G', x)


def effective_gains(channels, G, W1) -> EffectiveGains:
    h = channels.h
    G = _matrix(G)
    if G.shape != (h.shape[1], h.shape[1]) or W1.shape[0] != h.shape[1]:
        raise ContractError(f"channels of length {h.shape[1]} do not match "
                            f"G {G.shape} and W1 {W1.shape}")
    if W1.shape[1] != h.shape[0]:
        raise ContractError(f"{W1.shape[1]} antennas for {h.shape[0]} users")
    return EffectiveGains(q=h.conj() @ G @ W1)


def sinr(q, p, sigma2) -> np.ndarray:
    """
    gamma_k = |q_kk|^2 p_k / (sum_{k' != k} |q_kk'|^2 p_k' + sigma_k^2)
    """
    S = np.abs(getattr(q, 'q', q)) ** 2
    p = np.asarray(getattr(p, 'p', p), dtype=float)
    signal = np.diag(S) * p
    interference = S @ p - signal
    return signal / (interference + np.asarray(sigma2, dtype=float))


def sum_rate(gammas) -> float:
    gammas = np.asarray(gammas, dtype=float)
    if np.any(gammas < 0):
        raise ContractError("SINR values must be nonnegative")
    return float(np.sum(np.log2(1.0 + gammas)))


def rate_report(q, p, sigma2) -> RateReport:
    gamma = sinr(q, p, sigma2)
    rates = np.log2(1.0 + gamma)
    return RateReport(gamma=gamma, rate_per_user=rates, sum_rate=float(rates.sum()))
