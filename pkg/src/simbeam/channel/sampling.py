"""
Correlated Rayleigh fading from the last layer to each user,
h_k ~ CN(0, g beta_k R), with every random draw taken from a stream keyed by
(trial seed, purpose, index) so results do not depend on execution order.
"""
from typing import Sequence, Tuple
from pydantic import BaseModel
import numpy as np

from ..exceptions import DomainError
from ..lib.units import db_to_linear

# spawn keys below a trial seed
STREAM_CHANNEL = 0
STREAM_PHASES = 1
STREAM_CODEBOOK = 2


def trial_seed(base_seed: int, trial_index: int) -> int:
    """Seed of one Monte Carlo trial, derived from the master seed"""
    seq = np.random.SeedSequence(base_seed, spawn_key=(trial_index,))
    return int(seq.generate_state(1)[0])


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one purpose below a trial seed"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def standard_complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    """Circularly-symmetric CN(0, 1) samples"""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)


def path_loss(d, C0: float, alpha: float):
    """beta = C0 d^-alpha with C0 given in dB"""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise DomainError("path loss distance must be positive")
    beta = db_to_linear(C0) * d ** (-alpha)
    return float(beta) if beta.ndim == 0 else beta


class ChannelSet(BaseModel):
    """
    Attributes:
        h: (K, N) complex, row k is h_k
        beta: (K,) path losses, linear
        sigma2: (K,) noise powers in mW
        seed: trial seed the channels were drawn from
    """
    h: np.ndarray
    beta: np.ndarray
    sigma2: np.ndarray
    seed: int

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @property
    def K(self) -> int:
        return self.h.shape[0]

    @property
    def N(self) -> int:
        return self.h.shape[1]

    @property
    def H(self) -> np.ndarray:
        """(N, K) with h_k as columns"""
        return self.h.T


def sample_channels(seed: int, F: np.ndarray, betas: Sequence[float],
                    gains: Tuple[float, float] = (5.0, 0.0),
                    noise_power_mw=1.0) -> ChannelSet:
    """
    h_k = sqrt(g beta_k) F z_k with z_k ~ CN(0, I) from stream (seed, channel, k)
    and g the combined (BS, user) antenna gain given in dBi.
    """
    F = np.asarray(F)
    betas = np.atleast_1d(np.array(betas, dtype=float))
    K, N = betas.size, F.shape[0]
    g = float(db_to_linear(gains[0] + gains[1]))

    h = np.empty((K, N), dtype=complex)
    for k in range(K):
        z = standard_complex_normal(stream(seed, STREAM_CHANNEL, k), F.shape[1])
        h[k] = np.sqrt(g * betas[k]) * (F @ z)

    sigma2 = np.broadcast_to(np.asarray(noise_power_mw, dtype=float), (K,)).copy()
    for arr in (h, betas, sigma2):
        arr.setflags(write=False)
    return ChannelSet(h=h, beta=betas, sigma2=sigma2, seed=seed)


def draw_channels(config, geometry, covariance, seed: int) -> ChannelSet:
    """Channels of one trial for a `SimConfig` and its geometry"""
    betas = path_loss(geometry.user_distances(), config.channel.C0, config.channel.alpha)
    return sample_channels(seed, covariance.F, betas,
                           gains=(config.channel.gain_bs, config.channel.gain_ue),
                           noise_power_mw=config.noise_power_mw)
