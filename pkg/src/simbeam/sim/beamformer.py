"""
Wave-domain beamforming matrix G = Phi^L W^L ... Phi^2 W^2 Phi^1 and the
partial products U^l, V^l with G = V^l Phi^l U^l.
"""
from typing import List, Tuple
from pydantic import BaseModel, validator
import numpy as np

from ..exceptions import ContractError
from .propagation import PropagationStack

TWO_PI = 2 * np.pi


class PhaseState(BaseModel):
    """
    Tunable meta-atom phases, one row per layer, canonicalized into [0, 2pi).
    """
    theta: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator('theta', pre=True)
    def canonical(cls, v):
        v = np.array(v, dtype=float, ndmin=2)
        if v.ndim != 2:
            raise ValueError('phases must be an (L, N) matrix')
        v = np.mod(v, TWO_PI)
        # mod of tiny negatives rounds up to exactly 2pi
        v[v >= TWO_PI] = 0.0
        v.setflags(write=False)
        return v

    @classmethod
    def random(cls, L: int, N: int, rng: np.random.Generator):
        return cls(theta=rng.uniform(0.0, TWO_PI, size=(L, N)))

    @classmethod
    def zeros(cls, L: int, N: int):
        return cls(theta=np.zeros((L, N)))

    @property
    def L(self) -> int:
        return self.theta.shape[0]

    @property
    def N(self) -> int:
        return self.theta.shape[1]

    def phasors(self) -> np.ndarray:
        """(L, N) diagonals of Phi^1 .. Phi^L"""
        return np.exp(1j * self.theta)

    def shifted(self, direction: np.ndarray, step: float):
        return PhaseState(theta=self.theta + step * direction)


class BeamformerMatrix(BaseModel):
    G: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False


def _check(phases: PhaseState, stack: PropagationStack):
    if phases.L != stack.L or phases.N != stack.N:
        raise ContractError(f"phases are {phases.L}x{phases.N} but the stack has "
                            f"{stack.L} layers of {stack.N} meta-atoms")


def compose_beamformer(phases: PhaseState, stack: PropagationStack) -> BeamformerMatrix:
    _check(phases, stack)
    phi = phases.phasors()

    G = np.diag(phi[0])
    for l in range(2, stack.L + 1):
        G = phi[l - 1][:, None] * (stack.transmission(l) @ G)
    return BeamformerMatrix(G=G)


def partial_product_chain(phases: PhaseState,
                          stack: PropagationStack) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """
    All partial products at once, U[l-1] = U^l and V[l-1] = V^l for
    l = 1..L, from one forward and one backward sweep over the stack.
    """
    _check(phases, stack)
    phi = phases.phasors()
    L, N = phases.L, phases.N
    eye = np.eye(N, dtype=complex)

    U = [eye]
    prefix = np.diag(phi[0])
    for l in range(2, L + 1):
        Ul = stack.transmission(l) @ prefix
        U.append(Ul)
        prefix = phi[l - 1][:, None] * Ul

    V = [eye] * L
    suffix = eye
    for l in range(L - 1, 0, -1):
        suffix = (suffix * phi[l][None, :]) @ stack.transmission(l + 1)
        V[l - 1] = suffix

    return U, V


def partial_products(phases: PhaseState, stack: PropagationStack,
                     l: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    (U^l, V^l) for a 1-based layer index, where

        U^l = W^l Phi^(l-1) ... W^2 Phi^1   (identity for l = 1)
        V^l = Phi^L W^L ... Phi^(l+1) W^(l+1)   (identity for l = L)
    """
    if not 1 <= l <= stack.L:
        raise ContractError(f"layer index {l} outside 1..{stack.L}")
    U, V = partial_product_chain(phases, stack)
    return U[l - 1], V[l - 1]
