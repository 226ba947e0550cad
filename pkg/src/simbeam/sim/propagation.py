"""
Rayleigh-Sommerfeld transmission coefficients between the BS antennas and
the first layer, and between consecutive metasurface layers.
"""
from typing import Tuple
from pydantic import BaseModel
from scipy.spatial.distance import cdist
import numpy as np

from ..exceptions import DomainError, ContractError
from .geometry import SimGeometry


def diffraction_coefficients(distance, normal_gap: float, d_x: float, d_y: float,
                             wavelength: float):
    """
    Element-wise transmission coefficient for propagation distances
    `distance` across a plane separation `normal_gap`:

        (d_x d_y cos(chi) / d) * (1 / (2 pi d) - j / lambda) * exp(j 2 pi d / lambda)

    with cos(chi) = normal_gap / d.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise DomainError("transmission distance must be positive")
    if not normal_gap > 0:
        raise DomainError(f"layer gap must be positive, got {normal_gap}")

    cos_chi = normal_gap / d
    return (d_x * d_y * cos_chi / d
            * (1.0 / (2 * np.pi * d) - 1j / wavelength)
            * np.exp(2j * np.pi * d / wavelength))


def diffraction_coefficient(src, dst, normal_gap: float, d_x: float, d_y: float,
                            wavelength: float) -> complex:
    """Transmission coefficient from point `src` to point `dst`"""
    d = float(np.linalg.norm(np.asarray(dst, dtype=float) - np.asarray(src, dtype=float)))
    if d == 0:
        raise DomainError("source and destination coincide")
    return complex(diffraction_coefficients(d, normal_gap, d_x, d_y, wavelength))


class PropagationStack(BaseModel):
    """
    Fixed transmission matrices of the stack.

    Attributes:
        W1: (N, M) antennas to first layer, column m is w^1_m
        layers: W^2 .. W^L, each (N, N) mapping layer l-1 to layer l
    """
    W1: np.ndarray
    layers: Tuple[np.ndarray, ...] = ()

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @property
    def L(self) -> int:
        return len(self.layers) + 1

    @property
    def N(self) -> int:
        return self.W1.shape[0]

    @property
    def M(self) -> int:
        return self.W1.shape[1]

    def transmission(self, l: int) -> np.ndarray:
        """W^l for 2 <= l <= L"""
        if not 2 <= l <= self.L:
            raise ContractError(f"no transmission matrix for layer {l} (L={self.L})")
        return self.layers[l - 2]


def _sealed(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def build_propagation_stack(geometry: SimGeometry) -> PropagationStack:
    """
    Evaluate every inter-layer coefficient. Entry (n, n') of W^l is the
    coefficient from atom n' of layer l-1 to atom n of layer l.
    """
    coeff = dict(normal_gap=geometry.d_layer, d_x=geometry.d_x, d_y=geometry.d_y,
                 wavelength=geometry.wavelength)
    layers = geometry.layer_positions

    W1 = diffraction_coefficients(cdist(layers[0], geometry.antenna_positions), **coeff)
    inter = tuple(_sealed(diffraction_coefficients(cdist(layers[l], layers[l - 1]), **coeff))
                  for l in range(1, geometry.L))

    return PropagationStack(W1=_sealed(W1), layers=inter)
