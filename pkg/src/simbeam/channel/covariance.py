from pydantic import BaseModel
from scipy.linalg import eigh
from scipy.spatial.distance import cdist
from loguru import logger
import numpy as np

from ..exceptions import ModelError

# eigenvalues below this are a construction bug, not round-off
EIGEN_FLOOR = -1e-8


class SpatialCovariance(BaseModel):
    """
    Spatial correlation of the last metasurface layer under isotropic
    scattering.

    Attributes:
        R: (N, N) real symmetric covariance, unit diagonal
        F: (N, N) complex factor with F F^H = R
    """
    R: np.ndarray
    F: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @property
    def N(self) -> int:
        return self.R.shape[0]


def covariance_factor(R) -> np.ndarray:
    """
    Square root of a PSD matrix through its eigendecomposition. Negative
    round-off eigenvalues are clipped to zero; the half-wavelength sinc
    covariance is rank deficient so a Cholesky factor does not exist.
    """
    R = np.asarray(getattr(R, 'R', R), dtype=float)
    eigvals, Q = eigh(R)

    if eigvals.min(initial=0.0) < EIGEN_FLOOR:
        raise ModelError(f"covariance has eigenvalue {eigvals.min():.3e} < {EIGEN_FLOOR:g}")

    clipped = np.clip(eigvals, 0.0, None)
    if np.any(eigvals < 0):
        logger.debug(f"Clipped {np.sum(eigvals < 0)} negative eigenvalues "
                     f"(min {eigvals.min():.3e})")
    return (Q * np.sqrt(clipped)[None, :]).astype(complex)


def build_covariance(layer_geometry, wavelength: float) -> SpatialCovariance:
    """
    R[n, n'] = sinc(2 d(n, n') / lambda) with the normalized sinc
    """
    points = np.asarray(layer_geometry, dtype=float)
    R = np.sinc(2.0 * cdist(points, points) / wavelength)
    R = 0.5 * (R + R.T)
    np.fill_diagonal(R, 1.0)

    F = covariance_factor(R)
    R.setflags(write=False)
    F.setflags(write=False)
    return SpatialCovariance(R=R, F=F)
