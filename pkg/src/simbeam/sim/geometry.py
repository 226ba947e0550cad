"""
Physical layout of the BS array, the metasurface layers and the users.

Frame: z is the stacking (boresight) axis, x the horizontal transverse axis
the antenna line is parallel to, y the vertical axis. The antennas sit at
z = 0, layer l at z = l * d_layer, and every grid is centered on
(x, y) = (0, H_BS). User k stands on the ground (y = 0) at x = k * d_UE in
the transverse plane of the stack centroid, so its distance to the SIM is
sqrt(H_BS^2 + (k * d_UE)^2).
"""
from pydantic import BaseModel
import numpy as np

from ..exceptions import ConfigurationError


class SimGeometry(BaseModel):
    """
    Attributes:
        antenna_positions: (M, 3) antenna coordinates in meters
        layer_positions: (L, N, 3) meta-atom coordinates in meters
        user_positions: (K, 3) user coordinates in meters
        centroid: (3,) center of the metasurface stack
        d_layer: spacing between adjacent layers (and antennas to layer 1)
        wavelength: carrier wavelength in meters
        spacing: in-layer and in-array element spacing in meters
        d_x, d_y: meta-atom size in meters
    """
    antenna_positions: np.ndarray
    layer_positions: np.ndarray
    user_positions: np.ndarray
    centroid: np.ndarray
    d_layer: float
    wavelength: float
    spacing: float
    d_x: float
    d_y: float

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @property
    def L(self) -> int:
        return self.layer_positions.shape[0]

    @property
    def N(self) -> int:
        return self.layer_positions.shape[1]

    @property
    def M(self) -> int:
        return self.antenna_positions.shape[0]

    @property
    def K(self) -> int:
        return self.user_positions.shape[0]

    def user_distances(self) -> np.ndarray:
        """Distance of every user to the stack centroid"""
        return np.linalg.norm(self.user_positions - self.centroid, axis=1)


def _centered(count: int, spacing: float) -> np.ndarray:
    return (np.arange(count) - (count - 1) / 2.0) * spacing


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def layer_grid(n_x: int, n_y: int, spacing: float, height: float, z: float) -> np.ndarray:
    """(n_x * n_y, 3) grid in the plane z, row-major over (x, y)"""
    xs, ys = np.meshgrid(_centered(n_x, spacing), _centered(n_y, spacing), indexing='ij')
    return np.column_stack([xs.ravel(),
                            ys.ravel() + height,
                            np.full(n_x * n_y, z)])


def build_geometry(config) -> SimGeometry:
    """
    Place antennas, meta-atoms and users for a `SimConfig`
    """
    geo = config.geometry
    if geo.N_x != geo.N_y:
        raise ConfigurationError(f"layers must be square (N_x={geo.N_x}, N_y={geo.N_y})")
    if geo.L < 1:
        raise ConfigurationError("geometry.L must be >= 1")
    if not (geo.element_spacing > 0 and geo.T_SIM > 0):
        raise ConfigurationError("element spacing and stack thickness must be positive")

    lam = config.wavelength
    spacing = geo.element_spacing * lam
    d_layer = config.d_layer
    d_x, d_y = config.meta_atom_size

    antennas = np.column_stack([_centered(config.M, spacing),
                                np.full(config.M, geo.H_BS),
                                np.zeros(config.M)])

    layers = np.stack([layer_grid(geo.N_x, geo.N_y, spacing, geo.H_BS, l * d_layer)
                       for l in range(1, geo.L + 1)])

    centroid = np.array([0.0, geo.H_BS, layers[:, 0, 2].mean()])
    k = np.arange(1, config.K + 1)
    users = np.column_stack([k * geo.d_UE,
                             np.zeros(config.K),
                             np.full(config.K, centroid[2])])

    return SimGeometry(antenna_positions=_frozen(antennas),
                       layer_positions=_frozen(layers),
                       user_positions=_frozen(users),
                       centroid=_frozen(centroid),
                       d_layer=d_layer,
                       wavelength=lam,
                       spacing=spacing,
                       d_x=d_x,
                       d_y=d_y)
