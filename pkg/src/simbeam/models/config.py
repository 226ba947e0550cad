from pydantic import Extra, Field, ValidationError, validator, root_validator
from typing import List, Optional, Literal, Any, Dict
from pathlib import Path
import math

from loguru import logger
from ruamel.yaml import YAMLError

from .extensions import ExtendedBaseModel
from ..exceptions import ConfigurationError, OutputError
from ..lib.yaml_loader import Loader, safe_loader, dump_yaml
from ..lib.units import dbm_to_mw, db_to_linear, wavelength


"""
Sweep axes:
    L: number of metasurface layers
    K: number of users (M follows K)
    PT: transmit power budget in dBm
    N: meta-atoms per layer (must be a perfect square)
"""
SweepAxis = Literal['L', 'K', 'PT', 'N']
Scheme = Literal['ao', 'uniform', 'codebook']

SCHEMES = ('ao', 'uniform', 'codebook')


class ConfigSection(ExtendedBaseModel):

    class Config:
        extra = Extra.forbid


class SystemConfig(ConfigSection):
    """
    Transmitter-level settings.

    Attributes:
        M: number of BS antennas, equal to `K` (one data stream per antenna)
        K: number of single-antenna users
        P_T: transmit power budget in dBm
        carrier_freq: carrier frequency in Hz
        base_seed: master seed every trial seed is derived from
        trial_count: number of independent channel realizations per sweep value
    """
    M: int = 4
    K: int = 4
    P_T: float = 10.0
    carrier_freq: float = 28e9
    base_seed: int = 0
    trial_count: int = 100

    @validator('M', 'K', 'trial_count')
    def at_least_one(cls, v):
        if v < 1:
            raise ValueError('must be >= 1')
        return v

    @validator('P_T')
    def finite_power(cls, v):
        if not math.isfinite(v):
            raise ValueError('transmit power must be finite')
        return v

    @validator('carrier_freq')
    def positive_frequency(cls, v):
        if not v > 0:
            raise ValueError('carrier frequency must be positive')
        return v

    @validator('base_seed')
    def nonnegative_seed(cls, v):
        if v < 0:
            raise ValueError('seed must be nonnegative')
        return v

    @root_validator(skip_on_failure=True)
    def one_antenna_per_user(cls, values):
        if values['M'] != values['K']:
            raise ValueError(f"M ({values['M']}) must equal K ({values['K']})")
        return values


class GeometryConfig(ConfigSection):
    """
    Physical layout of the stacked metasurface.

    Attributes:
        N_x: meta-atoms along x (square layers, so equal to `N_y`)
        N_y: meta-atoms along y
        L: number of metasurface layers
        H_BS: height of the BS/SIM centroid in meters
        T_SIM: stack thickness in multiples of the wavelength
        d_UE: user spacing along the ground in meters
        element_spacing: antenna and meta-atom spacing as a fraction of the wavelength
        d_x: meta-atom width in meters, half a wavelength when unset
        d_y: meta-atom height in meters, half a wavelength when unset
    """
    N_x: int = 7
    N_y: int = 7
    L: int = 7
    H_BS: float = 10.0
    T_SIM: float = 5.0
    d_UE: float = 10.0
    element_spacing: float = 0.5
    d_x: Optional[float] = None
    d_y: Optional[float] = None

    @validator('N_x', 'N_y', 'L')
    def at_least_one(cls, v):
        if v < 1:
            raise ValueError('must be >= 1')
        return v

    @validator('T_SIM', 'd_UE', 'element_spacing')
    def positive(cls, v):
        if not v > 0:
            raise ValueError('must be positive')
        return v

    @validator('H_BS')
    def nonnegative(cls, v):
        if v < 0:
            raise ValueError('must be nonnegative')
        return v

    @validator('d_x', 'd_y')
    def positive_size(cls, v):
        if v is not None and not v > 0:
            raise ValueError('meta-atom size must be positive')
        return v

    @root_validator(skip_on_failure=True)
    def square_layers(cls, values):
        if values['N_x'] != values['N_y']:
            raise ValueError(f"layers must be square (N_x={values['N_x']}, N_y={values['N_y']})")
        return values


class ChannelConfig(ConfigSection):
    """
    Link budget of the SIM-user channels.

    Attributes:
        C0: path loss at the 1 m reference distance in dB
        alpha: path loss exponent
        noise_power: receiver noise power per user in dBm
        gain_bs: BS antenna gain in dBi
        gain_ue: user antenna gain in dBi
    """
    C0: float = -60.0
    alpha: float = 3.5
    noise_power: float = -104.0
    gain_bs: float = 5.0
    gain_ue: float = 0.0

    @validator('alpha')
    def positive_exponent(cls, v):
        if not v > 0:
            raise ValueError('path loss exponent must be positive')
        return v


class OptimizerParams(ConfigSection):
    """
    Alternating optimization settings.

    Attributes:
        damping: weight of the fresh water-filling solution in the damped update
        armijo_init: first trial step of the backtracking line search
        step_rule: trial step of every line search after the first one in a
            sweep, either `armijo_init` (fixed) or the Barzilai-Borwein estimate
            from the last two gradients, floored at `armijo_init` (spectral)
        armijo_shrink: step reduction factor per backtracking iteration
        armijo_slope: sufficient increase constant
        ao_tolerance: fractional sum rate increase below which loops stop
        power_tolerance: normalized l1 change of the power vector below which
            the damped water-filling stops
        inner_max: cap on water-filling passes, gradient steps per ascent sweep
            and halvings
        outer_max: cap on alternating rounds and on ascent sweeps per phase update
    """
    damping: float = 0.5
    armijo_init: float = 1.0
    step_rule: Literal['fixed', 'spectral'] = 'spectral'
    armijo_shrink: float = 0.5
    armijo_slope: float = 1e-4
    ao_tolerance: float = 1e-6
    power_tolerance: float = 1e-6
    inner_max: int = 100
    outer_max: int = 100

    @validator('damping')
    def damping_range(cls, v):
        if not 0 < v <= 1:
            raise ValueError('damping must lie in (0, 1]')
        return v

    @validator('armijo_shrink')
    def shrink_range(cls, v):
        if not 0 < v < 1:
            raise ValueError('armijo_shrink must lie in (0, 1)')
        return v

    @validator('armijo_init', 'armijo_slope', 'ao_tolerance', 'power_tolerance')
    def positive(cls, v):
        if not v > 0:
            raise ValueError('must be positive')
        return v

    @validator('inner_max', 'outer_max')
    def at_least_one(cls, v):
        if v < 1:
            raise ValueError('must be >= 1')
        return v


class SweepSpec(ConfigSection):
    """
    One experiment axis.

    Attributes:
        axis: parameter being swept, one of L, K, PT, N
        values: values taken by the axis
        schemes: schemes evaluated on every trial
        trials: independent channel realizations per value
        codebook_size: candidates of the codebook scheme, 10*L*N when unset
    """
    axis: SweepAxis = 'L'
    values: List[float] = Field(default_factory=lambda: [float(x) for x in range(1, 11)])
    schemes: List[Scheme] = Field(default_factory=lambda: list(SCHEMES))
    trials: int = 100
    codebook_size: Optional[int] = None

    @validator('values', 'schemes')
    def nonempty(cls, v):
        if len(v) == 0:
            raise ValueError('must not be empty')
        return v

    @validator('values')
    def distinct_values(cls, v):
        if len(set(v)) != len(v):
            raise ValueError('axis values must be distinct')
        return v

    @validator('schemes')
    def unique_schemes(cls, v):
        return [s for s in SCHEMES if s in v]

    @validator('trials')
    def at_least_one(cls, v):
        if v < 1:
            raise ValueError('must be >= 1')
        return v

    @validator('codebook_size')
    def positive_codebook(cls, v):
        if v is not None and v < 1:
            raise ValueError('codebook size must be >= 1')
        return v


class SimConfig(ExtendedBaseModel):
    """
    Complete simulation configuration: one yaml file with `system`,
    `geometry`, `channel`, `optimizer` and an optional `sweep` section.
    Absent fields take the values of the reference setup (28 GHz, 7 layers
    of 7x7 meta-atoms spanning 5 wavelengths, 4 users, 10 dBm).
    """
    version: Optional[str] = "1.0"
    system: SystemConfig = Field(default_factory=SystemConfig)
    geometry: GeometryConfig = Field(default_factory=GeometryConfig)
    channel: ChannelConfig = Field(default_factory=ChannelConfig)
    optimizer: OptimizerParams = Field(default_factory=OptimizerParams)
    sweep: Optional[SweepSpec] = None

    class Config:
        extra = Extra.forbid

    @classmethod
    def parse(cls, data: Optional[Dict[str, Any]] = None):
        """
        Validate plain data, raising `ConfigurationError` with the field
        path of every invalid entry
        """
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"configuration must be a mapping, got {type(data).__name__}")
        try:
            return cls(**data)
        except ValidationError as exc:
            raise ConfigurationError.from_validation(exc) from None

    @classmethod
    def read(cls, path):
        """
        Read configuration from specified yaml file
        """
        path = Path(path).expanduser()
        if not path.is_file():
            raise ConfigurationError(f"file does not exist: {path}")

        try:
            with open(path, 'r') as f:
                data = safe_loader(f, Loader=Loader)
        except YAMLError as exc:
            raise ConfigurationError(f"malformed yaml in {path}: {exc}") from None

        config = cls.parse(data)
        logger.debug(f"Loaded configuration from {path}")
        return config

    def write(self, path):
        """
        Write configuration to a yaml file that `read` loads back to an
        identical model
        """
        path = Path(path)
        try:
            with open(path, 'w') as f:
                dump_yaml(self.dict(), f)
        except OSError as exc:
            raise OutputError(f"cannot write to {path}: {exc.strerror or exc}") from None
        return path

    def with_axis(self, axis: SweepAxis, value: float):
        """
        Return a copy of this configuration with one sweep axis set to `value`
        """
        data = self.dict()
        if axis in ('L', 'K', 'N') and not float(value).is_integer():
            raise ConfigurationError(f"{axis}={value} must be a whole number")
        if axis == 'L':
            data['geometry']['L'] = int(value)
        elif axis == 'K':
            data['system']['K'] = data['system']['M'] = int(value)
        elif axis == 'PT':
            data['system']['P_T'] = float(value)
        elif axis == 'N':
            side = math.isqrt(int(value))
            if side * side != int(value):
                raise ConfigurationError(f"N={value} is not a perfect square")
            data['geometry']['N_x'] = data['geometry']['N_y'] = side
        else:
            raise ConfigurationError(f"unknown sweep axis '{axis}'")
        return type(self).parse(data)

    @property
    def N(self) -> int:
        return self.geometry.N_x * self.geometry.N_y

    @property
    def L(self) -> int:
        return self.geometry.L

    @property
    def K(self) -> int:
        return self.system.K

    @property
    def M(self) -> int:
        return self.system.M

    @property
    def wavelength(self) -> float:
        return wavelength(self.system.carrier_freq)

    @property
    def d_layer(self) -> float:
        return self.geometry.T_SIM * self.wavelength / self.geometry.L

    @property
    def meta_atom_size(self):
        half = self.wavelength / 2
        return (self.geometry.get('d_x', half), self.geometry.get('d_y', half))

    @property
    def transmit_power_mw(self) -> float:
        return float(dbm_to_mw(self.system.P_T))

    @property
    def noise_power_mw(self) -> float:
        return float(dbm_to_mw(self.channel.noise_power))

    @property
    def antenna_gain(self) -> float:
        """Combined BS and user antenna gain, linear"""
        return float(db_to_linear(self.channel.gain_bs + self.channel.gain_ue))

    def geometry_key(self):
        """Hashable key of everything the geometry and propagation stack depend on"""
        return (self.N, self.L, self.M,
                self.system.carrier_freq,
                tuple(self.geometry.dict().items()))


def load_config(path=None) -> SimConfig:
    """
    Load a `SimConfig` from yaml, returning the reference setup when no
    path is given
    """
    if path is None:
        return SimConfig()
    return SimConfig.read(path)
