from .extensions import ExtendedBaseModel
from .config import (SimConfig, SystemConfig, GeometryConfig, ChannelConfig,
                     OptimizerParams, SweepSpec, load_config, SCHEMES)
from .results import SolveTrace, SolveResult, ResultRow, RESULT_COLUMNS
