from .covariance import SpatialCovariance, build_covariance, covariance_factor
from .sampling import (ChannelSet, path_loss, sample_channels, draw_channels,
                       trial_seed, stream, STREAM_CHANNEL, STREAM_PHASES, STREAM_CODEBOOK)
