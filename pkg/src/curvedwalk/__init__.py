"""Paired quantum walks whose continuum limit is scalar transport with tunable speed."""
from .conditions import (
    CoinSpec,
    check_first_fixed,
    check_norm_constraint,
    check_zeroth,
    gamma1_residual,
    gamma2_residual,
    speed_candidates,
    speed_of,
)
from .evolution import ConfigurationError, SimConfig, run
from .fixed import FixedBuildOptions, build_fixed_coin, build_multispeed_coin, build_pm_coexistence_coin
from .grouping import CoarseGroupedState, Encoding, FineField, build_encoding, group, ungroup
from .linalg import DegenerateInputError, InfeasibleError, complete_unitary, is_unitary, rotate_between
from .metric import MetricProfile
from .tiled import density_from_speed, speed_from_density, tiled_coin, tiled_spec, tiled_vectors

__version__ = "0.1.0"
