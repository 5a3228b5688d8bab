"""Brain-state-in-a-box associative memory and password authentication."""
from .core import BsbParams, RecallTrace, WeightMatrix, energy, recall, step, threshold
from .training import PatternSet, TrainingConfig, set_bias, suppression_bias, train, train_incremental
from .analyzer import (
    AttractorCensus,
    basin_map,
    check_global_stability,
    enumerate_fixed_points,
    sample_basins,
)
from .kernels import BACKEND

__version__ = "0.1.0"
