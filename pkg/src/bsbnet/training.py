"""Outer-product (Hebbian) construction of the connection matrix.

Each stored pattern ``x`` adds ``lr * outer(x, x)``. The diagonal of every
increment can be zeroed, and every increment is multiplied by a fixed 0/1
connectivity mask, so batch training is literally repeated incremental
training and the two agree bit for bit.

Connectivity mask
-----------------
Drawn from a 64-bit linear congruential generator

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64

seeded with ``mask_seed mod 2**64``. Each draw advances the state once and
yields ``u = (state >> 11) / 2**53``; the weight is kept iff
``u < connectivity``. With ``symmetric_mask`` the draws visit the pairs
``i < j`` in row-major order and set both ``(i, j)`` and ``(j, i)``;
otherwise every off-diagonal entry ``(i, j)`` is drawn in row-major order.
The diagonal is never masked (``zero_diagonal`` controls it).
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from . import kernels
from .core import WeightMatrix
from .errors import DimensionError, PatternError

__all__ = [
    "TrainingConfig",
    "PatternSet",
    "connectivity_mask",
    "train",
    "train_incremental",
    "set_bias",
    "suppression_bias",
]


@dataclass(frozen=True)
class TrainingConfig:
    lr: float = 1.0
    zero_diagonal: bool = True
    connectivity: float = 1.0
    mask_seed: int = 0
    symmetric_mask: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.lr) and self.lr > 0):
            raise ValueError(f"lr must be positive, got {self.lr!r}")
        if not (0 < self.connectivity <= 1):
            raise ValueError(f"connectivity must be in (0, 1], got {self.connectivity!r}")


class PatternSet:
    """A non-empty set of distinct saturated patterns of equal dimension."""

    def __init__(self, patterns, labels=None):
        arr = np.array(patterns, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise PatternError(f"need a non-empty list of equal-length patterns, got shape {arr.shape}")
        if not np.all(np.abs(arr) == 1.0):
            bad = int(np.argmax(~np.all(np.abs(arr) == 1.0, axis=1)))
            raise PatternError(f"pattern {bad} is not saturated (entries must be exactly +1 or -1)")
        _, first, counts = np.unique(arr, axis=0, return_index=True, return_counts=True)
        if np.any(counts > 1):
            raise PatternError(f"duplicate pattern (first copy at index {int(first[counts > 1][0])})")
        if labels is not None:
            labels = list(labels)
            if len(labels) != arr.shape[0]:
                raise PatternError(f"{len(labels)} labels for {arr.shape[0]} patterns")
        arr.flags.writeable = False
        self.patterns = arr
        self.labels = labels

    @property
    def m(self):
        return self.patterns.shape[0]

    @property
    def d(self):
        return self.patterns.shape[1]

    def __len__(self):
        return self.m

    def __iter__(self):
        return iter(self.patterns)


@lru_cache(maxsize=32)
def _cached_mask(d, connectivity, seed, symmetric):
    mask = kernels.impl.connectivity_mask(d, connectivity, seed, symmetric)
    mask.flags.writeable = False
    return mask


def connectivity_mask(d, config):
    """Boolean d x d mask of retained weights for ``config``."""
    if config.connectivity == 1.0:
        return np.ones((d, d), dtype=bool)
    return _cached_mask(d, float(config.connectivity), int(config.mask_seed), bool(config.symmetric_mask))


def _increment(x, config, mask):
    inc = config.lr * np.outer(x, x)
    if config.zero_diagonal:
        np.fill_diagonal(inc, 0.0)
    # where() rather than multiply: a masked negative entry must be +0.0, not -0.0
    return np.where(mask, inc, 0.0)


def _check_saturated(x):
    if not np.all(np.abs(x) == 1.0):
        raise PatternError("pattern is not saturated (entries must be exactly +1 or -1)")


def train(patterns, config=None):
    """Accumulate ``lr * x x^T`` over the patterns in index order.

    The bias of the result is zero; see :func:`set_bias`.
    """
    config = config or TrainingConfig()
    if not isinstance(patterns, PatternSet):
        patterns = PatternSet(patterns)
    d = patterns.d
    mask = connectivity_mask(d, config)
    w = np.zeros((d, d))
    for x in patterns:
        w += _increment(x, config, mask)
    return WeightMatrix(w)


def train_incremental(net, pattern, config=None):
    """Return a copy of ``net`` with one more pattern added; bias is kept."""
    config = config or TrainingConfig()
    x = np.asarray(pattern, dtype=np.float64)
    if x.ndim != 1 or x.size != net.d:
        raise DimensionError(f"pattern has shape {x.shape}, network dimension is {net.d}")
    _check_saturated(x)
    w = net.w + _increment(x, config, connectivity_mask(net.d, config))
    return WeightMatrix(w, net.b)


def set_bias(net, b):
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (net.d,):
        raise DimensionError(f"bias has shape {b.shape}, expected ({net.d},)")
    return WeightMatrix(net.w, b)


def suppression_bias(patterns, eps):
    """``eps * sum(patterns)``: breaks the x / -x symmetry in favour of the stored patterns."""
    if not isinstance(patterns, PatternSet):
        patterns = PatternSet(patterns)
    return eps * patterns.patterns.sum(axis=0)
