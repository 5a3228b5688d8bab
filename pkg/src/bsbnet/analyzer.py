"""Exhaustive and sampled attractor analysis over the saturated corners.

Saturated state ``s`` of dimension ``d`` is indexed by the integer whose
binary digits, most significant first, are ``s > 0``. A corner ``s`` is a
fixed point of the update with ``probe = s`` iff for every unit

    s_i * (gamma * s_i + eta * ((W s)_i + b_i) + theta * s_i) >= 1

which is exactly the condition that clamping leaves ``s_i`` unchanged.
"""
from dataclasses import dataclass, field
import hashlib
import json

import numpy as np

from . import kernels
from .core import BsbParams, WeightMatrix, energy, is_saturated
from .errors import EnumerationBoundError
from .training import PatternSet

__all__ = [
    "STORED",
    "NEGATIVE",
    "SPURIOUS",
    "FIXED_POINT_MAX_D",
    "BASIN_MAX_D",
    "AttractorCensus",
    "SampleStats",
    "TrajectoryIssue",
    "StabilityReport",
    "pattern_digest",
    "enumerate_fixed_points",
    "basin_map",
    "sample_basins",
    "check_global_stability",
    "is_fixed_point",
]

STORED, NEGATIVE, SPURIOUS = "stored", "negative_of_stored", "spurious"
FIXED_POINT_MAX_D = 24
BASIN_MAX_D = 20


def pattern_digest(x):
    """SHA-256 over the pattern as signed bytes (+1 -> 0x01, -1 -> 0xff)."""
    x = np.asarray(x)
    return hashlib.sha256(np.where(x > 0, 1, -1).astype(np.int8).tobytes()).digest()


def _stored_digests(patterns):
    if patterns is None:
        return frozenset()
    if isinstance(patterns, (set, frozenset)):
        return frozenset(patterns)
    if not isinstance(patterns, PatternSet):
        patterns = PatternSet(patterns)
    return frozenset(pattern_digest(x) for x in patterns)


def _classify(state, digests):
    if pattern_digest(state) in digests:
        return STORED
    if pattern_digest(-state) in digests:
        return NEGATIVE
    return SPURIOUS


@dataclass
class AttractorCensus:
    """Fixed points of the saturated corners and, optionally, their basins.

    ``basin_sizes`` is aligned with ``fixed_point_codes`` and empty when only
    the fixed-point scan ran. The probe counts always partition ``2**d``
    once basins are mapped: basins + unconverged + nonsaturated + diverged
    + ``other_saturated`` (converged to a corner that failed the exact
    fixed-point test, expected to be zero).
    """

    dimension: int
    pattern_count: int
    params: BsbParams
    fixed_point_codes: np.ndarray
    classification: list
    basin_sizes: list = field(default_factory=list)
    unconverged: int = 0
    nonsaturated: int = 0
    diverged: int = 0
    other_saturated: int = 0

    @property
    def fixed_points(self):
        return kernels.impl.states_from_codes(self.fixed_point_codes, self.dimension)

    @property
    def fixed_point_count(self):
        return len(self.fixed_point_codes)

    def count(self, kind):
        return sum(1 for c in self.classification if c == kind)

    @property
    def stored_count(self):
        return self.count(STORED)

    @property
    def negative_count(self):
        return self.count(NEGATIVE)

    @property
    def spurious_count(self):
        return self.count(SPURIOUS)

    @property
    def has_basins(self):
        return len(self.basin_sizes) == len(self.fixed_point_codes) and (
            len(self.basin_sizes) > 0 or self.unconverged + self.nonsaturated + self.diverged > 0
        )

    def contains(self, x):
        code = int(kernels.impl.codes_from_states(np.asarray(x, dtype=np.float64))[0])
        i = np.searchsorted(self.fixed_point_codes, code)
        return bool(i < len(self.fixed_point_codes) and self.fixed_point_codes[i] == code)

    def to_dict(self):
        d = {
            "dimension": self.dimension,
            "pattern_count": self.pattern_count,
            "fixed_point_count": self.fixed_point_count,
            "stored_count": self.stored_count,
            "negative_count": self.negative_count,
            "spurious_count": self.spurious_count,
            "basin_sizes": [int(v) for v in self.basin_sizes],
            "unconverged": int(self.unconverged),
            "nonsaturated": int(self.nonsaturated),
            "diverged": int(self.diverged),
            "fixed_points": [
                "".join("+" if v > 0 else "-" for v in s) for s in self.fixed_points
            ],
            "classification": list(self.classification),
            "params": {
                "gamma": self.params.gamma,
                "eta": self.params.eta,
                "theta": self.params.theta,
                "max_iters": self.params.max_iters,
                "convergence_tol": self.params.convergence_tol,
            },
        }
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self):
        lines = [
            f"dimension {self.dimension}",
            f"pattern_count {self.pattern_count}",
            f"fixed_point_count {self.fixed_point_count}",
            f"stored_count {self.stored_count}",
            f"negative_count {self.negative_count}",
            f"spurious_count {self.spurious_count}",
        ]
        if self.basin_sizes or self.unconverged or self.nonsaturated or self.diverged:
            lines += [
                f"unconverged {self.unconverged}",
                f"nonsaturated {self.nonsaturated}",
                f"diverged {self.diverged}",
            ]
        for k, (s, kind) in enumerate(zip(self.fixed_points, self.classification)):
            tokens = "".join("+" if v > 0 else "-" for v in s)
            basin = f" basin {self.basin_sizes[k]}" if k < len(self.basin_sizes) else ""
            lines.append(f"fixed {tokens} {kind}{basin}")
        return "\n".join(lines)


def _check_bound(d, bound, what):
    if d > bound:
        raise EnumerationBoundError(
            f"{what} enumerates 2**{d} states; the bound is d <= {bound}. Use sample_basins instead."
        )


def is_fixed_point(s, net, params):
    """Exact corner fixed-point test (probe = s)."""
    s = np.asarray(s, dtype=np.float64)
    if not is_saturated(s):
        return False
    u = params.gamma * s + params.eta * (net.w @ s + net.b) + params.theta * s
    return bool(np.all(s * u >= 1.0))


def enumerate_fixed_points(net, params=None, patterns=None, max_d=FIXED_POINT_MAX_D):
    """Test all ``2**d`` corners and classify the fixed points.

    ``patterns`` is a :class:`PatternSet`, an array of patterns, or a set of
    :func:`pattern_digest` values (as persisted with a trained network).
    """
    params = params or BsbParams()
    _check_bound(net.d, min(max_d, FIXED_POINT_MAX_D), "fixed-point enumeration")
    digests = _stored_digests(patterns)
    mask = kernels.impl.fixed_point_mask(
        net.d, net.w, net.b, params.gamma, params.eta, params.theta
    )
    codes = np.flatnonzero(mask).astype(np.int64)
    states = kernels.impl.states_from_codes(codes, net.d)
    return AttractorCensus(
        dimension=net.d,
        pattern_count=len(digests),
        params=params,
        fixed_point_codes=codes,
        classification=[_classify(s, digests) for s in states],
    )


def basin_map(net, params=None, patterns=None, max_d=BASIN_MAX_D):
    """Recall from every corner and tally where each trajectory ends."""
    params = params or BsbParams()
    _check_bound(net.d, min(max_d, BASIN_MAX_D), "basin mapping")
    census = enumerate_fixed_points(net, params, patterns)
    ends = kernels.impl.basin_codes(
        net.d, net.w, net.b, params.gamma, params.eta, params.theta,
        int(params.max_iters), params.convergence_tol,
    )
    census.unconverged = int(np.count_nonzero(ends == kernels.UNCONVERGED_CODE))
    census.nonsaturated = int(np.count_nonzero(ends == kernels.NONSATURATED_CODE))
    census.diverged = int(np.count_nonzero(ends == kernels.DIVERGED_CODE))
    landed = ends[ends >= 0]
    finals, counts = np.unique(landed, return_counts=True)
    fp = census.fixed_point_codes
    hit = np.isin(finals, fp)
    sizes = np.zeros(len(fp), dtype=np.int64)
    sizes[np.searchsorted(fp, finals[hit])] = counts[hit]
    census.basin_sizes = sizes.tolist()
    census.other_saturated = int(counts[~hit].sum())
    return census


@dataclass
class SampleStats:
    n_samples: int
    noise_flips: int
    successes: int
    unconverged: int
    per_pattern_trials: list
    per_pattern_successes: list

    @property
    def success_fraction(self):
        return self.successes / self.n_samples


def sample_basins(net, params, patterns, n_samples, noise_flips, seed=0):
    """Corrupt randomly chosen stored patterns by ``noise_flips`` distinct bit
    flips and report how often recall returns the exact original."""
    params = params or BsbParams()
    if not isinstance(patterns, PatternSet):
        patterns = PatternSet(patterns)
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if not 0 <= noise_flips <= patterns.d:
        raise ValueError(f"noise_flips must be in 0..{patterns.d}")
    rng = np.random.default_rng(seed)
    which = rng.integers(0, patterns.m, size=n_samples)
    probes = patterns.patterns[which].copy()
    for k in range(n_samples):
        flip = rng.choice(patterns.d, size=noise_flips, replace=False)
        probes[k, flip] *= -1.0
    finals, _, status = kernels.impl.recall_batch(
        probes, net.w, net.b, params.gamma, params.eta, params.theta,
        int(params.max_iters), params.convergence_tol,
    )
    ok = (status == kernels.CONVERGED) & np.all(finals == patterns.patterns[which], axis=1)
    trials = np.bincount(which, minlength=patterns.m)
    wins = np.bincount(which[ok], minlength=patterns.m)
    return SampleStats(
        n_samples=n_samples,
        noise_flips=noise_flips,
        successes=int(ok.sum()),
        unconverged=int(np.count_nonzero(status == kernels.MAX_ITERS)),
        per_pattern_trials=trials.tolist(),
        per_pattern_successes=wins.tolist(),
    )


@dataclass
class TrajectoryIssue:
    trial: int
    start: np.ndarray
    cycle_period: int  # 0 when no exact repetition was found
    energy_monotone: bool
    saturated: bool


@dataclass
class StabilityReport:
    """Trajectories that used up ``max_iters``.

    An empty report does not prove global stability: only the sampled
    starts were run.
    """

    trials: int
    issues: list

    @property
    def empty(self):
        return not self.issues

    @property
    def oscillating(self):
        return [i for i in self.issues if i.cycle_period > 1]


def _cycle_period(hist, max_period):
    last = hist[-1]
    for p in range(1, min(max_period, len(hist) - 1) + 1):
        if np.array_equal(hist[-1 - p], last):
            return p
    return 0


def check_global_stability(net, params=None, trials=100, seed=0, max_period=8, energy_tol=1e-9):
    """Run recall from random interior states and report the ones that never settle.

    Each reported trajectory carries the smallest period ``p <= max_period``
    with ``x[T] == x[T - p]`` exactly (0 if none) and whether its energy was
    non-increasing within ``energy_tol`` throughout.
    """
    params = params or BsbParams()
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    issues = []
    for t in range(trials):
        start = rng.uniform(-1.0, 1.0, size=net.d)
        hist, status = kernels.impl.trajectory(
            start, net.w, net.b, params.gamma, params.eta, params.theta,
            int(params.max_iters), params.convergence_tol,
        )
        if status == kernels.CONVERGED:
            continue
        e = np.array([kernels.impl.energy(h, net.w, net.b) for h in hist])
        issues.append(
            TrajectoryIssue(
                trial=t,
                start=start,
                cycle_period=_cycle_period(hist, max_period),
                energy_monotone=bool(np.all(np.diff(e) <= energy_tol)),
                saturated=is_saturated(hist[-1]),
            )
        )
    return StabilityReport(trials=trials, issues=issues)
