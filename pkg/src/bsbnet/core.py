"""Brain-state-in-a-box dynamics.

One synchronous update is

    x <- f(gamma * x + eta * (W @ x + b) + theta * probe)

with ``f`` the clamp to [-1, 1]. ``probe`` is the original input and stays
fixed for the whole recall. The classic single-gain form
``x <- f(x + g * (W @ x + b))`` is ``gamma=1, eta=g, theta=0``.

States are plain 1-D float64 arrays with entries in [-1, 1].
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .errors import DimensionError, DivergenceError

__all__ = [
    "BsbParams",
    "WeightMatrix",
    "RecallTrace",
    "threshold",
    "step",
    "recall",
    "energy",
    "is_saturated",
    "saturate",
    "as_state",
]


@dataclass(frozen=True)
class BsbParams:
    gamma: float = 1.0
    eta: float = 0.1
    theta: float = 0.0
    max_iters: int = 200
    convergence_tol: float = 1e-9

    def __post_init__(self):
        for name in ("gamma", "eta", "theta", "convergence_tol"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite non-negative real, got {value!r}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters!r}")
        if self.gamma == 0 and self.eta == 0 and self.theta == 0:
            raise ValueError("gamma, eta and theta cannot all be zero")


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Connection matrix ``w`` (d x d) and bias ``b`` (d,). Read-only arrays."""

    w: np.ndarray
    b: np.ndarray = None

    def __post_init__(self):
        w = np.array(self.w, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise DimensionError(f"weight matrix must be square and non-empty, got shape {w.shape}")
        b = np.zeros(w.shape[0]) if self.b is None else np.array(self.b, dtype=np.float64)
        if b.shape != (w.shape[0],):
            raise DimensionError(f"bias has shape {b.shape}, expected ({w.shape[0]},)")
        w.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", b)

    @property
    def d(self):
        return self.w.shape[0]

    def is_symmetric(self):
        return bool(np.array_equal(self.w, self.w.T))

    def __eq__(self, other):
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return self.w.tobytes() == other.w.tobytes() and self.b.tobytes() == other.b.tobytes() \
            and self.w.shape == other.w.shape


@dataclass
class RecallTrace:
    final_state: np.ndarray
    iterations_used: int
    converged: bool
    energy_series: list = field(default_factory=list)

    @property
    def saturated(self):
        return is_saturated(self.final_state)


def as_state(x, d=None, name="state"):
    """Validate ``x`` as a box state and return it as a float64 array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionError(f"{name} must be a non-empty 1-D vector, got shape {arr.shape}")
    if d is not None and arr.size != d:
        raise DimensionError(f"{name} has dimension {arr.size}, expected {d}")
    if not np.isfinite(arr).all():
        raise DivergenceError(f"{name} contains non-finite values")
    if np.any(np.abs(arr) > 1.0):
        raise ValueError(f"{name} has entries outside [-1, 1]")
    return arr


def is_saturated(x):
    return bool(np.all(np.abs(np.asarray(x)) == 1.0))


def saturate(x):
    """Sign of each entry; exact zeros map to +1."""
    return np.where(np.asarray(x) < 0, -1.0, 1.0)


def threshold(x):
    """Clamp a scalar to [-1, 1]."""
    x = float(x)
    if not math.isfinite(x):
        raise DivergenceError(f"non-finite activation {x!r}")
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


def _check_net(net, d):
    if net.d != d:
        raise DimensionError(f"network has dimension {net.d}, vector has {d}")


def step(state, probe, net, params):
    """One synchronous update of ``state`` with ``probe`` as the held input."""
    state = as_state(state)
    probe = as_state(probe, state.size, "probe")
    _check_net(net, state.size)
    out, finite = kernels.impl.step(state, probe, net.w, net.b, params.gamma, params.eta, params.theta)
    if not finite:
        raise DivergenceError("non-finite activation during step")
    return out


def recall(probe, net, params=None, record_energy=False):
    """Iterate :func:`step` from ``probe`` until the max-norm change is at most
    ``params.convergence_tol`` or ``params.max_iters`` steps have run.

    Hitting ``max_iters`` returns a trace with ``converged=False``; a
    non-finite activation raises :class:`DivergenceError` instead.
    """
    params = params or BsbParams()
    probe = as_state(probe, name="probe")
    _check_net(net, probe.size)
    state, it, status, energies = kernels.impl.recall(
        probe, net.w, net.b, params.gamma, params.eta, params.theta,
        int(params.max_iters), params.convergence_tol, record_energy,
    )
    if status == kernels.DIVERGED:
        raise DivergenceError(f"non-finite activation at iteration {it}")
    return RecallTrace(
        final_state=state,
        iterations_used=it,
        converged=status == kernels.CONVERGED,
        energy_series=list(energies),
    )


def energy(state, net):
    """Quadratic energy ``-0.5 * x @ W @ x - b @ x``."""
    state = as_state(state)
    _check_net(net, state.size)
    return float(kernels.impl.energy(state, net.w, net.b))
