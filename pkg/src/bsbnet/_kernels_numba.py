"""numba-compiled kernels mirroring ``_kernels_numpy`` one for one.

Every inner product goes through ``_row_dot`` (four interleaved partial
sums, no fastmath), so the fixed-point scan and the recall loop round
identically to each other. They may differ from numpy/BLAS in the last bit.
"""
import numpy as np
from numba import njit

from ._kernels_numpy import (
    CONVERGED,
    DIVERGED,
    DIVERGED_CODE,
    MAX_ITERS,
    NONSATURATED_CODE,
    UNCONVERGED_CODE,
    codes_from_states,
    states_from_codes,
)

__all__ = [
    "CONVERGED", "MAX_ITERS", "DIVERGED",
    "UNCONVERGED_CODE", "NONSATURATED_CODE", "DIVERGED_CODE",
    "field", "step", "energy", "recall", "trajectory", "recall_batch",
    "states_from_codes", "codes_from_states",
    "fixed_point_mask", "basin_codes", "connectivity_mask",
]


@njit(cache=True, inline="always")
def _row_dot(w, i, s):
    d = s.shape[0]
    a0 = 0.0
    a1 = 0.0
    a2 = 0.0
    a3 = 0.0
    j = 0
    while j + 4 <= d:
        a0 += w[i, j] * s[j]
        a1 += w[i, j + 1] * s[j + 1]
        a2 += w[i, j + 2] * s[j + 2]
        a3 += w[i, j + 3] * s[j + 3]
        j += 4
    while j < d:
        a0 += w[i, j] * s[j]
        j += 1
    return (a0 + a1) + (a2 + a3)


@njit(cache=True)
def _field_into(state, probe, w, b, gamma, eta, theta, u):
    d = state.shape[0]
    finite = True
    for i in range(d):
        acc = _row_dot(w, i, state)
        v = gamma * state[i] + eta * (acc + b[i]) + theta * probe[i]
        u[i] = v
        if not np.isfinite(v):
            finite = False
    return finite


@njit(cache=True)
def _clip_into(u, state):
    """Writes clip(u) into state and returns the max-norm change."""
    delta = 0.0
    for i in range(u.shape[0]):
        v = u[i]
        if v > 1.0:
            v = 1.0
        elif v < -1.0:
            v = -1.0
        diff = abs(v - state[i])
        if diff > delta:
            delta = diff
        state[i] = v
    return delta


@njit(cache=True)
def _energy(state, w, b):
    d = state.shape[0]
    quad = 0.0
    for i in range(d):
        quad += state[i] * _row_dot(w, i, state)
    lin = 0.0
    for i in range(d):
        lin += b[i] * state[i]
    return -0.5 * quad - lin


@njit(cache=True)
def field(state, probe, w, b, gamma, eta, theta):
    u = np.empty(state.shape[0])
    _field_into(state, probe, w, b, gamma, eta, theta, u)
    return u


@njit(cache=True)
def _step(state, probe, w, b, gamma, eta, theta):
    u = np.empty(state.shape[0])
    finite = _field_into(state, probe, w, b, gamma, eta, theta, u)
    out = np.zeros(state.shape[0])
    _clip_into(u, out)
    return out, finite


def step(state, probe, w, b, gamma, eta, theta):
    out, finite = _step(state, probe, w, b, gamma, eta, theta)
    return out, bool(finite)


energy = _energy


@njit(cache=True)
def _recall_into(probe, w, b, gamma, eta, theta, max_iters, tol, state, u, energies):
    d = probe.shape[0]
    for i in range(d):
        state[i] = probe[i]
    record = energies.shape[0] > 0
    for it in range(1, max_iters + 1):
        if not _field_into(state, probe, w, b, gamma, eta, theta, u):
            return it, DIVERGED
        delta = _clip_into(u, state)
        if record:
            energies[it - 1] = _energy(state, w, b)
        if delta <= tol:
            return it, CONVERGED
    return max_iters, MAX_ITERS


@njit(cache=True)
def _recall(probe, w, b, gamma, eta, theta, max_iters, tol, record_energy):
    d = probe.shape[0]
    state = np.empty(d)
    u = np.empty(d)
    energies = np.empty(max_iters if record_energy else 0)
    it, status = _recall_into(probe, w, b, gamma, eta, theta, max_iters, tol, state, u, energies)
    n_e = it if status != DIVERGED else it - 1
    if not record_energy:
        n_e = 0
    return state, it, status, energies[:n_e].copy()


def recall(probe, w, b, gamma, eta, theta, max_iters, tol, record_energy):
    state, it, status, energies = _recall(
        probe, w, b, gamma, eta, theta, max_iters, tol, record_energy
    )
    return state, int(it), int(status), energies


@njit(cache=True)
def _trajectory(probe, w, b, gamma, eta, theta, max_iters, tol):
    d = probe.shape[0]
    hist = np.empty((max_iters + 1, d))
    hist[0, :] = probe
    state = probe.copy()
    u = np.empty(d)
    for it in range(1, max_iters + 1):
        if not _field_into(state, probe, w, b, gamma, eta, theta, u):
            return hist[:it].copy(), DIVERGED
        delta = _clip_into(u, state)
        hist[it, :] = state
        if delta <= tol:
            return hist[: it + 1].copy(), CONVERGED
    return hist, MAX_ITERS


def trajectory(probe, w, b, gamma, eta, theta, max_iters, tol):
    hist, status = _trajectory(probe, w, b, gamma, eta, theta, max_iters, tol)
    return hist, int(status)


@njit(cache=True)
def recall_batch(probes, w, b, gamma, eta, theta, max_iters, tol):
    n, d = probes.shape
    states = np.empty((n, d))
    iters = np.zeros(n, dtype=np.int64)
    status = np.empty(n, dtype=np.int8)
    u = np.empty(d)
    none = np.empty(0)
    for k in range(n):
        it, st = _recall_into(
            probes[k], w, b, gamma, eta, theta, max_iters, tol, states[k], u, none
        )
        iters[k] = it
        status[k] = st
    return states, iters, status


@njit(cache=True)
def fixed_point_mask(d, w, b, gamma, eta, theta):
    n = 1 << d
    out = np.zeros(n, dtype=np.bool_)
    s = np.empty(d)
    for code in range(n):
        for i in range(d):
            s[i] = 1.0 if (code >> (d - 1 - i)) & 1 else -1.0
        ok = True
        for i in range(d):
            acc = _row_dot(w, i, s)
            u = gamma * s[i] + eta * (acc + b[i]) + theta * s[i]
            if not (s[i] * u >= 1.0):
                ok = False
                break
        out[code] = ok
    return out


@njit(cache=True)
def basin_codes(d, w, b, gamma, eta, theta, max_iters, tol):
    n = 1 << d
    out = np.empty(n, dtype=np.int64)
    probe = np.empty(d)
    state = np.empty(d)
    u = np.empty(d)
    none = np.empty(0)
    for code in range(n):
        for i in range(d):
            probe[i] = 1.0 if (code >> (d - 1 - i)) & 1 else -1.0
        _, st = _recall_into(probe, w, b, gamma, eta, theta, max_iters, tol, state, u, none)
        if st == DIVERGED:
            out[code] = DIVERGED_CODE
        elif st == MAX_ITERS:
            out[code] = UNCONVERGED_CODE
        else:
            final = 0
            for i in range(d):
                if state[i] == 1.0:
                    final = (final << 1) | 1
                elif state[i] == -1.0:
                    final = final << 1
                else:
                    final = NONSATURATED_CODE
                    break
            out[code] = final
    return out


@njit(cache=True)
def _connectivity_mask(d, connectivity, seed, symmetric):
    mask = np.ones((d, d), dtype=np.bool_)
    state = seed
    a = np.uint64(6364136223846793005)
    c = np.uint64(1442695040888963407)
    shift = np.uint64(11)
    scale = 1.0 / 9007199254740992.0
    for i in range(d):
        start = i + 1 if symmetric else 0
        for j in range(start, d):
            if i == j:
                continue
            state = state * a + c
            keep = float(state >> shift) * scale < connectivity
            mask[i, j] = keep
            if symmetric:
                mask[j, i] = keep
    return mask


def connectivity_mask(d, connectivity, seed, symmetric):
    return _connectivity_mask(d, float(connectivity), np.uint64(seed & ((1 << 64) - 1)), bool(symmetric))
