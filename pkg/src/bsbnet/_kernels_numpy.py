"""Pure-numpy kernels. Reference path, and the fallback when numba is off."""
import numpy as np

CONVERGED, MAX_ITERS, DIVERGED = 0, 1, 2

# basin codes below zero
UNCONVERGED_CODE, NONSATURATED_CODE, DIVERGED_CODE = -1, -2, -3

_CHUNK = 1 << 15
_MASK64 = (1 << 64) - 1
_LCG_A = 6364136223846793005
_LCG_C = 1442695040888963407


def field(state, probe, w, b, gamma, eta, theta):
    return gamma * state + eta * (w @ state + b) + theta * probe


def step(state, probe, w, b, gamma, eta, theta):
    u = field(state, probe, w, b, gamma, eta, theta)
    return np.clip(u, -1.0, 1.0), bool(np.isfinite(u).all())


def energy(state, w, b):
    return -0.5 * (state @ (w @ state)) - b @ state


def recall(probe, w, b, gamma, eta, theta, max_iters, tol, record_energy):
    state = probe.copy()
    energies = np.empty(max_iters if record_energy else 0)
    status = MAX_ITERS
    it = 0
    for it in range(1, max_iters + 1):
        u = field(state, probe, w, b, gamma, eta, theta)
        if not np.isfinite(u).all():
            status = DIVERGED
            break
        new = np.clip(u, -1.0, 1.0)
        delta = np.max(np.abs(new - state))
        state = new
        if record_energy:
            energies[it - 1] = energy(state, w, b)
        if delta <= tol:
            status = CONVERGED
            break
    n_e = it if status != DIVERGED else it - 1
    return state, it, status, energies[:n_e] if record_energy else energies


def trajectory(probe, w, b, gamma, eta, theta, max_iters, tol):
    """All visited states, row 0 being the probe."""
    hist = np.empty((max_iters + 1, probe.shape[0]))
    hist[0] = probe
    state = probe.copy()
    status = MAX_ITERS
    it = 0
    for it in range(1, max_iters + 1):
        u = field(state, probe, w, b, gamma, eta, theta)
        if not np.isfinite(u).all():
            status = DIVERGED
            it -= 1
            break
        new = np.clip(u, -1.0, 1.0)
        delta = np.max(np.abs(new - state))
        state = new
        hist[it] = state
        if delta <= tol:
            status = CONVERGED
            break
    return hist[: it + 1], status


def recall_batch(probes, w, b, gamma, eta, theta, max_iters, tol):
    n = probes.shape[0]
    states = probes.copy()
    iters = np.zeros(n, dtype=np.int64)
    status = np.full(n, MAX_ITERS, dtype=np.int8)
    active = np.arange(n)
    wt = np.ascontiguousarray(w.T)
    for it in range(1, max_iters + 1):
        if active.size == 0:
            break
        s = states[active]
        u = gamma * s + eta * (s @ wt + b) + theta * probes[active]
        finite = np.isfinite(u).all(axis=1)
        new = np.clip(u, -1.0, 1.0)
        delta = np.abs(new - s).max(axis=1)
        states[active[finite]] = new[finite]
        iters[active] = it
        done = finite & (delta <= tol)
        status[active[done]] = CONVERGED
        status[active[~finite]] = DIVERGED
        active = active[finite & ~done]
    return states, iters, status


def states_from_codes(codes, d):
    shifts = np.arange(d - 1, -1, -1, dtype=np.int64)
    bits = (np.asarray(codes, dtype=np.int64)[:, None] >> shifts) & 1
    return 2.0 * bits - 1.0


def codes_from_states(states):
    states = np.atleast_2d(states)
    d = states.shape[1]
    weights = np.left_shift(np.int64(1), np.arange(d - 1, -1, -1, dtype=np.int64))
    return (states > 0).astype(np.int64) @ weights


def fixed_point_mask(d, w, b, gamma, eta, theta):
    n = 1 << d
    out = np.empty(n, dtype=bool)
    wt = np.ascontiguousarray(w.T)
    for lo in range(0, n, _CHUNK):
        codes = np.arange(lo, min(n, lo + _CHUNK), dtype=np.int64)
        s = states_from_codes(codes, d)
        u = gamma * s + eta * (s @ wt + b) + theta * s
        out[lo : lo + codes.size] = (s * u >= 1.0).all(axis=1)
    return out


def basin_codes(d, w, b, gamma, eta, theta, max_iters, tol):
    n = 1 << d
    out = np.empty(n, dtype=np.int64)
    for lo in range(0, n, _CHUNK):
        codes = np.arange(lo, min(n, lo + _CHUNK), dtype=np.int64)
        probes = states_from_codes(codes, d)
        finals, _, status = recall_batch(probes, w, b, gamma, eta, theta, max_iters, tol)
        sat = (np.abs(finals) == 1.0).all(axis=1)
        res = np.where(sat, codes_from_states(finals), NONSATURATED_CODE)
        res[status == MAX_ITERS] = UNCONVERGED_CODE
        res[status == DIVERGED] = DIVERGED_CODE
        out[lo : lo + codes.size] = res
    return out


def connectivity_mask(d, connectivity, seed, symmetric):
    mask = np.ones((d, d), dtype=bool)
    state = seed & _MASK64
    for i in range(d):
        for j in range(i + 1 if symmetric else 0, d):
            if i == j:
                continue
            state = (state * _LCG_A + _LCG_C) & _MASK64
            keep = (state >> 11) * (1.0 / 9007199254740992.0) < connectivity
            mask[i, j] = keep
            if symmetric:
                mask[j, i] = keep
    return mask
