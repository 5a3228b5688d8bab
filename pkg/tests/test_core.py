import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

import oracle
from bsbnet import BsbParams, WeightMatrix, energy, recall, step, threshold, train
from bsbnet.analyzer import is_fixed_point
from bsbnet.core import saturate
from bsbnet.errors import DimensionError, DivergenceError
from helpers import flip, random_patterns

W2 = WeightMatrix([[0.0, -1.0], [-1.0, 0.0]])


class TestThreshold:
    @pytest.mark.parametrize("x, expected", [(1.5, 1.0), (-2.0, -1.0), (0.3, 0.3), (0.0, 0.0),
                                             (1.0, 1.0), (-1.0, -1.0)])
    def test_examples(self, x, expected):
        assert threshold(x) == expected

    @pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
    def test_non_finite(self, bad):
        with pytest.raises(DivergenceError):
            threshold(bad)


class TestStep:
    def test_two_unit_hand_computed(self, backend):
        # u = [1 + 0.5*1, -1 + 0.5*(-1)] = [1.5, -1.5]
        out = step([1, -1], [1, -1], W2, BsbParams(gamma=1, eta=0.5, theta=0))
        assert out.tolist() == [1.0, -1.0]

    def test_identity_map(self, backend, rng):
        net = WeightMatrix(rng.normal(size=(5, 5)))
        s = rng.uniform(-1, 1, 5)
        out = step(s, s, net, BsbParams(gamma=1, eta=0, theta=0))
        assert np.array_equal(out, s)

    def test_pure_input_persistence(self, backend):
        out = step([0, 0], [1, 1], W2, BsbParams(gamma=0, eta=0, theta=1))
        assert out.tolist() == [1.0, 1.0]

    def test_interior_value(self, backend):
        # u = 0.5*[0.2, -0.4] + 0.25*(W@[0.2,-0.4]) = [0.1+0.1, -0.2-0.05]
        out = step([0.2, -0.4], [0.2, -0.4], W2, BsbParams(gamma=0.5, eta=0.25, theta=0))
        np.testing.assert_allclose(out, [0.2, -0.25], rtol=0, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            step([1, -1, 1], [1, -1, 1], W2, BsbParams())
        with pytest.raises(DimensionError):
            step([1, -1], [1, -1, 1], W2, BsbParams())

    def test_divergence(self):
        net = WeightMatrix([[0.0, np.inf], [np.inf, 0.0]])
        with pytest.raises(DivergenceError):
            step([1, -1], [1, -1], net, BsbParams())

    def test_matches_oracle(self, backend, rng):
        for _ in range(50):
            d = int(rng.integers(1, 9))
            w = rng.normal(size=(d, d))
            b = rng.normal(size=d)
            s, p = rng.uniform(-1, 1, d), rng.uniform(-1, 1, d)
            g, e, t = rng.uniform(0, 2, 3)
            got = step(s, p, WeightMatrix(w, b), BsbParams(g, e, t))
            want = oracle.step(s.tolist(), p.tolist(), w.tolist(), b.tolist(), g, e, t)
            np.testing.assert_allclose(got, want, rtol=0, atol=1e-13)


class TestRecall:
    def test_stored_pattern_is_returned(self, backend, rng):
        x = rng.choice([-1.0, 1.0], 16)
        trace = recall(x, train([x]))
        assert trace.converged
        assert np.array_equal(trace.final_state, x)
        assert trace.iterations_used == 1

    def test_one_flip_in_24_corrected(self, backend, rng):
        x = rng.choice([-1.0, 1.0], 24)
        net = train([x])
        wref = oracle.hebbian([x.tolist()])
        for i in range(24):
            probe = flip(x, [i])
            trace = recall(probe, net)
            assert trace.converged and np.array_equal(trace.final_state, x)
            ref, _, ok = oracle.recall(probe.tolist(), wref, [0.0] * 24, 1.0, 0.1, 0.0)
            assert ok and ref == x.tolist()

    def test_identity_dynamics(self, backend, rng):
        p = rng.uniform(-1, 1, 6)
        net = WeightMatrix(rng.normal(size=(6, 6)))
        trace = recall(p, net, BsbParams(gamma=1, eta=0, theta=0))
        assert trace.converged and trace.iterations_used == 1
        assert np.array_equal(trace.final_state, p)

    def test_non_convergence_is_not_an_error(self, backend):
        net = WeightMatrix([[0.0, 10.0], [-10.0, 0.0]])
        trace = recall([1.0, 0.0], net, BsbParams(gamma=1, eta=1, theta=0, max_iters=20))
        assert not trace.converged
        assert trace.iterations_used == 20

    def test_divergence_is_distinct(self, backend):
        net = WeightMatrix([[np.nan, 0.0], [0.0, 0.0]])
        with pytest.raises(DivergenceError):
            recall([1.0, 1.0], net)

    def test_energy_series_length(self, backend, rng):
        x = rng.choice([-1.0, 1.0], 12)
        net = train([x], None)
        trace = recall(flip(x, [0, 1, 2]), net, record_energy=True)
        assert len(trace.energy_series) == trace.iterations_used
        assert trace.energy_series[-1] == pytest.approx(energy(x, net))

    def test_matches_oracle(self, backend, rng):
        for _ in range(20):
            d = int(rng.integers(2, 10))
            w = rng.normal(size=(d, d))
            w = (w + w.T) / 2
            b = rng.normal(scale=0.1, size=d)
            p = rng.uniform(-1, 1, d)
            trace = recall(p, WeightMatrix(w, b), BsbParams(1.0, 0.2, 0.1))
            ref, it, ok = oracle.recall(p.tolist(), w.tolist(), b.tolist(), 1.0, 0.2, 0.1)
            assert trace.converged == ok
            np.testing.assert_allclose(trace.final_state, ref, atol=1e-9)

    def test_converged_means_small_last_change(self, backend, rng):
        for _ in range(30):
            d = 8
            w = rng.normal(size=(d, d))
            params = BsbParams(1.0, 0.05, 0.0, max_iters=50)
            p = rng.uniform(-1, 1, d)
            trace = recall(p, WeightMatrix(w), params)
            assert trace.iterations_used <= params.max_iters
            if trace.converged:
                again = step(trace.final_state, p, WeightMatrix(w), params)
                # one more step from a converged state moves at most a Lipschitz multiple of tol
                assert np.max(np.abs(again - trace.final_state)) < 1e-6


class TestEnergy:
    def test_hand_computed(self):
        assert energy([1, -1], W2) == -1.0

    def test_origin(self, rng):
        assert energy(np.zeros(4), WeightMatrix(rng.normal(size=(4, 4)))) == 0.0

    def test_even_without_bias(self, rng):
        net = WeightMatrix(rng.normal(size=(7, 7)))
        x = rng.uniform(-1, 1, 7)
        assert energy(x, net) == energy(-x, net)

    def test_matches_oracle(self, rng):
        w, b, x = rng.normal(size=(5, 5)), rng.normal(size=5), rng.uniform(-1, 1, 5)
        assert energy(x, WeightMatrix(w, b)) == pytest.approx(oracle.energy(x, w, b), abs=1e-12)


class TestParams:
    @pytest.mark.parametrize("kwargs", [dict(gamma=-1), dict(eta=math.nan), dict(max_iters=0),
                                        dict(convergence_tol=-1), dict(gamma=0, eta=0, theta=0)])
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            BsbParams(**kwargs)

    def test_defaults(self):
        p = BsbParams()
        assert (p.gamma, p.eta, p.theta, p.max_iters, p.convergence_tol) == (1.0, 0.1, 0.0, 200, 1e-9)

    def test_weight_matrix_read_only(self):
        with pytest.raises(ValueError):
            W2.w[0, 0] = 3.0


def test_saturate_ties_go_positive():
    assert saturate([0.0, -0.0, -0.2, 0.3]).tolist() == [1.0, 1.0, -1.0, 1.0]


# --- properties -------------------------------------------------------------

_dims = st.integers(1, 8)


@st.composite
def box_case(draw):
    d = draw(_dims)
    floats = st.floats(-3, 3, allow_nan=False)
    w = draw(hnp.arrays(np.float64, (d, d), elements=floats))
    b = draw(hnp.arrays(np.float64, d, elements=floats))
    s = draw(hnp.arrays(np.float64, d, elements=st.floats(-1, 1)))
    p = draw(hnp.arrays(np.float64, d, elements=st.floats(-1, 1)))
    gains = draw(st.tuples(*[st.floats(0, 3)] * 3).filter(lambda g: any(g)))
    return WeightMatrix(w, b), s, p, BsbParams(*gains)


@settings(max_examples=300, deadline=None)
@given(box_case())
def test_box_invariance(case):
    net, s, p, params = case
    out = step(s, p, net, params)
    assert np.all(out >= -1.0) and np.all(out <= 1.0)


def test_box_invariance_bulk(rng):
    for _ in range(1000):
        d = int(rng.integers(1, 20))
        net = WeightMatrix(rng.normal(scale=3, size=(d, d)), rng.normal(size=d))
        s, p = rng.uniform(-1, 1, d), rng.uniform(-1, 1, d)
        out = step(s, p, net, BsbParams(*rng.uniform(0, 2, 3)))
        assert np.all(np.abs(out) <= 1.0)


@settings(max_examples=200, deadline=None)
@given(box_case())
def test_sign_symmetry(case):
    net, s, _, params = case
    net = WeightMatrix(net.w)  # b = 0
    params = BsbParams(params.gamma, params.eta, 0.0) if params.gamma or params.eta else BsbParams()
    assert np.array_equal(step(-s, -s, net, params), -step(s, s, net, params))


def test_saturated_fixed_point_criterion(backend, rng):
    for _ in range(200):
        d = int(rng.integers(2, 10))
        net = WeightMatrix(rng.normal(size=(d, d)), rng.normal(scale=0.2, size=d))
        params = BsbParams(*rng.uniform(0, 1.5, 3))
        s = rng.choice([-1.0, 1.0], d)
        u = params.gamma * s + params.eta * (net.w @ s + net.b) + params.theta * s
        expected = bool(np.all((np.sign(u) == s) & (np.abs(u) >= 1)))
        assert is_fixed_point(s, net, params) == expected
        if expected:
            trace = recall(s, net, params)
            assert trace.converged and trace.iterations_used <= 2
            assert np.array_equal(trace.final_state, s)


def test_energy_descent_restricted_regime(backend, rng):
    for _ in range(1000):
        d = int(rng.integers(2, 16))
        a = rng.normal(size=(d, d))
        w = a + a.T
        net = WeightMatrix(w, rng.normal(size=d))
        eta = rng.uniform(0.05, 1.0) / np.abs(w).sum(axis=1).max()
        p = rng.uniform(-1, 1, d)
        trace = recall(p, net, BsbParams(1.0, eta, 0.0, max_iters=100), record_energy=True)
        e = [energy(p, net)] + trace.energy_series
        assert np.all(np.diff(e) <= 1e-9)


def test_determinism(backend, rng):
    x = random_patterns(rng, 3, 40)
    net = train(x)
    probe = rng.uniform(-1, 1, 40)
    a = recall(probe, net, record_energy=True)
    b = recall(probe, net, record_energy=True)
    assert a.final_state.tobytes() == b.final_state.tobytes()
    assert a.energy_series == b.energy_series
