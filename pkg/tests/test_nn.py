import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pilevib import nn
from pilevib.errors import DimensionError
from pilevib.nn import (AdamState, NetworkSpec, activate, adam_step, backward,
                        forward, init_params, linear_forward, mae, mse)


class TestLinearForward:
    def test_identity(self):
        y = linear_forward(np.array([1.0, 2.0]), np.eye(2), np.zeros(2))
        assert np.array_equal(y, [1.0, 2.0])

    def test_zero_input_returns_bias(self):
        a = np.array([[0.3, -2.0, 1.0], [4.0, 5.0, 6.0]])
        y = linear_forward(np.zeros(3), a, np.array([3.0, -1.0]))
        assert np.array_equal(y, [3.0, -1.0])

    def test_hand_computed(self):
        y = linear_forward(np.array([1.0, 2.0]),
                           np.array([[1.0, 1.0], [2.0, 0.0]]),
                           np.array([0.5, 0.5]))
        assert np.allclose(y, [3.5, 2.5])

    def test_shape_mismatch_names_layer(self):
        with pytest.raises(DimensionError, match="layer 3"):
            linear_forward(np.zeros(2), np.eye(3), np.zeros(3), layer=3)


class TestActivate:
    def test_relu(self):
        assert np.array_equal(activate("relu", np.array([-1.0, 0.0, 2.0])),
                              [0.0, 0.0, 2.0])

    def test_sigmoid_at_zero(self):
        assert activate("sigmoid", np.array([0.0]))[0] == 0.5

    def test_leaky_relu_slope(self):
        assert activate("leaky_relu", np.array([-10.0]))[0] == pytest.approx(-0.1)

    def test_tanh_and_identity(self):
        z = np.array([-2.0, 0.0, 1.5])
        assert np.array_equal(activate("tanh", z), np.tanh(z))
        assert np.array_equal(activate("identity", z), z)

    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=20))
    def test_total_and_finite(self, values):
        z = np.array(values)
        for kind in nn.HIDDEN_ACTIVATIONS:
            assert np.isfinite(activate(kind, z)).all()


def identity_spec(widths, dropout=0.0):
    return NetworkSpec(layer_widths=widths, hidden_activation="identity",
                       output_activation="identity", dropout_rate=dropout)


class TestForward:
    def test_identity_composition(self):
        # Two layers that each scale by 2: f(x) = 4x for a 1-wide chain.
        spec = identity_spec((1, 1, 1))
        params = [(np.array([[2.0]]), np.zeros(1)), (np.array([[2.0]]), np.zeros(1))]
        pred, _ = forward(spec, params, np.array([3.0]))
        assert pred == 12.0

    def test_eval_deterministic(self, rng):
        spec = NetworkSpec(seed=5)
        params = init_params(spec)
        x = rng.normal(size=7)
        p1, _ = forward(spec, params, x, mode="eval")
        p2, _ = forward(spec, params, x, mode="eval")
        assert p1 == p2

    def test_sigmoid_output_in_unit_interval(self, rng):
        spec = NetworkSpec(seed=5)
        params = init_params(spec)
        preds, _ = forward(spec, params, rng.normal(size=(64, 7)))
        assert np.all((preds > 0.0) & (preds < 1.0))

    def test_dropout_preserves_expectation(self):
        # Hidden layer of three always-one units averaged by the output layer;
        # inverted dropout must keep the output mean at 1.
        spec = identity_spec((1, 3, 1), dropout=0.5)
        params = [(np.ones((3, 1)), np.zeros(3)),
                  (np.full((1, 3), 1.0 / 3.0), np.zeros(1))]
        rng = np.random.default_rng(123)
        n = 100_000
        preds, _ = forward(spec, params, np.ones((n, 1)), mode="train", rng=rng)
        assert abs(preds.mean() - 1.0) < 0.02

    def test_eval_ignores_dropout(self):
        spec = identity_spec((1, 3, 1), dropout=0.5)
        params = [(np.ones((3, 1)), np.zeros(3)),
                  (np.full((1, 3), 1.0 / 3.0), np.zeros(1))]
        pred, trace = forward(spec, params, np.array([1.0]), mode="eval")
        assert pred == 1.0
        assert all(m is None for m in trace.masks)

    def test_wrong_width_raises(self):
        spec = NetworkSpec()
        params = init_params(spec)
        with pytest.raises(DimensionError):
            forward(spec, params, np.zeros(5))


class TestBackward:
    def test_1d_least_squares_closed_form(self):
        # f(x) = wx + b, loss (y - f)^2, dL/dw = -2 (y - f) x.
        spec = identity_spec((1, 1))
        w, b, x, y = 1.5, 0.25, 2.0, 5.0
        params = [(np.array([[w]]), np.array([b]))]
        pred, trace = forward(spec, params, np.array([x]))
        grads = backward(spec, params, trace, np.array([x]), y)
        f = w * x + b
        assert grads[0][0][0, 0] == pytest.approx(-2.0 * (y - f) * x)
        assert grads[0][1][0] == pytest.approx(-2.0 * (y - f))

    def test_zero_gradient_at_perfect_prediction(self):
        spec = identity_spec((2, 1))
        params = [(np.array([[1.0, 1.0]]), np.zeros(1))]
        x = np.array([2.0, 3.0])
        pred, trace = forward(spec, params, x)
        grads = backward(spec, params, trace, x, pred)
        assert all(np.all(gw == 0) and np.all(gb == 0) for gw, gb in grads)

    @pytest.mark.parametrize("hidden", ["relu", "sigmoid", "tanh", "leaky_relu"])
    def test_finite_differences_small_net(self, hidden, rng):
        spec = NetworkSpec(layer_widths=(3, 4, 2, 1), hidden_activation=hidden,
                           dropout_rate=0.0, seed=1)
        params = init_params(spec, np.random.default_rng(1))
        x = rng.normal(size=3)
        y = 0.3
        _, trace = forward(spec, params, x)
        grads = backward(spec, params, trace, x, y)

        def loss():
            p, _ = forward(spec, params, x)
            return (y - p) ** 2

        h = 1e-5
        for l, (w, b) in enumerate(params):
            for arr, g in ((w, grads[l][0]), (b, np.atleast_1d(grads[l][1]))):
                flat, gf = arr.ravel(), g.ravel()
                for i in range(flat.size):
                    orig = flat[i]
                    flat[i] = orig + h
                    lp = loss()
                    flat[i] = orig - h
                    lm = loss()
                    flat[i] = orig
                    fd = (lp - lm) / (2 * h)
                    assert gf[i] == pytest.approx(fd, rel=1e-5, abs=1e-9)

    def test_trace_from_other_input_rejected(self, rng):
        spec = NetworkSpec(dropout_rate=0.0)
        params = init_params(spec)
        x1, x2 = rng.normal(size=7), rng.normal(size=7)
        _, trace = forward(spec, params, x1)
        with pytest.raises(DimensionError):
            backward(spec, params, trace, x2, 0.5)

    def test_dropout_mask_blocks_gradient(self):
        spec = identity_spec((1, 2, 1), dropout=0.5)
        params = [(np.ones((2, 1)), np.zeros(2)), (np.ones((1, 2)), np.zeros(1))]
        rng = np.random.default_rng(2)
        x = np.array([1.0])
        # Find a draw where exactly one unit is masked.
        for _ in range(50):
            _, trace = forward(spec, params, x, mode="train", rng=rng)
            mask = trace.masks[0][0]
            if mask.sum() == 1:
                break
        grads = backward(spec, params, trace, x, 3.0)
        dead = int(np.argmin(mask))
        assert grads[0][0][dead, 0] == 0.0
        assert grads[0][1][dead] == 0.0


def scalar_params(value=0.0):
    return [(np.array([[value]]), np.array([value]))]


class TestAdam:
    def test_zero_gradient_leaves_params(self):
        params = scalar_params(0.7)
        state = AdamState.for_params(params)
        new_params, new_state = adam_step(params, scalar_params(0.0), state)
        assert new_state.t == 1
        assert np.array_equal(new_params[0][0], params[0][0])

    def test_first_step_magnitude(self):
        # First Adam step is ~lr regardless of gradient scale.
        params = scalar_params(0.0)
        state = AdamState.for_params(params, lr=1e-3)
        grads = [(np.array([[10.0]]), np.array([0.0]))]
        new_params, _ = adam_step(params, grads, state)
        step = -new_params[0][0][0, 0]
        assert step == pytest.approx(1e-3 * 10.0 / (10.0 + 1e-8), rel=1e-12)

    def test_two_constant_steps(self):
        params = scalar_params(0.0)
        state = AdamState.for_params(params, lr=1e-3)
        grads = [(np.array([[1.0]]), np.array([0.0]))]
        values = []
        for _ in range(2):
            params, state = adam_step(params, grads, state)
            values.append(params[0][0][0, 0])
        assert values[0] == pytest.approx(-1e-3, rel=1e-6)
        assert values[1] - values[0] == pytest.approx(-1e-3, rel=1e-6)

    @pytest.mark.parametrize("c", [10.0, 1000.0])
    def test_scale_invariant_first_step(self, c, rng):
        spec = NetworkSpec(layer_widths=(2, 3, 1), dropout_rate=0.0)
        params = init_params(spec, np.random.default_rng(4))
        grads = [(rng.normal(size=w.shape), rng.normal(size=b.shape))
                 for w, b in params]
        scaled = [(c * gw, c * gb) for gw, gb in grads]
        p1, _ = adam_step(params, grads, AdamState.for_params(params))
        p2, _ = adam_step(params, scaled, AdamState.for_params(params))
        for (w1, b1), (w2, b2) in zip(p1, p2):
            assert np.allclose(w1, w2, atol=1e-9)
            assert np.allclose(b1, b2, atol=1e-9)

    def test_shape_mismatch(self):
        params = scalar_params()
        state = AdamState.for_params(params)
        bad = [(np.zeros((2, 2)), np.zeros(1))]
        with pytest.raises(DimensionError):
            adam_step(params, bad, state)


class TestMetrics:
    def test_mse(self):
        assert mse([1.0, 2.0], [1.0, 2.0]) == 0.0
        assert mse([0.0], [3.0]) == 9.0
        assert mse([1.0, 3.0], [2.0, 5.0]) == 2.5

    def test_mae(self):
        assert mae([1.0, 2.0], [1.0, 2.0]) == 0.0
        assert mae([0.0], [-3.0]) == 3.0
        assert mae([1.0, 3.0], [2.0, 5.0]) == 1.5

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            mse([], [])
        with pytest.raises(ValueError):
            mae([], [])


class TestSpecValidation:
    def test_bad_widths(self):
        with pytest.raises(DimensionError):
            NetworkSpec(layer_widths=(7, 0, 1))
        with pytest.raises(DimensionError):
            NetworkSpec(layer_widths=(7, 5, 2))

    def test_default_dropout_position(self):
        # (7,100,200,20,5,1): hidden layers (100,200,20,5); dropout after 20.
        spec = NetworkSpec()
        assert spec.dropout_after_layer_index == 2
        big = NetworkSpec(layer_widths=(7, 200, 1000, 2000, 200, 20, 5, 1))
        assert big.layer_widths[big.dropout_after_layer_index + 1] == 20
