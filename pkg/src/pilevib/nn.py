"""Dense feed-forward network with explicit forward/backward passes and Adam.

Weight matrices are stored as numpy float64 arrays of shape (out, in), so a
layer computes y = A @ x + b for a column vector x (equivalently y = x A^T + b
for row vectors). Dropout is the inverted variant: surviving units are scaled
by 1/(1-rate) at train time and evaluation applies no rescaling.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

HIDDEN_ACTIVATIONS = ("relu", "sigmoid", "tanh", "leaky_relu", "identity")
OUTPUT_ACTIVATIONS = ("sigmoid", "identity")

LEAKY_SLOPE = 0.01

DEFAULT_WIDTHS = (7, 100, 200, 20, 5, 1)


@dataclass
class NetworkSpec:
    """Architecture description: layer widths, activations, dropout, seed."""

    layer_widths: tuple[int, ...] = DEFAULT_WIDTHS
    hidden_activation: str = "relu"
    output_activation: str = "sigmoid"
    dropout_rate: float = 0.1
    dropout_after_layer_index: int | None = None
    seed: int = 0

    def __post_init__(self):
        self.layer_widths = tuple(int(w) for w in self.layer_widths)
        if len(self.layer_widths) < 2:
            raise DimensionError("network needs at least an input and output width")
        if any(w < 1 for w in self.layer_widths):
            raise DimensionError(f"all layer widths must be >= 1, got {self.layer_widths}")
        if self.layer_widths[-1] != 1:
            raise DimensionError("output layer width must be 1")
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(f"unknown hidden activation {self.hidden_activation!r}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"unknown output activation {self.output_activation!r}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must lie in [0, 1)")
        if self.dropout_after_layer_index is None:
            # Default: after the second-to-last hidden layer (the 20-unit layer
            # in the (7,100,200,20,5,1) layout).
            self.dropout_after_layer_index = max(self.num_hidden_layers - 2, 0)
        if self.num_hidden_layers > 0 and not (
                0 <= self.dropout_after_layer_index < self.num_hidden_layers):
            raise ValueError("dropout_after_layer_index out of range")

    @property
    def num_layers(self) -> int:
        return len(self.layer_widths) - 1

    @property
    def num_hidden_layers(self) -> int:
        return self.num_layers - 1

    @property
    def n_features(self) -> int:
        return self.layer_widths[0]


# NetworkParams: list of (weight, bias) pairs, one per linear layer.
NetworkParams = list[tuple[np.ndarray, np.ndarray]]


@dataclass
class ForwardTrace:
    """Per-layer tensors recorded during a forward pass, for backprop."""

    inputs: np.ndarray
    pre: list[np.ndarray] = field(default_factory=list)
    post: list[np.ndarray] = field(default_factory=list)
    masks: list[np.ndarray | None] = field(default_factory=list)


@dataclass
class AdamState:
    m: list[tuple[np.ndarray, np.ndarray]]
    v: list[tuple[np.ndarray, np.ndarray]]
    t: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def for_params(cls, params: NetworkParams, lr: float = 1e-3,
                   beta1: float = 0.9, beta2: float = 0.999,
                   epsilon: float = 1e-8) -> "AdamState":
        zeros = lambda: [(np.zeros_like(w), np.zeros_like(b)) for w, b in params]
        return cls(m=zeros(), v=zeros(), t=0, lr=lr, beta1=beta1, beta2=beta2,
                   epsilon=epsilon)


def init_params(spec: NetworkSpec, rng: np.random.Generator | None = None) -> NetworkParams:
    """Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)], seeded from the spec."""
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    params: NetworkParams = []
    for fan_in, fan_out in zip(spec.layer_widths[:-1], spec.layer_widths[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        b = rng.uniform(-bound, bound, size=fan_out)
        params.append((w, b))
    return params


def clone_params(params: NetworkParams) -> NetworkParams:
    return [(w.copy(), b.copy()) for w, b in params]


def check_params(spec: NetworkSpec, params: NetworkParams) -> None:
    if len(params) != spec.num_layers:
        raise DimensionError(
            f"expected {spec.num_layers} layers, got {len(params)}")
    for l, (w, b) in enumerate(params):
        expect = (spec.layer_widths[l + 1], spec.layer_widths[l])
        if w.shape != expect:
            raise DimensionError(f"layer {l}: weight shape {w.shape}, expected {expect}")
        if b.shape != (expect[0],):
            raise DimensionError(f"layer {l}: bias shape {b.shape}, expected ({expect[0]},)")
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise DimensionError(f"layer {l}: non-finite parameter entries")


def linear_forward(x: np.ndarray, a: np.ndarray, b: np.ndarray,
                   layer: int | None = None) -> np.ndarray:
    """y = A x + b. x may be a vector (d,) or a batch (n, d)."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    where = f"layer {layer}" if layer is not None else "linear layer"
    if x.shape[-1] != a.shape[1]:
        raise DimensionError(
            f"{where}: input length {x.shape[-1]} != weight cols {a.shape[1]}")
    if b.shape[0] != a.shape[0]:
        raise DimensionError(
            f"{where}: bias length {b.shape[0]} != weight rows {a.shape[0]}")
    return x @ a.T + b


def _input_linear(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """x @ a.T + b for the input layer, with an order-canonical reduction.

    Per output unit, the per-feature products are sorted before summing and
    the bias is added last. Exchanging two input features with identical
    weight columns then yields bit-identical outputs, which blocked BLAS
    reductions do not guarantee; the network therefore treats exchangeable
    features exactly symmetrically.
    """
    products = x[:, None, :] * a[None, :, :]  # (batch, out, in)
    return np.sort(products, axis=-1).sum(axis=-1) + b


def activate(kind: str, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    if kind == "tanh":
        return np.tanh(z)
    if kind == "leaky_relu":
        return np.where(z > 0.0, z, LEAKY_SLOPE * z)
    if kind == "identity":
        return z
    raise ValueError(f"unknown activation {kind!r}")


def activate_grad(kind: str, z: np.ndarray) -> np.ndarray:
    """d activation / d z, computed from the pre-activation."""
    if kind == "relu":
        return (z > 0.0).astype(float)
    if kind == "sigmoid":
        s = 1.0 / (1.0 + np.exp(-z))
        return s * (1.0 - s)
    if kind == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    if kind == "leaky_relu":
        return np.where(z > 0.0, 1.0, LEAKY_SLOPE)
    if kind == "identity":
        return np.ones_like(z)
    raise ValueError(f"unknown activation {kind!r}")


def forward(spec: NetworkSpec, params: NetworkParams, x: np.ndarray,
            mode: str = "eval", rng: np.random.Generator | None = None
            ) -> tuple[np.ndarray | float, ForwardTrace]:
    """Run the layer chain. x is a vector (d,) or a batch (n, d).

    Returns (prediction, trace); prediction is a scalar for vector input,
    a (n,) array for batch input.
    """
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xb = x[None, :] if single else x
    if xb.shape[1] != spec.n_features:
        raise DimensionError(
            f"input has {xb.shape[1]} features, spec expects {spec.n_features}")
    if mode == "train" and spec.dropout_rate > 0.0 and rng is None:
        raise ValueError("train-mode forward with dropout needs an rng")

    trace = ForwardTrace(inputs=xb)
    act = xb
    last = spec.num_layers - 1
    for l, (w, b) in enumerate(params):
        if l == 0:
            if act.shape[1] != w.shape[1]:
                raise DimensionError(
                    f"layer 0: input length {act.shape[1]} != weight cols {w.shape[1]}")
            z = _input_linear(act, w, b)
        else:
            z = linear_forward(act, w, b, layer=l)
        kind = spec.output_activation if l == last else spec.hidden_activation
        a = activate(kind, z)
        mask = None
        if (mode == "train" and l == spec.dropout_after_layer_index
                and l != last and spec.dropout_rate > 0.0):
            keep = rng.random(a.shape) >= spec.dropout_rate
            a = a * keep / (1.0 - spec.dropout_rate)
            mask = keep
        trace.pre.append(z)
        trace.post.append(a)
        trace.masks.append(mask)
        act = a

    pred = act[:, 0]
    return (float(pred[0]) if single else pred), trace


def backward(spec: NetworkSpec, params: NetworkParams, trace: ForwardTrace,
             x: np.ndarray, target: np.ndarray | float) -> NetworkParams:
    """Gradients of the mean squared error over the traced batch.

    For a single sample this is the gradient of (y - f(x))^2; for a batch it
    is the gradient of the batch-mean loss (so the learning rate is
    batch-size independent).
    """
    x = np.asarray(x, dtype=float)
    xb = x[None, :] if x.ndim == 1 else x
    t = np.atleast_1d(np.asarray(target, dtype=float))
    if len(trace.pre) != spec.num_layers:
        raise DimensionError("trace does not match the network spec")
    if trace.inputs.shape != xb.shape or not np.array_equal(trace.inputs, xb):
        raise DimensionError("trace was produced from a different input")
    n = xb.shape[0]
    if t.shape[0] != n:
        raise DimensionError(f"{t.shape[0]} targets for a batch of {n}")

    pred = trace.post[-1][:, 0]
    # d(mean (t - p)^2)/dp = -2 (t - p) / n
    dloss = (-2.0 * (t - pred) / n)[:, None]

    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * spec.num_layers  # type: ignore
    last = spec.num_layers - 1
    delta = dloss * activate_grad(spec.output_activation, trace.pre[last])
    for l in range(last, -1, -1):
        layer_in = trace.post[l - 1] if l > 0 else xb
        gw = delta.T @ layer_in
        gb = delta.sum(axis=0)
        grads[l] = (gw, gb)
        if l > 0:
            w, _ = params[l]
            upstream = delta @ w
            mask = trace.masks[l - 1]
            if mask is not None:
                upstream = upstream * mask / (1.0 - spec.dropout_rate)
            delta = upstream * activate_grad(spec.hidden_activation, trace.pre[l - 1])
    return grads


def adam_step(params: NetworkParams, grads: NetworkParams,
              state: AdamState) -> tuple[NetworkParams, AdamState]:
    """One Adam update; returns fresh parameter and state objects."""
    if len(grads) != len(params):
        raise DimensionError("gradient structure does not match parameters")
    state = copy.copy(state)
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    new_params: NetworkParams = []
    new_m, new_v = [], []
    for (theta_w, theta_b), (gw, gb), (mw, mb), (vw, vb) in zip(
            params, grads, state.m, state.v):
        if gw.shape != theta_w.shape or gb.shape != theta_b.shape:
            raise DimensionError("gradient shape does not match parameter shape")
        upd = []
        ms, vs = [], []
        for theta, g, m, v in ((theta_w, gw, mw, vw), (theta_b, gb, mb, vb)):
            m = b1 * m + (1.0 - b1) * g
            v = b2 * v + (1.0 - b2) * g * g
            m_hat = m / bc1
            v_hat = v / bc2
            upd.append(theta - state.lr * m_hat / (np.sqrt(v_hat) + state.epsilon))
            ms.append(m)
            vs.append(v)
        new_params.append((upd[0], upd[1]))
        new_m.append((ms[0], ms[1]))
        new_v.append((vs[0], vs[1]))
    state.m = new_m
    state.v = new_v
    return new_params, state


def mse(predictions: np.ndarray, targets: np.ndarray) -> float:
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(targets, dtype=float)
    if p.shape != t.shape:
        raise DimensionError(f"length mismatch: {p.shape} vs {t.shape}")
    if p.size == 0:
        raise ValueError("mse of an empty vector is undefined")
    return float(np.mean((t - p) ** 2))


def mae(predictions: np.ndarray, targets: np.ndarray) -> float:
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(targets, dtype=float)
    if p.shape != t.shape:
        raise DimensionError(f"length mismatch: {p.shape} vs {t.shape}")
    if p.size == 0:
        raise ValueError("mae of an empty vector is undefined")
    return float(np.mean(np.abs(t - p)))
