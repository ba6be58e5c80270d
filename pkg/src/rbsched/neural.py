"""Dense feed-forward value network with backpropagation and Adam.

All parameters live in one flat float64 vector; per-layer weight
matrices and bias vectors are reshaped views into it. That keeps
parameter copies, serialization, and optimizer updates single
vectorized operations, and it makes per-coordinate gradient checks
straightforward.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

_MAGIC = b"VNET"


class ValueNetwork:
    """Rectifier MLP mapping a state vector to one value per action.

    ``layer_sizes`` = (input, hidden..., output). Hidden layers use the
    rectifier, the output layer is affine.
    """

    def __init__(self, layer_sizes, theta: np.ndarray | None = None):
        self.layer_sizes = tuple(int(s) for s in layer_sizes)
        if len(self.layer_sizes) < 2 or any(s < 1 for s in self.layer_sizes):
            raise InvalidParameterError(f"bad layer sizes {layer_sizes}")
        self.num_params = sum((fin + 1) * fout for fin, fout
                              in zip(self.layer_sizes, self.layer_sizes[1:]))
        if theta is None:
            theta = np.zeros(self.num_params)
        theta = np.ascontiguousarray(theta, dtype=np.float64)
        if theta.shape != (self.num_params,):
            raise InvalidParameterError(
                f"theta has {theta.size} entries, architecture needs {self.num_params}")
        self.theta = theta
        self.weights, self.biases = _views(self.theta, self.layer_sizes)

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    def clone(self) -> "ValueNetwork":
        return ValueNetwork(self.layer_sizes, self.theta.copy())


def _views(theta: np.ndarray, layer_sizes):
    weights, biases = [], []
    pos = 0
    for fin, fout in zip(layer_sizes, layer_sizes[1:]):
        weights.append(theta[pos:pos + fin * fout].reshape(fin, fout))
        pos += fin * fout
        biases.append(theta[pos:pos + fout])
        pos += fout
    return weights, biases


def init_network(layer_sizes, rng: np.random.Generator) -> ValueNetwork:
    """Weights uniform in +-1/sqrt(fan_in), biases zero."""
    net = ValueNetwork(layer_sizes)
    for w in net.weights:
        bound = 1.0 / np.sqrt(w.shape[0])
        w[:] = rng.uniform(-bound, bound, size=w.shape)
    return net


def forward(net: ValueNetwork, state: np.ndarray) -> np.ndarray:
    """Value of every action for one state (d,) or a batch (B, d)."""
    x = np.asarray(state, dtype=np.float64)
    if x.shape[-1] != net.input_dim:
        raise InvalidParameterError(
            f"state has width {x.shape[-1]}, network expects {net.input_dim}")
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        x = x @ w + b
        if i != last:
            x = np.maximum(x, 0.0)
    return x


def loss_and_gradient(net: ValueNetwork, states: np.ndarray, actions: np.ndarray,
                      targets: np.ndarray):
    """Summed squared error on the taken actions, and its gradient.

    loss = sum_i (targets[i] - value(states[i])[actions[i]])^2. Outputs
    for actions not taken receive zero output-gradient. Returns
    (loss, flat gradient aligned with net.theta).
    """
    states = np.atleast_2d(np.asarray(states, dtype=np.float64))
    actions = np.asarray(actions, dtype=np.intp).ravel()
    targets = np.asarray(targets, dtype=np.float64).ravel()
    if states.shape[0] != actions.size or actions.size != targets.size:
        raise InvalidParameterError("states, actions, targets must agree in length")
    if actions.size == 0:
        raise InvalidParameterError("empty batch")
    if not np.all(np.isfinite(targets)):
        raise InvalidParameterError("non-finite training target")

    last = len(net.weights) - 1
    x = states
    pre = []        # pre-activations per layer
    acts = [x]      # layer inputs
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = x @ w + b
        pre.append(z)
        x = np.maximum(z, 0.0) if i != last else z
        acts.append(x)

    rows = np.arange(actions.size)
    residual = acts[-1][rows, actions] - targets
    loss = float(residual @ residual)

    grad = np.zeros_like(net.theta)
    gw, gb = _views(grad, net.layer_sizes)
    delta = np.zeros_like(acts[-1])
    delta[rows, actions] = 2.0 * residual
    for i in range(last, -1, -1):
        if i != last:
            delta = delta * (pre[i] > 0.0)
        np.matmul(acts[i].T, delta, out=gw[i])
        np.sum(delta, axis=0, out=gb[i])
        if i > 0:
            delta = delta @ net.weights[i].T
    return loss, grad


@dataclass
class AdamState:
    """Bias-corrected first/second moment accumulators over a flat
    parameter vector."""

    m: np.ndarray
    v: np.ndarray
    step: int = 0
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def for_params(cls, num_params: int, learning_rate: float = 1e-4,
                   beta1: float = 0.9, beta2: float = 0.999,
                   epsilon: float = 1e-8) -> "AdamState":
        return cls(m=np.zeros(num_params), v=np.zeros(num_params), step=0,
                   learning_rate=learning_rate, beta1=beta1, beta2=beta2,
                   epsilon=epsilon)


def adam_update(params: np.ndarray, grad: np.ndarray, adam: AdamState):
    """One Adam step, in place, on a flat parameter vector."""
    if params.shape != grad.shape or params.shape != adam.m.shape:
        raise InvalidParameterError("parameter/gradient/moment shapes differ")
    adam.step += 1
    adam.m *= adam.beta1
    adam.m += (1.0 - adam.beta1) * grad
    adam.v *= adam.beta2
    adam.v += (1.0 - adam.beta2) * np.square(grad)
    m_hat = adam.m / (1.0 - adam.beta1 ** adam.step)
    v_hat = adam.v / (1.0 - adam.beta2 ** adam.step)
    params -= adam.learning_rate * m_hat / (np.sqrt(v_hat) + adam.epsilon)


def adam_step(net: ValueNetwork, grad: np.ndarray, adam: AdamState) -> ValueNetwork:
    """Apply one Adam update to the network parameters (mutates net and adam)."""
    adam_update(net.theta, grad, adam)
    return net


def copy_parameters(src: ValueNetwork, dst: ValueNetwork) -> ValueNetwork:
    """Copy src parameters into dst, bit-identical, no aliasing."""
    if src.layer_sizes != dst.layer_sizes:
        raise InvalidParameterError(
            f"architecture mismatch: {src.layer_sizes} vs {dst.layer_sizes}")
    dst.theta[:] = src.theta
    return dst


def save_network(net: ValueNetwork, path):
    """Flat little-endian binary: magic, layer count, sizes, float64 params."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(net.layer_sizes)))
        fh.write(struct.pack(f"<{len(net.layer_sizes)}I", *net.layer_sizes))
        fh.write(net.theta.astype("<f8").tobytes())


def load_network(path) -> ValueNetwork:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise InvalidParameterError(f"{path} is not a network parameter file")
        (count,) = struct.unpack("<I", fh.read(4))
        sizes = struct.unpack(f"<{count}I", fh.read(4 * count))
        theta = np.frombuffer(fh.read(), dtype="<f8")
    return ValueNetwork(sizes, theta.astype(np.float64))
