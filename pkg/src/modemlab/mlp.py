"""From-scratch fully connected network: forward, backprop, Adam, model IO.

The network maps a real feature vector through L hidden ReLU layers to k
sigmoid outputs (soft bits in (0,1)); training minimizes mean squared
error against the 0/1 bit labels. Everything is plain numpy so gradients
can be checked against finite differences.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import DivergenceError

MODEL_MAGIC = "MLPMODEL-1"


@dataclass
class Mlp:
    dims: list                      # [input, hidden..., output]
    weights: list = field(repr=False)   # layer i: (dims[i+1], dims[i])
    biases: list = field(repr=False)    # layer i: (dims[i+1],)
    output_activation: str = "sigmoid"  # "sigmoid" | "linear" (test mode)
    seed: int = 0


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 256
    lr: float = 1e-3
    seed: int = 0
    per_index: int | None = None  # samples per label, recorded for manifests

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


def init_mlp(dims, seed=0, output_activation="sigmoid"):
    """He-uniform initialization (suits ReLU), biases at zero, seeded."""
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ValueError(f"bad layer dims {dims!r}")
    if output_activation not in ("sigmoid", "linear"):
        raise ValueError(f"unknown output activation {output_activation!r}")
    gen = rng.stream(seed, rng.ROLE_WEIGHT_INIT)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / fan_in)
        w = (2.0 * gen.random((fan_out, fan_in)) - 1.0) * limit
        weights.append(w)
        biases.append(np.zeros(fan_out))
    return Mlp(dims=list(map(int, dims)), weights=weights, biases=biases,
               output_activation=output_activation, seed=int(seed))


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _forward_cached(net, X):
    """Forward pass keeping pre/post activations for backprop."""
    a = X
    pre, post = [], [X]
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w.T + b
        pre.append(z)
        if i < last:
            a = np.maximum(z, 0.0)  # ReLU; derivative at 0 fixed to 0
        elif net.output_activation == "sigmoid":
            a = _sigmoid(z)
        else:
            a = z
        post.append(a)
    return pre, post


def forward(net, X):
    """Soft-bit outputs for a feature vector or an (N, input_dim) batch."""
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    X2 = X[None, :] if single else X
    if X2.shape[1] != net.dims[0]:
        raise ValueError(f"input dim {X2.shape[1]} != {net.dims[0]}")
    out = _forward_cached(net, X2)[1][-1]
    return out[0] if single else out


def mse_loss(pred, target):
    """Mean over batch and components of (target - pred)^2."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target.shape}")
    return float(np.mean((target - pred) ** 2))


def backward(net, X, B):
    """Loss and exact gradients of the batch MSE for every weight/bias."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if X.shape[0] != B.shape[0]:
        raise ValueError("feature/label row counts differ")
    pre, post = _forward_cached(net, X)
    out = post[-1]
    if not np.all(np.isfinite(out)):
        raise DivergenceError(step=None, message="non-finite activations")
    loss = mse_loss(out, B)
    # dL/d(out) for L = mean over batch*k of (b - out)^2
    delta = 2.0 * (out - B) / out.size
    if net.output_activation == "sigmoid":
        delta = delta * out * (1.0 - out)
    grads_w = [None] * len(net.weights)
    grads_b = [None] * len(net.biases)
    for i in range(len(net.weights) - 1, -1, -1):
        grads_w[i] = delta.T @ post[i]
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ net.weights[i]) * (pre[i - 1] > 0)
    return loss, grads_w, grads_b


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m_w: list = field(default=None, repr=False)
    v_w: list = field(default=None, repr=False)
    m_b: list = field(default=None, repr=False)
    v_b: list = field(default=None, repr=False)


def adam_init(net, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
    return AdamState(
        lr=lr, beta1=beta1, beta2=beta2, eps=eps, t=0,
        m_w=[np.zeros_like(w) for w in net.weights],
        v_w=[np.zeros_like(w) for w in net.weights],
        m_b=[np.zeros_like(b) for b in net.biases],
        v_b=[np.zeros_like(b) for b in net.biases],
    )


def adam_step(net, grads_w, grads_b, state):
    """One Adam update with bias correction; mutates net and state."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** state.t
    c2 = 1.0 - b2 ** state.t
    for params, grads, ms, vs in (
        (net.weights, grads_w, state.m_w, state.v_w),
        (net.biases, grads_b, state.m_b, state.v_b),
    ):
        for p, g, m, v in zip(params, grads, ms, vs):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
    return net, state


def train(net, data, cfg):
    """Seeded mini-batch Adam training; returns mean batch loss per epoch.

    `data` is anything with .features and .labels (or an (X, B) pair).
    Raises DivergenceError with the offending step index on NaN loss.
    """
    if hasattr(data, "features"):
        X, B = data.features, data.labels
    else:
        X, B = data
    X = np.asarray(X, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if X.shape[1] != net.dims[0]:
        raise ValueError(f"feature dim {X.shape[1]} != net input {net.dims[0]}")
    if B.shape[1] != net.dims[-1]:
        raise ValueError(f"label dim {B.shape[1]} != net output {net.dims[-1]}")
    state = adam_init(net, lr=cfg.lr)
    shuffle_gen = rng.stream(cfg.seed, rng.ROLE_SHUFFLE)
    history = []
    step = 0
    for _ in range(cfg.epochs):
        order = shuffle_gen.permutation(X.shape[0])
        losses = []
        for start in range(0, X.shape[0], cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            loss, gw, gb = backward(net, X[idx], B[idx])
            if not np.isfinite(loss):
                raise DivergenceError(step=step)
            adam_step(net, gw, gb, state)
            losses.append(loss)
            step += 1
        history.append(float(np.mean(losses)))
    return history


def predict_bits(net, X):
    """Forward then threshold: bit = 1 iff soft output >= 0.5."""
    return (forward(net, X) >= 0.5).astype(np.int8)


def interleave_complex(Y):
    """Complex (N, n) -> real (N, 2n) with interleaved (re, im) pairs."""
    Y = np.atleast_2d(np.asarray(Y, dtype=np.complex128))
    out = np.empty((Y.shape[0], 2 * Y.shape[1]))
    out[:, 0::2] = Y.real
    out[:, 1::2] = Y.imag
    return out


def save_model(net, path, extra=None):
    """MLPMODEL-1 container: magic line, JSON manifest, float64 LE blob."""
    offsets = []
    pos = 0
    for w, b in zip(net.weights, net.biases):
        offsets.append({"w": pos, "b": pos + w.size})
        pos += w.size + b.size
    manifest = {
        "dims": net.dims,
        "output_activation": net.output_activation,
        "seed": net.seed,
        "offsets": offsets,
        "total_params": pos,
    }
    if extra:
        manifest["extra"] = extra
    blob = np.concatenate(
        [np.concatenate([w.ravel(), b.ravel()])
         for w, b in zip(net.weights, net.biases)]).astype("<f8")
    with open(path, "wb") as fh:
        fh.write((MODEL_MAGIC + "\n").encode())
        fh.write((json.dumps(manifest, sort_keys=True) + "\n").encode())
        fh.write(blob.tobytes())


def load_model(path):
    with open(path, "rb") as fh:
        magic = fh.readline().decode().strip()
        if magic != MODEL_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        manifest = json.loads(fh.readline().decode())
        blob = np.frombuffer(fh.read(), dtype="<f8")
    dims = manifest["dims"]
    if blob.size != manifest["total_params"]:
        raise ValueError(f"{path}: parameter blob size mismatch")
    weights, biases = [], []
    for off, fan_in, fan_out in zip(manifest["offsets"], dims[:-1], dims[1:]):
        weights.append(blob[off["w"]:off["w"] + fan_in * fan_out]
                       .reshape(fan_out, fan_in).copy())
        biases.append(blob[off["b"]:off["b"] + fan_out].copy())
    net = Mlp(dims=dims, weights=weights, biases=biases,
              output_activation=manifest["output_activation"],
              seed=manifest["seed"])
    return net, manifest.get("extra")
