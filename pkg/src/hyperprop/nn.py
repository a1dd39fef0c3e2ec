"""Minimal dense network used as the task head.

Everything is plain numpy: rectifier hidden layers, identity output,
inverted dropout, numerically stabilized losses, and Adam with
decoupled weight decay.  Gradients are exact (verified against finite
differences in the test suite), and every stochastic choice flows from
an explicit generator, so training is bit-reproducible per seed.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, DomainError, ParseError

__all__ = [
    "MlpParams",
    "TrainConfig",
    "AdamState",
    "init_mlp",
    "mlp_forward",
    "mlp_backward",
    "softmax_cross_entropy",
    "sigmoid_bce",
    "adam_step",
    "save_checkpoint",
    "load_checkpoint",
]


@dataclass
class MlpParams:
    """Weight/bias lists; layer i maps dims[i] -> dims[i+1]."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple([self.weights[0].shape[0]] + [w.shape[1] for w in self.weights])

    def copy(self) -> "MlpParams":
        return MlpParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and schedule settings for a task head."""

    learning_rate: float
    epochs: int
    dropout: float = 0.0
    weight_decay: float = 0.0
    hidden_dims: tuple[int, ...] = (64,)
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise DomainError(f"learning rate must be positive, got {self.learning_rate}")
        if self.epochs <= 0:
            raise DomainError(f"epochs must be positive, got {self.epochs}")
        if not 0.0 <= self.dropout < 1.0:
            raise DomainError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.weight_decay < 0.0:
            raise DomainError(f"weight decay must be nonnegative, got {self.weight_decay}")


@dataclass
class AdamState:
    """First/second moment accumulators plus the shared step counter."""

    m_weights: list[np.ndarray]
    v_weights: list[np.ndarray]
    m_biases: list[np.ndarray]
    v_biases: list[np.ndarray]
    step: int = 0

    @classmethod
    def like(cls, params: MlpParams) -> "AdamState":
        return cls(
            m_weights=[np.zeros_like(w) for w in params.weights],
            v_weights=[np.zeros_like(w) for w in params.weights],
            m_biases=[np.zeros_like(b) for b in params.biases],
            v_biases=[np.zeros_like(b) for b in params.biases],
        )


def init_mlp(dims, rng: np.random.Generator) -> MlpParams:
    """Uniform(-a, a) weights with a = sqrt(6 / (d_in + d_out)); zero biases."""
    dims = [int(d) for d in dims]
    if len(dims) < 2 or any(d <= 0 for d in dims):
        raise DomainError(f"need at least in/out dims, all positive; got {dims}")
    weights, biases = [], []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (d_in + d_out))
        weights.append(rng.uniform(-bound, bound, size=(d_in, d_out)))
        biases.append(np.zeros(d_out))
    return MlpParams(weights=weights, biases=biases)


@dataclass
class _ForwardCache:
    inputs: list[np.ndarray] = field(default_factory=list)  # layer inputs a_{i-1}
    preacts: list[np.ndarray] = field(default_factory=list)  # hidden z_i
    masks: list[np.ndarray | None] = field(default_factory=list)  # dropout keep scale


def _forward(params, x, dropout, train, rng):
    cache = _ForwardCache()
    a = x
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        cache.inputs.append(a)
        z = a @ w + b
        if i == last:
            return z, cache
        cache.preacts.append(z)
        h = np.maximum(z, 0.0)
        if train and dropout > 0.0:
            keep = rng.random(h.shape) >= dropout
            scale = keep / (1.0 - dropout)  # inverted dropout: eval path is identity
            h = h * scale
            cache.masks.append(scale)
        else:
            cache.masks.append(None)
        a = h
    raise AssertionError("unreachable")  # pragma: no cover


def mlp_forward(
    params: MlpParams,
    x: np.ndarray,
    dropout: float = 0.0,
    train: bool = False,
    rng: np.random.Generator | None = None,
    cache: bool = False,
):
    """Batch forward pass; returns logits, plus the cache when asked.

    Dropout applies to hidden activations only and only in train mode;
    a generator is then required so masks are reproducible.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.weights[0].shape[0]:
        raise DimensionError(
            f"input must be (batch, {params.weights[0].shape[0]}), got {x.shape}"
        )
    if train and dropout > 0.0 and rng is None:
        raise DomainError("dropout in train mode needs a random generator")
    logits, fwd = _forward(params, x, dropout, train, rng)
    return (logits, fwd) if cache else logits


def mlp_backward(params: MlpParams, fwd: _ForwardCache, grad_logits: np.ndarray):
    """Parameter gradients from the cached forward pass.

    Returns (weight grads, bias grads) aligned with ``params``.
    """
    grads_w = [None] * len(params.weights)
    grads_b = [None] * len(params.biases)
    delta = grad_logits
    for i in range(len(params.weights) - 1, -1, -1):
        grads_w[i] = fwd.inputs[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i == 0:
            break
        delta = delta @ params.weights[i].T
        mask = fwd.masks[i - 1]
        if mask is not None:
            delta = delta * mask
        delta = delta * (fwd.preacts[i - 1] > 0.0)
    return grads_w, grads_b


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray):
    """Mean NLL over ``mask`` rows; also the gradient w.r.t. logits.

    Rows outside the mask contribute nothing (zero gradient); the
    softmax is stabilized by row-max subtraction.
    """
    mask = np.asarray(mask, dtype=np.int64)
    if mask.size == 0:
        raise DomainError("loss over an empty index set is undefined")
    z = logits[mask]
    y = np.asarray(labels, dtype=np.int64)[mask]
    if y.min() < 0 or y.max() >= logits.shape[1]:
        raise DomainError("masked labels must be valid class indices")
    shifted = z - z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(log_norm - shifted[np.arange(len(y)), y]))
    probs = np.exp(shifted - log_norm[:, None])
    probs[np.arange(len(y)), y] -= 1.0
    grad = np.zeros_like(logits)
    grad[mask] = probs / len(y)
    return loss, grad


def sigmoid_bce(logits: np.ndarray, targets: np.ndarray):
    """Mean binary cross-entropy on raw logits, overflow-safe.

    Uses max(z, 0) - z*t + log(1 + exp(-|z|)); the gradient is
    (sigmoid(z) - t) / k.
    """
    z = np.asarray(logits, dtype=np.float64).ravel()
    t = np.asarray(targets, dtype=np.float64).ravel()
    if z.shape != t.shape:
        raise DimensionError(f"logits {z.shape} vs targets {t.shape}")
    if z.size == 0:
        raise DomainError("loss over an empty batch is undefined")
    loss = float(np.mean(np.maximum(z, 0.0) - z * t + np.log1p(np.exp(-np.abs(z)))))
    e = np.exp(-np.abs(z))  # exp of a nonpositive number: never overflows
    sig = np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    grad = (sig - t) / z.size
    return loss, grad


def adam_step(params: MlpParams, grads_w, grads_b, state: AdamState, cfg: TrainConfig):
    """One bias-corrected Adam update with decoupled weight decay.

    Weight decay subtracts lr * wd * param directly (biases included),
    independent of the moment estimates.  Mutates params/state in place
    and returns them.
    """
    state.step += 1
    b1, b2, eps = cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps
    corr1 = 1.0 - b1 ** state.step
    corr2 = 1.0 - b2 ** state.step
    for p, g, m, v in zip(
        params.weights + params.biases,
        list(grads_w) + list(grads_b),
        state.m_weights + state.m_biases,
        state.v_weights + state.v_biases,
    ):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        update = (m / corr1) / (np.sqrt(v / corr2) + eps)
        p -= cfg.learning_rate * update
        if cfg.weight_decay > 0.0:
            p -= cfg.learning_rate * cfg.weight_decay * p
    return params, state


_CKPT_MAGIC = b"MLPC"


def save_checkpoint(path: str | Path, params: MlpParams) -> None:
    """Layer dims then the f64 weight/bias payload, little-endian."""
    dims = params.dims
    with Path(path).open("wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(struct.pack("<Q", len(dims)))
        fh.write(struct.pack(f"<{len(dims)}Q", *dims))
        for w, b in zip(params.weights, params.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_checkpoint(path: str | Path) -> MlpParams:
    path = Path(path)
    blob = path.read_bytes()
    if blob[:4] != _CKPT_MAGIC:
        raise ParseError(f"{path.name}: bad magic {blob[:4]!r}")
    (ndims,) = struct.unpack_from("<Q", blob, 4)
    dims = struct.unpack_from(f"<{ndims}Q", blob, 12)
    offset = 12 + 8 * ndims
    weights, biases = [], []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        w = np.frombuffer(blob, dtype="<f8", count=d_in * d_out, offset=offset)
        offset += d_in * d_out * 8
        b = np.frombuffer(blob, dtype="<f8", count=d_out, offset=offset)
        offset += d_out * 8
        weights.append(w.reshape(d_in, d_out).copy())
        biases.append(b.copy())
    if offset != len(blob):
        raise ParseError(f"{path.name}: trailing bytes after payload")
    return MlpParams(weights=weights, biases=biases)
