"""Minimal dense numerical kernel.

Dense 2-D arrays are plain ``numpy.ndarray`` (row-major, shape = (rows, cols));
this module adds the named-parameter container, the handful of ops the network
needs, the Adam optimizer and a central-difference gradient verifier.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DeterminismError, DimensionError

PROB_FLOOR = 1e-12  # floor applied inside the log so confident misses stay finite


class Parameter:
    """A named dense array with gradient and Adam moment buffers."""

    __slots__ = ("name", "value", "grad", "m1", "m2", "step_count")

    def __init__(self, name: str, value: np.ndarray):
        value = np.asarray(value)
        if value.ndim != 2:
            raise DimensionError(f"parameter {name!r} must be 2-D, got shape {value.shape}")
        self.name = name
        self.value = value
        self.grad = np.zeros_like(value)
        self.m1 = np.zeros_like(value)
        self.m2 = np.zeros_like(value)
        self.step_count = 0

    @property
    def shape(self):
        return self.value.shape

    @property
    def dtype(self):
        return self.value.dtype

    def zero_grad(self) -> None:
        self.grad[:] = 0

    def astype(self, dtype) -> "Parameter":
        """Deep copy at another precision, carrying grad and moments along."""
        p = Parameter(self.name, self.value.astype(dtype))
        p.grad = self.grad.astype(dtype)
        p.m1 = self.m1.astype(dtype)
        p.m2 = self.m2.astype(dtype)
        p.step_count = self.step_count
        return p

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.value.shape}, dtype={self.value.dtype})"


@dataclass
class AdamConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    return a @ b


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with per-row max subtraction for stability."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    np.exp(shifted, out=shifted)
    shifted /= shifted.sum(axis=1, keepdims=True)
    return shifted


def cross_entropy(probs: np.ndarray, targets: np.ndarray) -> float:
    """Mean negative log-likelihood of the target index per row."""
    targets = np.asarray(targets)
    if targets.size and (targets.min() < 0 or targets.max() >= probs.shape[1]):
        raise IndexError(
            f"target index out of range for {probs.shape[1]} columns: "
            f"[{targets.min()}, {targets.max()}]"
        )
    picked = probs[np.arange(probs.shape[0]), targets]
    return float(-np.log(np.maximum(picked, PROB_FLOOR)).mean())


def adam_step(p: Parameter, cfg: AdamConfig) -> Parameter:
    """Bias-corrected Adam update, in place. The gradient is left for the caller to zero."""
    p.step_count += 1
    t = p.step_count
    g = p.grad
    p.m1 *= cfg.beta1
    p.m1 += (1.0 - cfg.beta1) * g
    p.m2 *= cfg.beta2
    p.m2 += (1.0 - cfg.beta2) * (g * g)
    m_hat = p.m1 / (1.0 - cfg.beta1**t)
    v_hat = p.m2 / (1.0 - cfg.beta2**t)
    p.value -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
    return p


def global_norm_clip(params, max_norm: float) -> float:
    """Scale all gradients so their joint L2 norm is at most max_norm. Returns the pre-clip norm."""
    total = 0.0
    for p in params:
        total += float((p.grad.astype(np.float64) ** 2).sum())
    norm = total**0.5
    if max_norm is not None and norm > max_norm and norm > 0:
        scale = max_norm / norm
        for p in params:
            p.grad *= scale
    return norm


def finite_diff_check(loss_fn, params, h: float = 1e-4, max_coords: int = 5000, seed: int = 0) -> float:
    """Compare analytic gradients (in ``p.grad``) against central differences.

    ``loss_fn(params)`` must be deterministic; it is re-evaluated with single
    coordinates perturbed in place. All coordinates are checked when the total
    count is below ``max_coords``, otherwise a seeded sample of that size.
    Returns the max of ``|a - n| / max(|a|, |n|, 1e-8)`` over checked coords.
    """
    base = loss_fn(params)
    again = loss_fn(params)
    if base != again:
        raise DeterminismError(f"loss_fn is not deterministic: {base!r} != {again!r}")

    sizes = [p.value.size for p in params]
    total = int(sum(sizes))
    if total <= max_coords:
        coords = [(pi, ci) for pi, n in enumerate(sizes) for ci in range(n)]
    else:
        rng = np.random.default_rng(seed)
        flat = rng.choice(total, size=max_coords, replace=False)
        offsets = np.cumsum([0] + sizes)
        coords = []
        for fc in sorted(flat.tolist()):
            pi = int(np.searchsorted(offsets, fc, side="right")) - 1
            coords.append((pi, fc - int(offsets[pi])))

    worst = 0.0
    for pi, ci in coords:
        flat_value = params[pi].value.reshape(-1)
        orig = flat_value[ci]
        flat_value[ci] = orig + h
        up = loss_fn(params)  # native dtype kept: a float() cast here would quantize wide losses
        flat_value[ci] = orig - h
        down = loss_fn(params)
        flat_value[ci] = orig
        numeric = (up - down) / (2.0 * h)
        analytic = params[pi].grad.reshape(-1)[ci]
        err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)
        if err > worst:
            worst = float(err)
    return worst
