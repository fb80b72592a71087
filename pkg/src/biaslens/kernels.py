"""Hot pointwise kernels for the LSTM stack.

The gate math runs once per (layer, timestep) and dominates non-BLAS runtime,
so it is JIT-compiled with numba. A pure-numpy implementation of every kernel
is kept as a fallback and can be forced with the environment variable
``BIASLENS_NO_NUMBA=1`` (useful for debugging and for the benchmark in
``benchmarks/bench_kernels.py``, which times both paths).

Gate layout inside the fused pre-activation matrix (B, 4H) is
``[input | forget | candidate | output]``.
"""

import math
import os

import numpy as np

__all__ = ["BACKEND", "gates_forward", "gates_backward"]


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _gates_forward_np(pre, c_prev, gates, c, tanh_c, h):
    """Activate fused gate pre-activations and advance the cell state.

    pre (B, 4H) is read; gates (B, 4H), c, tanh_c, h (B, H) are written.
    """
    hd = c_prev.shape[1]
    gates[:, :hd] = _sigmoid(pre[:, :hd])
    gates[:, hd : 2 * hd] = _sigmoid(pre[:, hd : 2 * hd])
    np.tanh(pre[:, 2 * hd : 3 * hd], out=gates[:, 2 * hd : 3 * hd])
    gates[:, 3 * hd :] = _sigmoid(pre[:, 3 * hd :])
    c[:] = gates[:, hd : 2 * hd] * c_prev + gates[:, :hd] * gates[:, 2 * hd : 3 * hd]
    np.tanh(c, out=tanh_c)
    h[:] = gates[:, 3 * hd :] * tanh_c


def _gates_backward_np(gates, tanh_c, c_prev, dh, dc_in, dpre, dc_prev):
    """Backward through one timestep's pointwise gate math.

    dh is the gradient arriving at h_t, dc_in the carried cell gradient.
    Writes dpre (B, 4H) (gradient w.r.t. pre-activations) and dc_prev (B, H).
    """
    hd = c_prev.shape[1]
    i = gates[:, :hd]
    f = gates[:, hd : 2 * hd]
    g = gates[:, 2 * hd : 3 * hd]
    o = gates[:, 3 * hd :]
    dc = dh * o * (1.0 - tanh_c * tanh_c) + dc_in
    dpre[:, :hd] = dc * g * i * (1.0 - i)
    dpre[:, hd : 2 * hd] = dc * c_prev * f * (1.0 - f)
    dpre[:, 2 * hd : 3 * hd] = dc * i * (1.0 - g * g)
    dpre[:, 3 * hd :] = dh * tanh_c * o * (1.0 - o)
    dc_prev[:] = dc * f


def _want_numba() -> bool:
    return os.environ.get("BIASLENS_NO_NUMBA", "").strip().lower() not in ("1", "true", "yes")


try:
    from numba import njit

    _HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAS_NUMBA = False

if _HAS_NUMBA:

    @njit(cache=True)
    def _gates_forward_nb(pre, c_prev, gates, c, tanh_c, h):
        b, hd = c_prev.shape
        for r in range(b):
            for j in range(hd):
                ig = 1.0 / (1.0 + math.exp(-pre[r, j]))
                fg = 1.0 / (1.0 + math.exp(-pre[r, hd + j]))
                gg = math.tanh(pre[r, 2 * hd + j])
                og = 1.0 / (1.0 + math.exp(-pre[r, 3 * hd + j]))
                gates[r, j] = ig
                gates[r, hd + j] = fg
                gates[r, 2 * hd + j] = gg
                gates[r, 3 * hd + j] = og
                cv = fg * c_prev[r, j] + ig * gg
                c[r, j] = cv
                tc = math.tanh(cv)
                tanh_c[r, j] = tc
                h[r, j] = og * tc

    @njit(cache=True)
    def _gates_backward_nb(gates, tanh_c, c_prev, dh, dc_in, dpre, dc_prev):
        b, hd = c_prev.shape
        for r in range(b):
            for j in range(hd):
                i = gates[r, j]
                f = gates[r, hd + j]
                g = gates[r, 2 * hd + j]
                o = gates[r, 3 * hd + j]
                tc = tanh_c[r, j]
                dc = dh[r, j] * o * (1.0 - tc * tc) + dc_in[r, j]
                dpre[r, j] = dc * g * i * (1.0 - i)
                dpre[r, hd + j] = dc * c_prev[r, j] * f * (1.0 - f)
                dpre[r, 2 * hd + j] = dc * i * (1.0 - g * g)
                dpre[r, 3 * hd + j] = dh[r, j] * tc * o * (1.0 - o)
                dc_prev[r, j] = dc * f


if _HAS_NUMBA and _want_numba():
    BACKEND = "numba"
    _JIT_DTYPES = (np.float32, np.float64)
    # crossover measured by benchmarks/bench_kernels.py: the scalar JIT loop
    # beats numpy's SIMD transcendentals only for small batches (the per-
    # sentence serving path); large training batches keep numpy's exp/tanh
    _FORWARD_JIT_MAX_ELEMENTS = 512

    def gates_forward(pre, c_prev, gates, c, tanh_c, h):
        # wider verification dtypes (e.g. longdouble) take the numpy path
        if pre.dtype.type in _JIT_DTYPES and pre.size <= _FORWARD_JIT_MAX_ELEMENTS:
            _gates_forward_nb(pre, c_prev, gates, c, tanh_c, h)
        else:
            _gates_forward_np(pre, c_prev, gates, c, tanh_c, h)

    def gates_backward(gates, tanh_c, c_prev, dh, dc_in, dpre, dc_prev):
        if gates.dtype.type in _JIT_DTYPES:
            _gates_backward_nb(gates, tanh_c, c_prev, dh, dc_in, dpre, dc_prev)
        else:
            _gates_backward_np(gates, tanh_c, c_prev, dh, dc_in, dpre, dc_prev)

else:
    BACKEND = "numpy"
    gates_forward = _gates_forward_np
    gates_backward = _gates_backward_np
