import os
import subprocess
import sys

import numpy as np
import pytest

from biaslens import kernels


def _random_case(rng, b=5, h=8, dtype=np.float64):
    pre = rng.normal(size=(b, 4 * h)).astype(dtype)
    c_prev = rng.normal(size=(b, h)).astype(dtype)
    return pre, c_prev


@pytest.mark.parametrize("dtype", [np.float32, np.float64])
def test_forward_backends_agree(dtype):
    rng = np.random.default_rng(0)
    pre, c_prev = _random_case(rng, dtype=dtype)
    outs = []
    for fn in (kernels._gates_forward_np, kernels.gates_forward):
        gates = np.empty_like(pre)
        c = np.empty_like(c_prev)
        tanh_c = np.empty_like(c_prev)
        h = np.empty_like(c_prev)
        fn(pre, c_prev, gates, c, tanh_c, h)
        outs.append((gates.copy(), c.copy(), tanh_c.copy(), h.copy()))
    for a, b in zip(*outs):
        assert np.allclose(a, b, rtol=1e-6, atol=1e-6)


@pytest.mark.parametrize("dtype", [np.float32, np.float64])
def test_backward_backends_agree(dtype):
    rng = np.random.default_rng(1)
    pre, c_prev = _random_case(rng, dtype=dtype)
    gates = np.empty_like(pre)
    c = np.empty_like(c_prev)
    tanh_c = np.empty_like(c_prev)
    h = np.empty_like(c_prev)
    kernels._gates_forward_np(pre, c_prev, gates, c, tanh_c, h)
    dh = rng.normal(size=c_prev.shape).astype(dtype)
    dc_in = rng.normal(size=c_prev.shape).astype(dtype)
    outs = []
    for fn in (kernels._gates_backward_np, kernels.gates_backward):
        dpre = np.empty_like(pre)
        dc_prev = np.empty_like(c_prev)
        fn(gates, tanh_c, c_prev, dh, dc_in, dpre, dc_prev)
        outs.append((dpre.copy(), dc_prev.copy()))
    for a, b in zip(*outs):
        assert np.allclose(a, b, rtol=1e-6, atol=1e-6)


def test_longdouble_takes_numpy_path():
    rng = np.random.default_rng(2)
    pre, c_prev = _random_case(rng, dtype=np.longdouble)
    gates = np.empty_like(pre)
    c = np.empty_like(c_prev)
    tanh_c = np.empty_like(c_prev)
    h = np.empty_like(c_prev)
    kernels.gates_forward(pre, c_prev, gates, c, tanh_c, h)  # must not raise
    assert np.isfinite(h.astype(np.float64)).all()


def test_env_flag_selects_numpy_backend():
    code = "from biaslens import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, BIASLENS_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_default_backend_is_numba_when_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        pytest.skip("numba not installed")
    if os.environ.get("BIASLENS_NO_NUMBA"):
        pytest.skip("numba disabled via environment")
    assert kernels.BACKEND == "numba"
