"""Benchmark the JIT-compiled LSTM gate kernels against the pure-numpy
fallback (the path selected by BIASLENS_NO_NUMBA=1).

Usage: python benchmarks/bench_kernels.py [--repeats 200]
"""

import argparse
from timeit import default_timer as timer

import numpy as np

from biaslens import kernels


def _case(rng, batch, hidden, dtype):
    pre = rng.normal(size=(batch, 4 * hidden)).astype(dtype)
    c_prev = rng.normal(size=(batch, hidden)).astype(dtype)
    gates = np.empty_like(pre)
    c = np.empty_like(c_prev)
    tanh_c = np.empty_like(c_prev)
    h = np.empty_like(c_prev)
    return pre, c_prev, gates, c, tanh_c, h


def bench_forward(fn, args, repeats):
    fn(*args)  # warm up (JIT compile on first call)
    start = timer()
    for _ in range(repeats):
        fn(*args)
    return (timer() - start) / repeats


def bench_backward(fn, fwd_args, repeats):
    pre, c_prev, gates, c, tanh_c, h = fwd_args
    kernels._gates_forward_np(pre, c_prev, gates, c, tanh_c, h)
    rng = np.random.default_rng(1)
    dh = rng.normal(size=c_prev.shape).astype(c_prev.dtype)
    dc_in = rng.normal(size=c_prev.shape).astype(c_prev.dtype)
    dpre = np.empty_like(pre)
    dc_prev = np.empty_like(c_prev)
    args = (gates, tanh_c, c_prev, dh, dc_in, dpre, dc_prev)
    fn(*args)
    start = timer()
    for _ in range(repeats):
        fn(*args)
    return (timer() - start) / repeats


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    if kernels.BACKEND != "numba":
        print("note: numba backend unavailable or disabled; timing numpy against itself")
        jit_forward, jit_backward = kernels._gates_forward_np, kernels._gates_backward_np
    else:
        jit_forward, jit_backward = kernels._gates_forward_nb, kernels._gates_backward_nb

    rng = np.random.default_rng(0)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'case':<24}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for batch, hidden in ((1, 64), (16, 64), (32, 128), (64, 256)):
        for dtype in (np.float32, np.float64):
            case = _case(rng, batch, hidden, dtype)
            label = f"B={batch} H={hidden} {np.dtype(dtype).name}"

            t_np = bench_forward(kernels._gates_forward_np, case, args.repeats)
            t_nb = bench_forward(jit_forward, case, args.repeats)
            # both paths must agree before their timings mean anything
            ref = _case(rng, batch, hidden, dtype)
            ref[0][:] = case[0]
            ref[1][:] = case[1]
            kernels._gates_forward_np(*ref)
            jit_forward(*case)
            assert np.allclose(ref[5], case[5], rtol=1e-5, atol=1e-6)
            print(f"{label + ' fwd':<24}{t_np * 1e6:>10.1f}us{t_nb * 1e6:>10.1f}us"
                  f"{t_np / t_nb:>9.1f}x")

            t_np = bench_backward(kernels._gates_backward_np, case, args.repeats)
            t_nb = bench_backward(jit_backward, case, args.repeats)
            print(f"{label + ' bwd':<24}{t_np * 1e6:>10.1f}us{t_nb * 1e6:>10.1f}us"
                  f"{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
