#!/usr/bin/env python3
"""Compare the compiled kernels against their pure-NumPy twins.

The package selects between a numba-compiled kernel and a vectorized
NumPy fallback at import time via the JUMPWAVE_NO_NUMBA environment
variable. This script times both paths for the two hot kernels (the
explicit PIDE step and the lattice backward induction) with warmup
runs so JIT compilation is excluded, and reports median wall times.

Usage:
    python benchmarks/bench_kernels.py [--iterations N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from jumpwave.european import BarrierSpec, OptionSpec
from jumpwave.fd import _jump_stencil, _march_kernel, _march_numpy
from jumpwave.model import JumpSpec, ModelParams
from jumpwave.tree import _roll_back_kernel, _roll_back_numpy


def bench(func, args, iterations: int, warmup: int = 3) -> float:
    """Median wall time of func(*args) after warmup runs."""
    for _ in range(warmup):
        func(*args)
    times = []
    for _ in range(iterations):
        start = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def fd_step_args():
    """A realistic explicit-step workload: Merton model, 801 nodes."""
    model = ModelParams(r=0.08, delta=0.12, sigma=0.2, lam=2.5,
                        jump=JumpSpec("normal", mu_j=0.05, sigma_j=0.03))
    n = 801
    x = np.linspace(-3.0, 3.0, n)
    dx = x[1] - x[0]
    k_lo, w = _jump_stencil(model, dx)
    k_hi = k_lo + len(w) - 1
    n_pad_lo = max(0, -k_lo)
    n_pad_hi = max(0, k_hi)
    ex = np.exp(x)
    payoff = np.maximum(ex - 1.0, 0.0)
    u = payoff + 0.01
    lo_tail = np.zeros(n_pad_lo)
    hi_tail = np.exp(x[-1] + (1 + np.arange(n_pad_hi)) * dx) - 1.0
    zeta_d = float(w @ np.exp((k_lo + np.arange(len(w))) * dx) - 1.0)
    drift = model.r - model.delta - model.lam * zeta_d - 0.5 * model.sigma**2
    return (u.copy(), u.copy(), payoff, lo_tail, lo_tail, hi_tail,
            hi_tail, w, k_lo, 1e-5, dx, 0.5 * model.sigma**2, drift,
            model.r, model.lam, n_pad_lo, n_pad_hi)


def tree_roll_args(n_steps: int = 800):
    """A lattice backward-induction workload."""
    n_nodes = 2 * n_steps + 1
    j = np.arange(-n_steps, n_steps + 1)
    dx = 0.2 * np.sqrt(0.75 / n_steps)
    S = 45.0 * np.exp(j * dx)
    intrinsic = np.maximum(45.0 - S, 0.0)
    dead = S >= 50.0
    v = intrinsic.copy()
    v[dead] = 0.0
    return (v, intrinsic, dead, 0.0, 0.3, 0.4, 0.3, 0.9999, n_steps, True)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iterations", type=int, default=50)
    args = parser.parse_args()

    cases = [
        ("fd explicit step", _march_kernel, _march_numpy, fd_step_args),
        ("tree backward induction", _roll_back_kernel, _roll_back_numpy,
         tree_roll_args),
    ]
    print(f"{'kernel':<26} {'compiled':>12} {'numpy':>12} {'speedup':>9}")
    for name, compiled, fallback, make_args in cases:
        # the tree kernel mutates its value buffer in place; that only
        # changes the numbers, not the amount of work per call
        t_jit = bench(compiled, make_args(), args.iterations)
        t_np = bench(fallback, make_args(), args.iterations)
        print(f"{name:<26} {t_jit * 1e3:>10.3f}ms {t_np * 1e3:>10.3f}ms "
              f"{t_np / t_jit:>8.2f}x")


if __name__ == "__main__":
    main()
