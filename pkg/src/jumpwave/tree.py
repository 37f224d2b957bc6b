"""Trinomial lattice benchmark for barrier options under Black-Scholes.

The lattice uses a stretched log-price step so that the barrier falls
exactly on a node layer: with a natural step of sigma*sqrt(dt), the
stretch factor is chosen as lam = n0 / floor(n0) >= 1 where n0 is the
barrier distance in natural steps. Without that alignment the effective
barrier seen by the lattice sits between layers and the price oscillates
in the step count instead of converging.

Knocked-out layers carry the rebate, exercise is applied node-wise for
the American contract, and a European mode is kept for validation
against the closed-form knock-out formulas.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ._accel import maybe_njit, numba_disabled
from .errors import GridTooCoarse
from .european import BarrierSpec, OptionSpec, _rebate_amount, barrier_alive
from .model import ModelParams


@dataclass(frozen=True)
class TreeSettings:
    """Lattice knobs."""

    n_steps: int = 5000

    def __post_init__(self) -> None:
        if self.n_steps < 10:
            raise ValueError("n_steps must be at least 10")


@dataclass
class TreeResult:
    """Benchmark price from one lattice run."""

    price: float
    n_steps: int
    stretch: float
    wall_time_s: float


@maybe_njit
def _roll_back_kernel(v, intrinsic, dead, rebate, pu, pm, pd, disc,
                      n_steps, american):
    """Backward induction over the full node range, loop form."""
    n_nodes = v.shape[0]
    scratch = np.empty_like(v)
    for m in range(n_steps - 1, -1, -1):
        lo = n_steps - m
        hi = n_nodes - (n_steps - m)
        for i in range(lo, hi):
            val = disc * (pu * v[i + 1] + pm * v[i] + pd * v[i - 1])
            if dead[i]:
                val = rebate
            elif american and intrinsic[i] > val:
                val = intrinsic[i]
            scratch[i] = val
        v[lo:hi] = scratch[lo:hi]
    return v[n_steps]


def _roll_back_numpy(v, intrinsic, dead, rebate, pu, pm, pd, disc,
                     n_steps, american):
    """Vectorized twin of the compiled induction kernel."""
    n_nodes = v.shape[0]
    for m in range(n_steps - 1, -1, -1):
        lo = n_steps - m
        hi = n_nodes - (n_steps - m)
        val = disc * (pu * v[lo + 1:hi + 1] + pm * v[lo:hi]
                      + pd * v[lo - 1:hi - 1])
        if american:
            val = np.maximum(val, intrinsic[lo:hi])
        val[dead[lo:hi]] = rebate
        v[lo:hi] = val
    return v[n_steps]


def _probabilities(sigma: float, dt: float, mu_dt: float, dx: float):
    var = sigma * sigma * dt
    pu = 0.5 * ((var + mu_dt * mu_dt) / (dx * dx) + mu_dt / dx)
    pd = 0.5 * ((var + mu_dt * mu_dt) / (dx * dx) - mu_dt / dx)
    pm = 1.0 - pu - pd
    if min(pu, pm, pd) < 0.0 or max(pu, pm, pd) > 1.0:
        raise GridTooCoarse(
            f"trinomial branch probabilities ({pu:.4g}, {pm:.4g}, "
            f"{pd:.4g}) leave [0, 1]; increase n_steps"
        )
    return pu, pm, pd


def _run_lattice(model, spec, S0, dx, dead, settings, american):
    n = settings.n_steps
    dt = spec.maturity / n
    mu_dt = (model.r - model.delta - 0.5 * model.sigma**2) * dt
    pu, pm, pd = _probabilities(model.sigma, dt, mu_dt, dx)
    disc = math.exp(-model.r * dt)
    j = np.arange(-n, n + 1)
    S = S0 * np.exp(j * dx)
    s = 1.0 if spec.side == "call" else -1.0
    intrinsic = np.maximum(s * (S - spec.strike), 0.0)
    return pu, pm, pd, disc, intrinsic


def tree_vanilla(
    model: ModelParams,
    spec: OptionSpec,
    S0: float,
    settings: TreeSettings | None = None,
    american: bool = True,
) -> TreeResult:
    """Vanilla lattice price; used for validation of the induction."""
    _check_bs(model)
    settings = settings or TreeSettings()
    t0 = time.perf_counter()
    n = settings.n_steps
    dt = spec.maturity / n
    # a mild stretch keeps the middle-branch probability safely positive
    stretch = math.sqrt(1.5)
    dx = stretch * model.sigma * math.sqrt(dt)
    dead = np.zeros(2 * n + 1, dtype=np.bool_)
    pu, pm, pd, disc, intrinsic = _run_lattice(
        model, spec, S0, dx, dead, settings, american
    )
    v = intrinsic.copy()
    roll = _roll_back_numpy if numba_disabled() else _roll_back_kernel
    price = float(roll(v, intrinsic, dead, 0.0, pu, pm, pd, disc, n,
                       american))
    return TreeResult(price=price, n_steps=n, stretch=stretch,
                      wall_time_s=time.perf_counter() - t0)


def tree_barrier(
    model: ModelParams,
    spec: OptionSpec,
    barrier: BarrierSpec,
    S0: float,
    settings: TreeSettings | None = None,
    american: bool = True,
) -> TreeResult:
    """Knock-out barrier lattice price with the barrier on a node layer."""
    _check_bs(model)
    settings = settings or TreeSettings()
    t0 = time.perf_counter()
    n = settings.n_steps
    rebate = _rebate_amount(spec, barrier)
    if not barrier_alive(barrier, S0):
        return TreeResult(price=rebate, n_steps=0, stretch=1.0,
                          wall_time_s=time.perf_counter() - t0)

    dt = spec.maturity / n
    sq = model.sigma * math.sqrt(dt)
    d0 = abs(math.log(S0 / barrier.level))
    n0 = d0 / sq
    if n0 < 1.0:
        raise GridTooCoarse(
            f"barrier lies within one natural lattice step of the spot "
            f"(distance {n0:.3g} steps); increase n_steps"
        )
    eta = int(math.floor(n0))
    stretch = n0 / eta
    dx = stretch * sq

    j = np.arange(-n, n + 1)
    down = barrier.direction == "down-and-out"
    dead = j <= -eta if down else j >= eta
    pu, pm, pd, disc, intrinsic = _run_lattice(
        model, spec, S0, dx, dead, settings, american
    )
    v = intrinsic.copy()
    v[dead] = rebate
    roll = _roll_back_numpy if numba_disabled() else _roll_back_kernel
    price = float(roll(v, intrinsic, dead, rebate, pu, pm, pd, disc, n,
                       american))
    return TreeResult(price=price, n_steps=n, stretch=stretch,
                      wall_time_s=time.perf_counter() - t0)


def _check_bs(model: ModelParams) -> None:
    if model.lam != 0.0:
        raise ValueError("the lattice benchmark is Black-Scholes only")
