"""European pricing: vanilla series under jump models, barrier closed forms.

Vanilla prices under the constant-jump and normal-jump models are Poisson
mixtures of Black-Scholes values; conditioning on the number of jumps leaves
a lognormal terminal law with an adjusted forward and, for normal jumps, an
adjusted variance. All Greeks needed by the perturbation solvers (delta,
gamma, theta in remaining maturity, and the mixed maturity-spot derivative)
are differentiated term by term.

Barrier prices are Black-Scholes only and come from the reflection identity
for the log-price with drift m = r - delta - sigma^2/2: the knock-out value
of a payoff truncated to the live side equals V(S0) minus
(L/S0)^(2m/sigma^2) V(L^2/S0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from ._accel import maybe_njit
from .errors import SeriesNotConverged
from .model import ModelParams, zeta

Side = Literal["call", "put"]
BarrierDirection = Literal["down-and-out", "up-and-out"]
RebateRule = Literal["zero", "intrinsic-at-barrier"]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_SERIES_TOL = 1e-12
_SERIES_NMAX = 170


@dataclass(frozen=True)
class OptionSpec:
    """Contract terms of a vanilla option."""

    side: Side
    strike: float
    maturity: float

    def __post_init__(self) -> None:
        if self.side not in ("call", "put"):
            raise ValueError(f"side must be 'call' or 'put', got {self.side!r}")
        if not self.strike > 0.0:
            raise ValueError("strike must be > 0")
        if not self.maturity > 0.0:
            raise ValueError("maturity must be > 0")


@dataclass(frozen=True)
class BarrierSpec:
    """Knock-out barrier attached to a vanilla contract."""

    level: float
    direction: BarrierDirection
    rebate: RebateRule = "zero"

    def __post_init__(self) -> None:
        if not self.level > 0.0:
            raise ValueError("barrier level must be > 0")
        if self.direction not in ("down-and-out", "up-and-out"):
            raise ValueError(f"unknown barrier direction {self.direction!r}")
        if self.rebate not in ("zero", "intrinsic-at-barrier"):
            raise ValueError(f"unknown rebate rule {self.rebate!r}")


@maybe_njit
def _norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / _SQRT2)


@maybe_njit
def _norm_pdf(z: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


def bs_kernel(X: float, Sigma: float, T: float, K: float) -> float:
    """Undiscounted Black-Scholes call kernel X N(d1) - K N(d2)."""
    if K <= 0.0:
        return X
    v = Sigma * math.sqrt(T)
    if v <= 0.0:
        return max(X - K, 0.0)
    d1 = math.log(X / K) / v + 0.5 * v
    return X * _norm_cdf(d1) - K * _norm_cdf(d1 - v)


@maybe_njit
def _euro_series(
    x: float,
    K: float,
    T: float,
    r: float,
    delta: float,
    sigma: float,
    lam: float,
    kind: int,  # 0 none, 1 constant, 2 normal
    p1: float,  # phi or mu_j
    p2: float,  # unused or sigma_j
    zv: float,  # expected relative jump size
    is_call: bool,
):
    """Poisson-mixture price and Greeks; returns (price, delta, gamma,
    theta, cross, converged)."""
    c = r - delta - lam * zv  # forward drift rate
    lamT = lam * T
    if kind == 1:
        lq = p1  # log of per-jump forward multiplier
    elif kind == 2:
        lq = math.log1p(zv)
    else:
        lq = 0.0

    price = 0.0
    dlt = 0.0
    gam = 0.0
    tht = 0.0
    crs = 0.0

    log_w = -(lam + r) * T  # log Poisson-discount weight, term 0
    n = 0
    converged = False
    while n <= _SERIES_NMAX:
        if n > 0:
            if lamT <= 0.0:
                converged = True
                break
            log_w += math.log(lamT) - math.log(float(n))
        w = math.exp(log_w)

        Xn = x * math.exp(c * T + n * lq)
        if kind == 2:
            vn = math.sqrt(sigma * sigma * T + n * p2 * p2)
        else:
            vn = sigma * math.sqrt(T)

        lm = math.log(Xn / K)
        d1 = lm / vn + 0.5 * vn
        d2 = d1 - vn
        nd1 = _norm_cdf(d1)
        nd2 = _norm_cdf(d2)
        pd1 = _norm_pdf(d1)

        if is_call:
            kernel = Xn * nd1 - K * nd2
            dkernel_dT = nd1 * c * Xn + Xn * pd1 * sigma * sigma / (2.0 * vn)
            nd1s = nd1
        else:
            kernel = K * (1.0 - nd2) - Xn * (1.0 - nd1)
            dkernel_dT = -(1.0 - nd1) * c * Xn + Xn * pd1 * sigma * sigma / (2.0 * vn)
            nd1s = nd1 - 1.0

        an = w * Xn / x  # discounted forward weight (delta series weight)
        dw_dT = -(lam + r) + (n / T if n > 0 else 0.0)
        dvn_dT = sigma * sigma / (2.0 * vn)
        dd1_dT = c / vn + dvn_dT * (0.5 - lm / (vn * vn))

        term_price = w * kernel
        price += term_price
        dlt += an * nd1s
        gam += w * Xn * pd1 / (x * x * vn)
        tht += w * dw_dT * kernel + w * dkernel_dT
        crs += an * (dw_dT + c) * nd1s + an * pd1 * dd1_dT

        if lamT <= 0.0:
            converged = True
            break
        if n >= lamT and abs(term_price) < _SERIES_TOL * (abs(price) + 1e-300):
            converged = True
            break
        n += 1

    return price, dlt, gam, tht, crs, converged


def _jump_code(model: ModelParams) -> tuple[int, float, float]:
    j = model.jump
    if model.lam == 0.0 or j.variant == "none":
        return 0, 0.0, 0.0
    if j.variant == "constant":
        # a zero-size jump is no jump: route it to the diffusion-only
        # path so both encodings evaluate identically
        if j.phi == 0.0:
            return 0, 0.0, 0.0
        return 1, j.phi, 0.0
    return 2, j.mu_j, j.sigma_j


def _vanilla_bundle(
    model: ModelParams, side: Side, K: float, S0: float, T: float
) -> tuple[float, float, float, float, float]:
    """(price, delta, gamma, theta, d_T delta) of the European vanilla."""
    is_call = side == "call"
    if T <= 0.0:
        intrinsic = max(S0 - K, 0.0) if is_call else max(K - S0, 0.0)
        return intrinsic, 0.0, 0.0, 0.0, 0.0
    if S0 <= 0.0:
        price = 0.0 if is_call else K * math.exp(-model.r * T)
        return price, 0.0, 0.0, 0.0, 0.0
    kind, p1, p2 = _jump_code(model)
    lam = model.lam if kind else 0.0
    out = _euro_series(
        S0, K, T, model.r, model.delta, model.sigma, lam,
        kind, p1, p2, zeta(model), is_call,
    )
    if not out[5]:
        raise SeriesNotConverged(
            f"jump series truncation unmet at n={_SERIES_NMAX}"
        )
    return out[0], out[1], out[2], out[3], out[4]


def european_vanilla(
    model: ModelParams, spec: OptionSpec, S0: float, T: float
) -> float:
    return _vanilla_bundle(model, spec.side, spec.strike, S0, T)[0]


def european_vanilla_delta(
    model: ModelParams, spec: OptionSpec, S0: float, T: float
) -> float:
    return _vanilla_bundle(model, spec.side, spec.strike, S0, T)[1]


def european_vanilla_gamma(
    model: ModelParams, spec: OptionSpec, S0: float, T: float
) -> float:
    return _vanilla_bundle(model, spec.side, spec.strike, S0, T)[2]


def european_vanilla_theta(
    model: ModelParams, spec: OptionSpec, S0: float, T: float
) -> float:
    """Derivative with respect to remaining maturity (not calendar time)."""
    return _vanilla_bundle(model, spec.side, spec.strike, S0, T)[3]


def european_vanilla_cross(
    model: ModelParams, spec: OptionSpec, S0: float, T: float
) -> float:
    """Mixed derivative d/dT d/dS0 of the European price."""
    return _vanilla_bundle(model, spec.side, spec.strike, S0, T)[4]


# ---------------------------------------------------------------------------
# Rebate: discounted hitting-time transform E[e^{-r tau} 1{tau <= T}].
# ---------------------------------------------------------------------------

def _hit_transform(y: float, nu: float, r: float, T: float) -> float:
    """Down-hit transform for a unit-vol Brownian motion with drift nu
    started at 0, barrier at y < 0."""
    gamma = math.sqrt(2.0 * r + nu * nu)
    sq = math.sqrt(T)
    return (
        math.exp((nu - gamma) * y) * _norm_cdf((-gamma * T + y) / sq)
        + math.exp((nu + gamma) * y) * _norm_cdf((gamma * T + y) / sq)
    )


def _hit_transform_dy(y: float, nu: float, r: float, T: float) -> float:
    gamma = math.sqrt(2.0 * r + nu * nu)
    sq = math.sqrt(T)
    u1 = (-gamma * T + y) / sq
    u2 = (gamma * T + y) / sq
    a1 = nu - gamma
    a2 = nu + gamma
    return (
        a1 * math.exp(a1 * y) * _norm_cdf(u1)
        + math.exp(a1 * y) * _norm_pdf(u1) / sq
        + a2 * math.exp(a2 * y) * _norm_cdf(u2)
        + math.exp(a2 * y) * _norm_pdf(u2) / sq
    )


def _hit_transform_dyy(y: float, nu: float, r: float, T: float) -> float:
    gamma = math.sqrt(2.0 * r + nu * nu)
    sq = math.sqrt(T)
    u1 = (-gamma * T + y) / sq
    u2 = (gamma * T + y) / sq
    a1 = nu - gamma
    a2 = nu + gamma
    out = 0.0
    for a, u in ((a1, u1), (a2, u2)):
        out += (
            a * a * math.exp(a * y) * _norm_cdf(u)
            + 2.0 * a * math.exp(a * y) * _norm_pdf(u) / sq
            - math.exp(a * y) * u * _norm_pdf(u) / T
        )
    return out


def rebate_value(
    model: ModelParams,
    L: float,
    S0: float,
    T: float,
    direction: BarrierDirection = "down-and-out",
) -> float:
    """E[e^{-r tau_L} 1{tau_L <= T}]: present value of one unit paid at the
    first barrier hit, Black-Scholes dynamics only."""
    if model.lam != 0.0:
        raise ValueError("rebate transform is Black-Scholes only")
    if T <= 0.0:
        return 0.0
    nu = (model.r - model.delta - 0.5 * model.sigma ** 2) / model.sigma
    y = math.log(L / S0) / model.sigma
    if direction == "down-and-out":
        if y >= 0.0:
            return 1.0  # already at or below the barrier
        return _hit_transform(y, nu, model.r, T)
    if y <= 0.0:
        return 1.0  # already at or above the barrier
    # Up-hit via the reflection (W, nu, y) -> (-W, -nu, -y).
    return _hit_transform(-y, -nu, model.r, T)


def _rebate_bundle(
    model: ModelParams, L: float, S0: float, T: float, direction: BarrierDirection
) -> tuple[float, float, float]:
    """(value, d/dS0, d2/dS0^2) of the hitting-time transform."""
    nu = (model.r - model.delta - 0.5 * model.sigma ** 2) / model.sigma
    y = math.log(L / S0) / model.sigma
    if direction == "down-and-out":
        f = _hit_transform(y, nu, model.r, T)
        fy = _hit_transform_dy(y, nu, model.r, T)
        fyy = _hit_transform_dyy(y, nu, model.r, T)
    else:
        f = _hit_transform(-y, -nu, model.r, T)
        fy = -_hit_transform_dy(-y, -nu, model.r, T)
        fyy = _hit_transform_dyy(-y, -nu, model.r, T)
    dy = -1.0 / (model.sigma * S0)
    dyy = 1.0 / (model.sigma * S0 * S0)
    return f, fy * dy, fyy * dy * dy + fy * dyy


# ---------------------------------------------------------------------------
# Barrier options under Black-Scholes via the reflection identity.
# ---------------------------------------------------------------------------

def _truncated_bundle(
    x: float, K: float, M: float, T: float, r: float, b: float, sigma: float,
    is_call: bool,
) -> tuple[float, float, float]:
    """Price/delta/gamma of the European claim paying (S_T - K) 1{S_T > M}
    (call, M >= K) or (K - S_T) 1{S_T < M} (put, M <= K)."""
    disc = math.exp(-r * T)
    v = sigma * math.sqrt(T)
    F = x * math.exp(b * T)
    d1 = math.log(F / M) / v + 0.5 * v
    d2 = d1 - v
    nd1 = _norm_cdf(d1)
    nd2 = _norm_cdf(d2)
    pd1 = _norm_pdf(d1)
    pd2 = _norm_pdf(d2)
    growth = math.exp(b * T)

    call_price = disc * (F * nd1 - K * nd2)
    call_delta = disc * (growth * nd1 + (F * pd1 - K * pd2) / (x * v))
    gamma = disc * (
        2.0 * growth * pd1 / (x * v)
        - (F * d1 * pd1 - K * d2 * pd2) / (x * x * v * v)
        - (F * pd1 - K * pd2) / (x * x * v)
    )
    if is_call:
        return call_price, call_delta, gamma
    put_price = disc * (K * (1.0 - nd2) - F * (1.0 - nd1))
    put_delta = call_delta - disc * growth
    return put_price, put_delta, gamma


def _knockout_bundle(
    model: ModelParams,
    spec: OptionSpec,
    barrier: BarrierSpec,
    S0: float,
    T: float,
) -> tuple[float, float, float]:
    """(price, delta, gamma) of the knock-out option including rebate,
    assuming S0 is on the live side."""
    sigma = model.sigma
    r = model.r
    b = r - model.delta
    K = spec.strike
    L = barrier.level
    is_call = spec.side == "call"
    down = barrier.direction == "down-and-out"

    if down:
        M = max(K, L) if is_call else min(K, L)
    else:
        M = max(K, L) if is_call else min(K, L)

    alpha = 2.0 * (b - 0.5 * sigma * sigma) / (sigma * sigma)
    y = L * L / S0

    v0, d0, g0 = _truncated_bundle(S0, K, M, T, r, b, sigma, is_call)
    vr, dr, gr = _truncated_bundle(y, K, M, T, r, b, sigma, is_call)

    ratio = (L / S0) ** alpha
    price = v0 - ratio * vr
    # g(S) = L^alpha S^{-alpha} V(L^2/S)
    la = L ** alpha
    gd = la * (
        -alpha * S0 ** (-alpha - 1.0) * vr - S0 ** (-alpha - 2.0) * L * L * dr
    )
    gg = la * (
        alpha * (alpha + 1.0) * S0 ** (-alpha - 2.0) * vr
        + (2.0 * alpha + 2.0) * S0 ** (-alpha - 3.0) * L * L * dr
        + S0 ** (-alpha - 4.0) * L ** 4 * gr
    )
    delta = d0 - gd
    gamma = g0 - gg

    reb = _rebate_amount(spec, barrier)
    if reb > 0.0:
        f, fd, fg = _rebate_bundle(model, L, S0, T, barrier.direction)
        price += reb * f
        delta += reb * fd
        gamma += reb * fg
    return price, delta, gamma


def _rebate_amount(spec: OptionSpec, barrier: BarrierSpec) -> float:
    if barrier.rebate == "zero":
        return 0.0
    if spec.side == "put":
        return max(spec.strike - barrier.level, 0.0)
    return max(barrier.level - spec.strike, 0.0)


def barrier_alive(barrier: BarrierSpec, S0: float) -> bool:
    if barrier.direction == "down-and-out":
        return S0 > barrier.level
    return S0 < barrier.level


def european_barrier(
    model: ModelParams,
    spec: OptionSpec,
    barrier: BarrierSpec,
    S0: float,
    T: float,
) -> float:
    """Knock-out price including rebate; returns the rebate amount when S0
    is already on the knocked-out side."""
    if model.lam != 0.0:
        raise ValueError("barrier pricing is Black-Scholes only")
    if not barrier_alive(barrier, S0):
        return _rebate_amount(spec, barrier)
    if T <= 0.0:
        if spec.side == "call":
            return max(S0 - spec.strike, 0.0)
        return max(spec.strike - S0, 0.0)
    return _knockout_bundle(model, spec, barrier, S0, T)[0]


def european_barrier_delta(
    model: ModelParams, spec: OptionSpec, barrier: BarrierSpec, S0: float, T: float
) -> float:
    if not barrier_alive(barrier, S0):
        return 0.0
    return _knockout_bundle(model, spec, barrier, S0, T)[1]


def european_barrier_gamma(
    model: ModelParams, spec: OptionSpec, barrier: BarrierSpec, S0: float, T: float
) -> float:
    if not barrier_alive(barrier, S0):
        return 0.0
    return _knockout_bundle(model, spec, barrier, S0, T)[2]


def european_barrier_theta(
    model: ModelParams, spec: OptionSpec, barrier: BarrierSpec, S0: float, T: float
) -> float:
    """Maturity derivative by central differencing of the closed form."""
    step = max(1e-5, 1e-5 * T)
    up = european_barrier(model, spec, barrier, S0, T + step)
    dn = european_barrier(model, spec, barrier, S0, max(T - step, 1e-12))
    return (up - dn) / (T + step - max(T - step, 1e-12))


def european_barrier_in(
    model: ModelParams,
    spec: OptionSpec,
    barrier: BarrierSpec,
    S0: float,
    T: float,
) -> float:
    """Knock-in counterpart (zero rebate), for in/out parity checks."""
    if barrier.rebate != "zero":
        raise ValueError("knock-in parity helper supports zero rebate only")
    vanilla = european_vanilla(model, spec, S0, T)
    return vanilla - european_barrier(model, spec, barrier, S0, T)
