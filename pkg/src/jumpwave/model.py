"""Asset dynamics: jump laws, Laplace exponent, inverse roots.

The driving process is an exponential Levy jump-diffusion
``S_t = S_0 exp(X_t)`` with diffusion volatility ``sigma``, jump intensity
``lambda`` and i.i.d. log-jumps J. Three jump laws are supported: none,
a point mass at ``phi`` and a normal law N(mu_j, sigma_j^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

from .errors import DegenerateSlope, NonPositiveTarget, NoConvergence

JumpVariant = Literal["none", "constant", "normal"]

_ROOT_TOL = 1e-12
_ROOT_MAX_ITER = 200


@dataclass(frozen=True)
class JumpSpec:
    """Distribution of a single log-jump.

    variant "none" is semantically identical to "constant" with phi = 0
    (and to lambda = 0); pricing must agree across these encodings.
    """

    variant: JumpVariant = "none"
    phi: float = 0.0
    mu_j: float = 0.0
    sigma_j: float = 0.0

    def __post_init__(self) -> None:
        if self.variant not in ("none", "constant", "normal"):
            raise ValueError(f"unknown jump variant {self.variant!r}")
        if self.variant == "normal" and not self.sigma_j > 0.0:
            raise ValueError("normal jump law requires sigma_j > 0")


@dataclass(frozen=True)
class ModelParams:
    """Market and dynamics parameters for one pricing problem."""

    r: float
    delta: float
    sigma: float
    lam: float = 0.0
    jump: JumpSpec = field(default_factory=JumpSpec)

    def __post_init__(self) -> None:
        if self.r < 0.0:
            raise ValueError("r must be >= 0")
        if not self.sigma > 0.0:
            raise ValueError("sigma must be > 0")
        if self.lam < 0.0:
            raise ValueError("lambda must be >= 0")


def zeta(model: ModelParams) -> float:
    """Expected relative jump size E[e^J - 1] under the model's jump law."""
    j = model.jump
    if model.lam == 0.0 or j.variant == "none":
        return 0.0
    if j.variant == "constant":
        return math.expm1(j.phi)
    return math.expm1(j.mu_j + 0.5 * j.sigma_j * j.sigma_j)


def jump_mgf(model: ModelParams, theta: float) -> float:
    """E[e^{theta J}] for the model's jump law (1.0 when jumps are absent)."""
    j = model.jump
    if model.lam == 0.0 or j.variant == "none":
        return 1.0
    if j.variant == "constant":
        return math.exp(theta * j.phi)
    return math.exp(theta * j.mu_j + 0.5 * theta * theta * j.sigma_j * j.sigma_j)


def jump_mgf_derivative(model: ModelParams, theta: float) -> float:
    """d/d theta of E[e^{theta J}] = E[J e^{theta J}]."""
    j = model.jump
    if model.lam == 0.0 or j.variant == "none":
        return 0.0
    if j.variant == "constant":
        return j.phi * math.exp(theta * j.phi)
    s2 = j.sigma_j * j.sigma_j
    return (j.mu_j + theta * s2) * math.exp(theta * j.mu_j + 0.5 * theta * theta * s2)


def laplace_exponent(model: ModelParams, theta: float) -> float:
    """Phi_X(theta) = log E[e^{theta X_1}].

    Convex with Phi_X(0) = 0 and Phi_X(1) = r - delta (martingale identity).
    """
    drift = model.r - model.delta - model.lam * zeta(model) - 0.5 * model.sigma ** 2
    out = drift * theta + 0.5 * model.sigma ** 2 * theta * theta
    if model.lam > 0.0:
        out += model.lam * (jump_mgf(model, theta) - 1.0)
    return out


def laplace_exponent_derivative(model: ModelParams, theta: float) -> float:
    """Analytic d/d theta of the Laplace exponent."""
    drift = model.r - model.delta - model.lam * zeta(model) - 0.5 * model.sigma ** 2
    out = drift + model.sigma ** 2 * theta
    if model.lam > 0.0:
        out += model.lam * jump_mgf_derivative(model, theta)
    return out


def _polish_root(model: "ModelParams", theta: float, y: float) -> float:
    """Newton-polish a converged root down to evaluation noise."""
    best, best_f = theta, abs(laplace_exponent(model, theta) - y)
    for _ in range(3):
        fp = laplace_exponent_derivative(model, theta)
        if fp == 0.0:
            break
        theta = theta - (laplace_exponent(model, theta) - y) / fp
        f = abs(laplace_exponent(model, theta) - y)
        if f < best_f:
            best, best_f = theta, f
        else:
            break
    return best


def inverse_root(model: ModelParams, y: float, sign: int) -> float:
    """Solve Phi_X(theta) = y for the root of the requested sign.

    Safeguarded Newton inside an automatically expanded bracket; falls back
    to bisection whenever a Newton step leaves the bracket. sign=+1 returns
    the positive root, sign=-1 the negative one.
    """
    if not y > 0.0:
        raise NonPositiveTarget(f"inverse root requested at y={y} <= 0")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")

    # Expand the bracket [0, hi] (or [lo, 0]) until Phi crosses y.
    step = 1.0
    if sign == 1:
        lo, hi = 0.0, step
        while laplace_exponent(model, hi) < y:
            hi *= 2.0
            if hi > 1e12:
                raise NoConvergence("bracket expansion for positive root failed")
        lo = 0.0
    else:
        lo, hi = -step, 0.0
        while laplace_exponent(model, lo) < y:
            lo *= 2.0
            if lo < -1e12:
                raise NoConvergence("bracket expansion for negative root failed")
        hi = 0.0

    theta = 0.5 * (lo + hi)
    scale = max(abs(y), 1.0)
    for _ in range(_ROOT_MAX_ITER):
        f = laplace_exponent(model, theta) - y
        if abs(f) <= _ROOT_TOL * scale:
            return _polish_root(model, theta, y)
        if f > 0.0:
            if sign == 1:
                hi = theta
            else:
                lo = theta
        else:
            if sign == 1:
                lo = theta
            else:
                hi = theta
        fp = laplace_exponent_derivative(model, theta)
        if fp != 0.0:
            candidate = theta - f / fp
        else:
            candidate = lo - 1.0  # force bisection
        if lo < candidate < hi:
            theta = candidate
        else:
            theta = 0.5 * (lo + hi)
    raise NoConvergence(
        f"root iteration did not reach tolerance within {_ROOT_MAX_ITER} steps"
    )


def d_rho_dh(model: ModelParams, h: float, rho: float) -> float:
    """d rho / dh along rho(h) = Phi_X^{-1,+-}(r/h).

    Implicit differentiation of Phi_X(rho(h)) = r/h gives
    Phi_X'(rho) * rho'(h) = -r/h^2.
    """
    if not 0.0 < h <= 1.0:
        raise ValueError("h must lie in (0, 1]")
    slope = laplace_exponent_derivative(model, rho)
    if abs(slope) < 1e-14:
        raise DegenerateSlope(f"Phi_X'(rho)={slope} too small at rho={rho}")
    return -model.r / (h * h * slope)
