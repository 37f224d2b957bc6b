"""American knock-out barrier options by the same premium perturbation.

Black-Scholes dynamics only. The premium decomposition starts from the
European knock-out price (rebate included), so each perturbation order
f_n must vanish at the barrier and satisfy value matching and smooth
pasting at the exercise boundary. With two lateral conditions both roots
rho+- of Phi_X(rho) = r / h enter:

    f_n(x) = x^rho+ A_n(ln x) + x^rho- B_n(ln x)

where A_n and B_n solve the diffusion-only triangular systems of the
vanilla solver, one per root. The two free constants are pinned by the
barrier condition f_n(L) = 0 and smooth pasting; value matching fixes the
boundary itself.

Supported contracts are the down-and-out call (continuation between
barrier and boundary) and the up-and-out put (boundary below, barrier
above), covering regular and reverse strike/barrier orderings.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryNotBracketed, SolverError
from .european import (
    BarrierSpec,
    OptionSpec,
    _knockout_bundle,
    _rebate_amount,
    barrier_alive,
)
from .model import ModelParams, d_rho_dh, inverse_root
from .vanilla import (
    PriceReport,
    SolverSettings,
    _dpoly,
    _poly,
    _robust_root,
    _scaled_exp_mul,
    maturity_grid,
    padded_grid,
    solve_coefficient_system,
    trivial_premium,
)


def _check_supported(model: ModelParams, spec: OptionSpec, barrier: BarrierSpec):
    if model.lam != 0.0:
        raise ValueError("barrier pricing is Black-Scholes only")
    pair = (spec.side, barrier.direction)
    if pair not in (("call", "down-and-out"), ("put", "up-and-out")):
        raise ValueError(
            "supported American barrier contracts are down-and-out calls "
            "and up-and-out puts"
        )


@dataclass
class _BarrierNode:
    """Per-node state: both roots and accumulated coefficient polys."""

    tau: float
    h: float
    rho_p: float
    rho_m: float
    cum_p: np.ndarray
    cum_m: np.ndarray


def _euro_barrier_scaled(
    model: ModelParams, spec: OptionSpec, barrier: BarrierSpec,
    x: float, tau: float,
) -> tuple[float, float]:
    """(price, delta) of the European knock-out at scaled spot, strike 1."""
    sspec = OptionSpec(spec.side, 1.0, spec.maturity)
    sbar = BarrierSpec(barrier.level / spec.strike, barrier.direction,
                       barrier.rebate)
    p, d, _ = _knockout_bundle(model, sspec, sbar, x, tau)
    return p, d


def _q_over_b(rho_p: float, rho_m: float, w: float) -> float:
    """Q(b)/b with Q = Num/Den, computed on the non-overflowing branch.

    w = (rho+ - rho-) (ln b - ln L).
    """
    if w >= 0.0:
        t = math.exp(-w)
        return (1.0 - t) / (rho_p - rho_m * t)
    t = math.exp(w)
    return (t - 1.0) / (rho_p * t - rho_m)


def _log_den(rho_p: float, rho_m: float, u: float, uL: float) -> float:
    """log of Den(b) = rho+ b^{rho+ - 1} - rho- L^{rho+ - rho-} b^{rho- - 1}
    (always positive)."""
    w = (rho_p - rho_m) * (u - uL)
    if w >= 0.0:
        return (rho_p - 1.0) * u + math.log(rho_p - rho_m * math.exp(-w))
    return (
        (rho_p - rho_m) * uL
        + (rho_m - 1.0) * u
        + math.log(rho_p * math.exp(w) - rho_m)
    )


def _r_star(node: _BarrierNode, c_p: np.ndarray, c_m: np.ndarray,
            uL: float) -> float:
    """R* = L^{-rho-} V*(L) for the current order's j >= 1 coefficients."""
    out = 0.0
    d = (node.rho_p - node.rho_m) * uL
    for j in range(1, c_p.shape[0]):
        out += uL**j * (_scaled_exp_mul(d, c_p[j]) + c_m[j])
    return out


def _boundary_residual(
    model: ModelParams, spec: OptionSpec, barrier: BarrierSpec,
    node: _BarrierNode, c_p: np.ndarray, c_m: np.ndarray,
    s: int, uL: float, b: float,
) -> float:
    eur, dlt = _euro_barrier_scaled(model, spec, barrier, b, node.tau)
    h = node.h
    rp, rm = node.rho_p, node.rho_m
    u = math.log(b)
    qb = _q_over_b(rp, rm, (rp - rm) * (u - uL))
    rstar = _r_star(node, c_p, c_m, uL)

    # polynomial parts per root: prior orders plus this order's tail
    A = _poly(node.cum_p, u) + (_poly(c_p, u) - c_p[0])
    Ad = _dpoly(node.cum_p, u) + _dpoly(c_p, u)
    B = _poly(node.cum_m, u) + (_poly(c_m, u) - c_m[0]) - rstar
    Bd = _dpoly(node.cum_m, u) + _dpoly(c_m, u)

    coef_p = h * (-A + qb * (rp * A + Ad))
    coef_m = h * (-B + qb * (rm * B + Bd))
    return (
        s * (b - 1.0)
        - eur
        - qb * b * (s - dlt)
        + _scaled_exp_mul(rp * u, coef_p)
        + _scaled_exp_mul(rm * u, coef_m)
    )


def _closing_constants(
    model: ModelParams, spec: OptionSpec, barrier: BarrierSpec,
    node: _BarrierNode, c_p: np.ndarray, c_m: np.ndarray,
    s: int, uL: float, b: float,
) -> tuple[float, float]:
    """Constant coefficients (c+_0, c-_0) from smooth pasting and the
    barrier condition at the solved boundary."""
    _, dlt = _euro_barrier_scaled(model, spec, barrier, b, node.tau)
    h = node.h
    rp, rm = node.rho_p, node.rho_m
    u = math.log(b)
    rstar = _r_star(node, c_p, c_m, uL)

    # d/dx of prior orders and of this order's tail, split by root
    Ad_all = rp * _poly(node.cum_p, u) + _dpoly(node.cum_p, u)
    Bd_all = rm * _poly(node.cum_m, u) + _dpoly(node.cum_m, u)
    tail_p = rp * (_poly(c_p, u) - c_p[0]) + _dpoly(c_p, u)
    tail_m = rm * (_poly(c_m, u) - c_m[0] - rstar) + _dpoly(c_m, u)
    dx_terms = (
        _scaled_exp_mul((rp - 1.0) * u, Ad_all + tail_p)
        + _scaled_exp_mul((rm - 1.0) * u, Bd_all + tail_m)
    )
    numerator = s - dlt - h * dx_terms
    log_den = _log_den(rp, rm, u, uL)
    if numerator == 0.0:
        c0_p = 0.0
    else:
        c0_p = math.copysign(
            math.exp(math.log(abs(numerator)) - log_den - math.log(h)),
            numerator,
        )
    # barrier condition: c-_0 = -(L^{rho+ - rho-} c+_0 + R*)
    if numerator == 0.0:
        lc = 0.0
    else:
        lc = math.copysign(
            math.exp(
                (rp - rm) * uL + math.log(abs(numerator)) - log_den
                - math.log(h)
            ),
            numerator,
        )
    return c0_p, -(lc + rstar)


@dataclass
class BarrierSolution:
    """Perturbation solution of one American knock-out contract."""

    model: ModelParams
    spec: OptionSpec
    barrier: BarrierSpec
    orders: int
    settings: SolverSettings
    sign: int
    taus: np.ndarray
    hs: np.ndarray
    rhos_p: np.ndarray
    rhos_m: np.ndarray
    boundaries: np.ndarray
    coeffs_p: list[np.ndarray]
    coeffs_m: list[np.ndarray]
    flags: tuple[str, ...] = ()
    wall_time_s: float = 0.0
    boundary_iterations: int = 0
    trivial: bool = False

    def boundary(self, order: int | None = None) -> float:
        if self.trivial:
            return math.inf if self.sign > 0 else 0.0
        n = self.orders if order is None else order
        return self.boundaries[n, -1] * self.spec.strike

    def _premium_scaled(self, x: float, order: int) -> float:
        u = math.log(x)
        tot_p = 0.0
        tot_m = 0.0
        for n in range(order + 1):
            tot_p += _poly(self.coeffs_p[n][-1], u)
            tot_m += _poly(self.coeffs_m[n][-1], u)
        return self.hs[-1] * (
            _scaled_exp_mul(self.rhos_p[-1] * u, tot_p)
            + _scaled_exp_mul(self.rhos_m[-1] * u, tot_m)
        )

    def _european(self, S0: float) -> float:
        K = self.spec.strike
        p, _ = _euro_barrier_scaled(
            self.model, self.spec, self.barrier, S0 / K, self.spec.maturity
        )
        return K * p

    def price(self, S0: float, order: int | None = None) -> float:
        n = self.orders if order is None else order
        K = self.spec.strike
        if not barrier_alive(self.barrier, S0):
            return K * _rebate_amount(
                OptionSpec(self.spec.side, 1.0, self.spec.maturity),
                BarrierSpec(self.barrier.level / K, self.barrier.direction,
                            self.barrier.rebate),
            )
        eur = self._european(S0)
        if self.trivial:
            return eur
        x = S0 / K
        b = self.boundaries[n, -1]
        in_exercise = x >= b if self.sign > 0 else x <= b
        if in_exercise:
            return max(self.sign * (S0 - K), 0.0)
        return eur + K * self._premium_scaled(x, n)

    def report(self, S0: float) -> PriceReport:
        t0 = time.perf_counter()
        K = self.spec.strike
        flags = list(self.flags)
        eur = self._european(S0)
        if not barrier_alive(self.barrier, S0):
            reb = self.price(S0)
            return PriceReport(
                price=reb, european=reb,
                premiums=[0.0] * (self.orders + 1),
                prices=[reb] * (self.orders + 1),
                boundaries=[self.boundary(n) for n in range(self.orders + 1)],
                exercised=False, flags=tuple(flags + ["KnockedOut"]),
                wall_time_s=self.wall_time_s + (time.perf_counter() - t0),
                boundary_iterations=self.boundary_iterations,
            )
        prices = [self.price(S0, n) for n in range(self.orders + 1)]
        premiums = [p - eur for p in prices]
        exercised = False
        if not self.trivial:
            x = S0 / K
            b = self.boundaries[self.orders, -1]
            exercised = x >= b if self.sign > 0 else x <= b
        price = prices[-1]
        if not exercised and abs(price - eur) < self.settings.premium_floor * K:
            flags.append("PremiumNegligible")
            price = eur
        return PriceReport(
            price=price, european=eur, premiums=premiums, prices=prices,
            boundaries=[self.boundary(n) for n in range(self.orders + 1)],
            exercised=exercised, flags=tuple(flags),
            wall_time_s=self.wall_time_s + (time.perf_counter() - t0),
            boundary_iterations=self.boundary_iterations,
        )


def solve_american_barrier(
    model: ModelParams,
    spec: OptionSpec,
    barrier: BarrierSpec,
    orders: int = 3,
    settings: SolverSettings | None = None,
) -> BarrierSolution:
    _check_supported(model, spec, barrier)
    if orders < 0:
        raise ValueError("orders must be >= 0")
    settings = settings or SolverSettings()
    t0 = time.perf_counter()
    s = 1 if spec.side == "call" else -1
    K = spec.strike
    L = barrier.level / K
    uL = math.log(L)

    if trivial_premium(model, spec.side):
        return BarrierSolution(
            model=model, spec=spec, barrier=barrier, orders=orders,
            settings=settings, sign=s, taus=np.array([spec.maturity]),
            hs=np.zeros(1), rhos_p=np.zeros(1), rhos_m=np.zeros(1),
            boundaries=np.zeros((orders + 1, 1)),
            coeffs_p=[np.zeros((1, 2 * n + 1)) for n in range(orders + 1)],
            coeffs_m=[np.zeros((1, 2 * n + 1)) for n in range(orders + 1)],
            flags=("NoEarlyExercise",),
            wall_time_s=time.perf_counter() - t0, trivial=True,
        )
    if model.r <= 0.0:
        raise SolverError(
            "maturity transform h = 1 - exp(-r T) requires r > 0 for this "
            "contract"
        )

    taus = padded_grid(maturity_grid(spec.maturity, settings), settings.n_pad)
    n_grid = taus.shape[0]
    n_keep = n_grid - settings.n_pad
    hs = 1.0 - np.exp(-model.r * taus)
    rhos_p = np.array([inverse_root(model, model.r / h, 1) for h in hs])
    rhos_m = np.array([inverse_root(model, model.r / h, -1) for h in hs])
    nodes = [
        _BarrierNode(taus[i], hs[i], rhos_p[i], rhos_m[i],
                     np.zeros(1), np.zeros(1))
        for i in range(n_grid)
    ]
    boundaries = np.zeros((orders + 1, n_grid))
    coeffs_p = [np.zeros((n_grid, 2 * n + 1)) for n in range(orders + 1)]
    coeffs_m = [np.zeros((n_grid, 2 * n + 1)) for n in range(orders + 1)]
    total_iters = 0

    # Exercise boundary search region: above strike and barrier for the
    # call, below both for the put.
    if s > 0:
        lo_cap = max(1.0, L) + 1e-12
        hi_cap = max(50.0, 4.0 * (model.r / model.delta if model.delta > 0
                                  else 1.0))
        guess = max(lo_cap * (1.0 + 1e-9),
                    model.r / model.delta if model.delta > 0 else 1.0)
    else:
        lo_cap = 1e-8
        hi_cap = min(1.0, L) - 1e-12
        guess = min(hi_cap * (1.0 - 1e-9),
                    model.r / model.delta if model.delta > 0 else 1.0)

    for n in range(orders + 1):
        if n > 0:
            dh_p = np.gradient(coeffs_p[n - 1], hs, axis=0, edge_order=2)
            dh_m = np.gradient(coeffs_m[n - 1], hs, axis=0, edge_order=2)
        for i, node in enumerate(nodes):
            if n == 0:
                c_p = np.zeros(1)
                c_m = np.zeros(1)
            else:
                two_n = 2 * n
                rho_h_p = d_rho_dh(model, node.h, node.rho_p)
                rho_h_m = d_rho_dh(model, node.h, node.rho_m)
                src = model.r * (1.0 - node.h)
                rhs_p = np.zeros(two_n + 1)
                rhs_m = np.zeros(two_n + 1)
                for j in range(1, two_n + 1):
                    vp = vm = 0.0
                    if j - 1 <= 2 * (n - 1):
                        vp += dh_p[i][j - 1]
                        vm += dh_m[i][j - 1]
                    if 0 <= j - 2 <= 2 * (n - 1):
                        vp += rho_h_p * coeffs_p[n - 1][i][j - 2]
                        vm += rho_h_m * coeffs_m[n - 1][i][j - 2]
                    rhs_p[j] = src * vp
                    rhs_m[j] = src * vm
                c_p = solve_coefficient_system(model, node.rho_p, rhs_p)
                c_m = solve_coefficient_system(model, node.rho_m, rhs_m)

            if n > 0:
                guess = boundaries[n - 1, i]

            def f(b, _node=node, _cp=c_p, _cm=c_m):
                return _boundary_residual(
                    model, spec, barrier, _node, _cp, _cm, s, uL, b
                )

            try:
                b, iters = _robust_root(
                    f, guess, lo_cap, hi_cap, settings.boundary_rel_tol
                )
            except BoundaryNotBracketed:
                if n == 0:
                    raise
                b, iters = guess, 0
            total_iters += iters

            c_p[0], c_m[0] = _closing_constants(
                model, spec, barrier, node, c_p, c_m, s, uL, b
            )
            coeffs_p[n][i] = c_p
            coeffs_m[n][i] = c_m
            boundaries[n, i] = b
            node.cum_p = _accumulate(node.cum_p, c_p)
            node.cum_m = _accumulate(node.cum_m, c_m)
            if n == 0:
                guess = b

    return BarrierSolution(
        model=model, spec=spec, barrier=barrier, orders=orders,
        settings=settings, sign=s, taus=taus[:n_keep], hs=hs[:n_keep],
        rhos_p=rhos_p[:n_keep], rhos_m=rhos_m[:n_keep],
        boundaries=boundaries[:, :n_keep],
        coeffs_p=[c[:n_keep] for c in coeffs_p],
        coeffs_m=[c[:n_keep] for c in coeffs_m],
        wall_time_s=time.perf_counter() - t0,
        boundary_iterations=total_iters,
    )


def _accumulate(cum: np.ndarray, c: np.ndarray) -> np.ndarray:
    if c.shape[0] > cum.shape[0]:
        out = c.copy()
        out[: cum.shape[0]] += cum
        return out
    out = cum.copy()
    out[: c.shape[0]] += c
    return out


def american_barrier_price(
    model: ModelParams,
    spec: OptionSpec,
    barrier: BarrierSpec,
    S0: float,
    orders: int = 3,
    settings: SolverSettings | None = None,
) -> PriceReport:
    """One-shot pricing: solve the knock-out boundary problem, report at S0."""
    solution = solve_american_barrier(model, spec, barrier, orders, settings)
    return solution.report(S0)
