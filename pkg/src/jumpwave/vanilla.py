"""American vanilla options by perturbation of the premium decomposition.

The early-exercise premium is written as e = h F(h, x) with
h = 1 - exp(-r T). F solves an integro-differential equation whose only
h-coupling term, r (1 - h) dF/dh, is treated perturbatively: order 0 drops
it entirely (the generalized quadratic approximation) and each subsequent
order is sourced by the h-derivative of the previous one. Every order has
the closed form x^rho times a polynomial in ln x, where rho is the
relevant root of Phi_X(rho) = r / h; the polynomial coefficients solve a
triangular linear system and the free constant is fixed by value matching
and smooth pasting at the exercise boundary.

Calls use the positive root and an exercise region above the boundary;
puts use the negative root and the mirrored region. Both go through the
same formulas with a sign s = +1 (call) / -1 (put).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundaryNotBracketed,
    NoConvergence,
    SingularSystem,
    SolverError,
)
from .european import OptionSpec, _vanilla_bundle
from .model import (
    ModelParams,
    d_rho_dh,
    inverse_root,
    laplace_exponent_derivative,
)

_BRACKET_GROWTH = 1.07
_BOUNDARY_MAX_ITER = 120


@dataclass(frozen=True)
class SolverSettings:
    """Numerical knobs of the perturbation solver."""

    n_grid: int = 200
    grid_floor: float = 1e-4
    boundary_rel_tol: float = 1e-10
    premium_floor: float = 1e-4  # premium below this (x strike) is negligible
    n_pad: int = 4  # extra maturity nodes past T, discarded after solving

    def __post_init__(self) -> None:
        if self.n_grid < 8:
            raise ValueError("n_grid must be at least 8")


def maturity_grid(T: float, settings: SolverSettings) -> np.ndarray:
    """Log-spaced maturity nodes ending exactly at T."""
    lo = min(max(settings.grid_floor, T / 1000.0), 0.5 * T)
    return np.geomspace(lo, T, settings.n_grid)


def padded_grid(taus: np.ndarray, n_pad: int) -> np.ndarray:
    """Extend a maturity grid geometrically past its endpoint.

    Differencing the per-order coefficients along the grid uses one-sided
    stencils at the last node, whose error kinks there and is amplified by
    each further differentiation. Padding past T makes the node at T an
    interior point of every stencil; the pad nodes are dropped afterwards.
    """
    if n_pad <= 0:
        return taus
    ratio = taus[-1] / taus[-2]
    pad = taus[-1] * ratio ** np.arange(1, n_pad + 1)
    return np.concatenate([taus, pad])


def trivial_premium(model: ModelParams, side: str) -> bool:
    """True when early exercise is never optimal for these dynamics."""
    if side == "call":
        return model.delta <= 0.0
    return model.r <= 0.0


def exp_tilted_moment(model: ModelParams, rho: float, ell: int) -> float:
    """E[J^ell e^{rho J}] under the model's jump law."""
    return jump_weights(model, rho, ell)[ell]


def jump_weights(model: ModelParams, rho: float, count: int) -> np.ndarray:
    """Array w with w[l] = E[J^l e^{rho J}] for l = 0..count."""
    j = model.jump
    w = np.empty(count + 1)
    if model.lam == 0.0 or j.variant == "none":
        w[0] = 1.0
        w[1:] = 0.0
        return w
    if j.variant == "constant":
        pref = math.exp(rho * j.phi)
        for ell in range(count + 1):
            w[ell] = j.phi**ell * pref
        return w
    # Exponential tilting: the weighted law is N(mu_j + rho sigma_j^2,
    # sigma_j^2) up to the factor exp(rho mu_j + rho^2 sigma_j^2 / 2);
    # raw normal moments follow the two-term recurrence.
    s2 = j.sigma_j * j.sigma_j
    m = j.mu_j + rho * s2
    pref = math.exp(rho * j.mu_j + 0.5 * rho * rho * s2)
    mom = np.empty(count + 1)
    mom[0] = 1.0
    if count >= 1:
        mom[1] = m
    for k in range(2, count + 1):
        mom[k] = m * mom[k - 1] + (k - 1) * s2 * mom[k - 2]
    return pref * mom


def solve_coefficient_system(
    model: ModelParams, rho: float, rhs: np.ndarray
) -> np.ndarray:
    """Solve for the ln-x polynomial coefficients of one perturbation order.

    rhs[j], j = 1..2n, is the source for the row whose leading unknown is
    c[j]; rhs[0] is ignored. Returns c[0..2n] with c[0] = 0 (fixed later by
    the boundary conditions). The system is upper triangular because
    x^rho (ln x)^k is mapped to a polynomial of degree k - 1.
    """
    two_n = rhs.shape[0] - 1
    D = laplace_exponent_derivative(model, rho)
    if abs(D) < 1e-13:
        raise SingularSystem(
            f"coefficient system pivot Phi_X'(rho)={D} at rho={rho}"
        )
    c = np.zeros(two_n + 1)
    half_sig2 = 0.5 * model.sigma**2
    w = jump_weights(model, rho, two_n) if model.lam > 0.0 else None
    for j in range(two_n, 0, -1):
        acc = rhs[j]
        if j + 1 <= two_n:
            acc -= j * (j + 1) * half_sig2 * c[j + 1]
        if w is not None:
            for k in range(j + 1, two_n + 1):
                acc -= model.lam * math.comb(k, j - 1) * w[k - j + 1] * c[k]
        c[j] = acc / (j * D)
    return c


def _poly(coeffs: np.ndarray, u: float) -> float:
    out = 0.0
    for cj in coeffs[::-1]:
        out = out * u + cj
    return out


def _dpoly(coeffs: np.ndarray, u: float) -> float:
    out = 0.0
    n = coeffs.shape[0] - 1
    for j in range(n, 0, -1):
        out = out * u + j * coeffs[j]
    return out


@dataclass
class PriceReport:
    """Result of pricing one contract at one spot."""

    price: float
    european: float
    premiums: list[float]
    prices: list[float]
    boundaries: list[float]
    exercised: bool
    flags: tuple[str, ...]
    wall_time_s: float
    boundary_iterations: int


@dataclass
class VanillaSolution:
    """Perturbation solution of one American vanilla contract.

    Boundaries and coefficients are stored in units of the strike on the
    full maturity grid; pricing at any spot reuses them.
    """

    model: ModelParams
    spec: OptionSpec
    orders: int
    settings: SolverSettings
    sign: int
    taus: np.ndarray
    hs: np.ndarray
    rhos: np.ndarray
    boundaries: np.ndarray  # (orders+1, n_grid), units of strike
    coeffs: list[np.ndarray]  # coeffs[n]: (n_grid, 2n+1)
    flags: tuple[str, ...] = ()
    wall_time_s: float = 0.0
    boundary_iterations: int = 0
    trivial: bool = False

    def boundary(self, order: int | None = None) -> float:
        """Exercise boundary at the full maturity, in price units."""
        if self.trivial:
            return math.inf if self.sign > 0 else 0.0
        n = self.orders if order is None else order
        return self.boundaries[n, -1] * self.spec.strike

    def _premium_scaled(self, x: float, order: int) -> float:
        """h F_N at scaled spot x = S0 / K (units of strike)."""
        if self.trivial:
            return 0.0
        h = self.hs[-1]
        rho = self.rhos[-1]
        u = math.log(x)
        total = 0.0
        for n in range(order + 1):
            total += _poly(self.coeffs[n][-1], u)
        return h * _scaled_exp_mul(rho * u, total)

    def premium(self, S0: float, order: int | None = None) -> float:
        """Early-exercise premium at spot S0 (clamped in exercise region)."""
        n = self.orders if order is None else order
        K = self.spec.strike
        if self.trivial:
            return 0.0
        x = S0 / K
        b = self.boundaries[n, -1]
        in_exercise = x >= b if self.sign > 0 else x <= b
        eur, *_ = _vanilla_bundle(
            self.model, self.spec.side, K, S0, self.spec.maturity
        )
        if in_exercise:
            intrinsic = max(self.sign * (S0 - K), 0.0)
            return intrinsic - eur
        return K * self._premium_scaled(x, n)

    def price(self, S0: float, order: int | None = None) -> float:
        n = self.orders if order is None else order
        K = self.spec.strike
        eur, *_ = _vanilla_bundle(
            self.model, self.spec.side, K, S0, self.spec.maturity
        )
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
        eur, *_ = _vanilla_bundle(
            self.model, self.spec.side, K, S0, self.spec.maturity
        )
        premiums = []
        prices = []
        bounds = []
        exercised = False
        flags = list(self.flags)
        for n in range(self.orders + 1):
            p = self.price(S0, n)
            prices.append(p)
            premiums.append(p - eur)
            bounds.append(self.boundary(n))
        if not self.trivial:
            x = S0 / K
            b = self.boundaries[self.orders, -1]
            exercised = x >= b if self.sign > 0 else x <= b
        price = prices[-1]
        if not exercised and abs(price - eur) < self.settings.premium_floor * K:
            flags.append("PremiumNegligible")
            price = eur
        return PriceReport(
            price=price,
            european=eur,
            premiums=premiums,
            prices=prices,
            boundaries=bounds,
            exercised=exercised,
            flags=tuple(flags),
            wall_time_s=self.wall_time_s + (time.perf_counter() - t0),
            boundary_iterations=self.boundary_iterations,
        )


class _NodeWorkspace:
    """Per-node state shared by the order loop at one maturity node."""

    __slots__ = ("tau", "h", "rho", "cum", "cum_orders")

    def __init__(self, tau: float, h: float, rho: float) -> None:
        self.tau = tau
        self.h = h
        self.rho = rho
        self.cum = np.zeros(1)  # summed polynomial coefficients, orders so far
        self.cum_orders = 0

    def F_and_Fx(self, x: float) -> tuple[float, float]:
        """Partial sum F and its spot derivative at scaled spot x."""
        u = math.log(x)
        p = _poly(self.cum, u)
        dp = _dpoly(self.cum, u)
        val = _scaled_exp_mul(self.rho * u, p)
        der = _scaled_exp_mul((self.rho - 1.0) * u, self.rho * p + dp)
        return val, der


def _scaled_exp_mul(log_scale: float, factor: float) -> float:
    """factor * exp(log_scale) without spurious 0*inf; clamps to +-inf.

    Far above the true boundary x^rho overflows double precision; keeping
    the sign intact preserves bracketing information for the root search.
    """
    if factor == 0.0:
        return 0.0
    z = log_scale + math.log(abs(factor))
    if z > 709.0:
        return math.copysign(math.inf, factor)
    return math.copysign(math.exp(z), factor)


def _sign_change(fa: float, fb: float) -> bool:
    if math.isnan(fa) or math.isnan(fb):
        return False
    return (fa <= 0.0 <= fb) or (fb <= 0.0 <= fa)


def _bracketed_root(f, lo, hi, flo, fhi, tol):
    """Illinois variant of regula falsi on a verified bracket."""
    it = 0
    for _ in range(_BOUNDARY_MAX_ITER):
        it += 1
        if fhi != flo:
            mid = hi - fhi * (hi - lo) / (fhi - flo)
        else:
            mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) == 0.0 or hi - lo < tol:
            return mid, it
        if _sign_change(flo, fm):
            hi, fhi = mid, fm
            flo *= 0.5
        else:
            lo, flo = mid, fm
            fhi *= 0.5
        if hi - lo < tol:
            return 0.5 * (lo + hi), it
    raise NoConvergence(
        f"boundary iteration exceeded {_BOUNDARY_MAX_ITER} steps"
    )


def _scan_brackets(f, guess, lo_cap, hi_cap):
    """Probe outward from the guess with a doubling step and yield every
    (lo, hi, flo, fhi, evals) pair where f changes sign between
    consecutive probes. The scan resumes after each yield so a caller
    can discard a bracket and keep looking further out.

    The step starts tiny because higher orders move the boundary very
    little and their residuals can change sign again away from the root.
    """
    guess = min(max(guess, lo_cap), hi_cap)
    fg = f(guess)
    evals = 1
    if math.isnan(fg):
        return
    step = max(1e-6, 1e-5 * guess)
    lo = hi = guess
    flo = fhi = fg
    for _ in range(60):
        moved = False
        if lo > lo_cap:
            prev_lo, prev_flo = lo, flo
            lo = max(lo - step, lo_cap)
            flo = f(lo)
            evals += 1
            if _sign_change(flo, prev_flo):
                yield lo, prev_lo, flo, prev_flo, evals
            moved = True
        if hi < hi_cap:
            prev_hi, prev_fhi = hi, fhi
            hi = min(hi + step, hi_cap)
            fhi = f(hi)
            evals += 1
            if _sign_change(prev_fhi, fhi):
                yield prev_hi, hi, prev_fhi, fhi, evals
            moved = True
        step *= 2.0
        if not moved:
            return


# Residual magnitude required to accept a boundary root, and the
# rounding-noise floor |f'(root)| * eps * |root| above which a zero
# crossing is rejected as ill-conditioned. At the correct boundary the
# residual slope is O(1) (floor ~1e-16); near expiry at high orders the
# residual also develops extremely steep parasitic crossings (slopes
# ~1e8, floor ~1e-7) where value matching cannot hold to tolerance.
# The bracket scan must skip those and keep going.
_RESIDUAL_ACCEPT = 1e-6
_CONDITION_FLOOR = 1e-12
_POLISH_TRIGGER = 1e-11
_EPS = 2.3e-16


def _polish_boundary(f, x0, f0, x1, f1):
    """Secant-polish a converged root down to evaluation noise."""
    best, best_f = x0, abs(f0)
    if abs(f1) < best_f:
        best, best_f = x1, abs(f1)
    for _ in range(3):
        if f1 == f0 or math.isnan(f1):
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        f2 = f(x2)
        if abs(f2) < best_f:
            best, best_f = x2, abs(f2)
        else:
            break
        x0, f0, x1, f1 = x1, f1, x2, f2
    return best, best_f


def _robust_root(f, guess, lo_cap, hi_cap, tol):
    """Locate a well-conditioned zero of f near the guess.

    Scans outward for sign changes and refines each candidate bracket.
    A candidate is accepted only if the crossing is well conditioned
    (rounding-noise floor below _CONDITION_FLOOR) and the polished
    residual is small; parasitic near-vertical crossings are skipped and
    the scan continues. Raises BoundaryNotBracketed when no acceptable
    root exists inside the caps.
    """
    total = 0
    best = None  # (floor, root) over candidates with a small residual
    for lo, hi, flo, fhi, evals in _scan_brackets(f, guess, lo_cap, hi_cap):
        total = evals
        root, iters = _bracketed_root(f, lo, hi, flo, fhi, tol)
        fr = f(root)
        x1 = root + 1e-6 * max(abs(root), 1.0)
        f1 = f(x1)
        total += iters + 2
        slope = (f1 - fr) / (x1 - root)
        floor = abs(slope) * _EPS * max(abs(root), 1.0)
        if abs(fr) > _POLISH_TRIGGER:
            root, fr_abs = _polish_boundary(f, root, fr, x1, f1)
        else:
            fr_abs = abs(fr)
        if fr_abs > _RESIDUAL_ACCEPT:
            continue
        if floor <= _CONDITION_FLOOR:
            return root, total
        # in extreme regimes (huge |rho|) even the genuine root is steep;
        # keep the least ill-conditioned candidate as a fallback
        if best is None or floor < best[0]:
            best = (floor, root)
    if best is not None:
        return best[1], total
    raise BoundaryNotBracketed(
        f"no acceptable root around guess {guess:.6g} within "
        f"[{lo_cap:.3g}, {hi_cap:.3g}]"
    )


def solve_american_vanilla(
    model: ModelParams,
    spec: OptionSpec,
    orders: int = 3,
    settings: SolverSettings | None = None,
) -> VanillaSolution:
    """Solve boundaries and coefficients for orders 0..orders."""
    if orders < 0:
        raise ValueError("orders must be >= 0")
    settings = settings or SolverSettings()
    t0 = time.perf_counter()
    s = 1 if spec.side == "call" else -1

    if trivial_premium(model, spec.side):
        return VanillaSolution(
            model=model, spec=spec, orders=orders, settings=settings, sign=s,
            taus=np.array([spec.maturity]), hs=np.zeros(1), rhos=np.zeros(1),
            boundaries=np.zeros((orders + 1, 1)),
            coeffs=[np.zeros((1, 2 * n + 1)) for n in range(orders + 1)],
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
    rhos = np.array([inverse_root(model, model.r / h, s) for h in hs])

    nodes = [
        _NodeWorkspace(taus[i], hs[i], rhos[i]) for i in range(n_grid)
    ]
    boundaries = np.zeros((orders + 1, n_grid))
    coeffs = [np.zeros((n_grid, 2 * n + 1)) for n in range(orders + 1)]
    dh_coeffs_prev: np.ndarray | None = None
    total_iters = 0

    # Near-expiry boundary limit as the first guess (units of strike).
    if s > 0:
        guess = max(1.0, model.r / model.delta) if model.delta > 0 else 1.0
        # a small dividend yield pushes the near-expiry boundary to
        # r/delta times the strike, which can exceed the default cap
        lo_cap, hi_cap = 1.0 + 1e-12, max(50.0, 4.0 * guess)
    else:
        guess = min(1.0, model.r / model.delta) if model.delta > 0 else 1.0
        lo_cap, hi_cap = 1e-8, 1.0 - 1e-12

    for n in range(orders + 1):
        if n > 0:
            # Source term: h-derivatives of the previous order's
            # coefficients along the grid (nonuniform second order), with
            # the closed form substituted for the order-0 constant.
            prev = coeffs[n - 1]
            dh_prev = np.gradient(prev, hs, axis=0, edge_order=2)
            if n == 1 and dh_coeffs_prev is not None:
                dh_prev = dh_coeffs_prev
        for i, node in enumerate(nodes):
            if n == 0:
                c = np.zeros(1)
            else:
                two_n = 2 * n
                rhs = np.zeros(two_n + 1)
                rho_h = d_rho_dh(model, node.h, node.rho)
                src = model.r * (1.0 - node.h)
                for j in range(1, two_n + 1):
                    val = 0.0
                    if j - 1 <= 2 * (n - 1):
                        val += dh_prev[i][j - 1]
                    if 0 <= j - 2 <= 2 * (n - 1):
                        val += rho_h * coeffs[n - 1][i][j - 2]
                    rhs[j] = src * val
                c = solve_coefficient_system(model, node.rho, rhs)

            if n > 0:
                guess = boundaries[n - 1, i]
            try:
                b, iters = _solve_node_boundary(
                    model, spec, node, c, s, guess, lo_cap, hi_cap,
                    settings.boundary_rel_tol,
                )
            except BoundaryNotBracketed:
                # Near the expiry end of the grid a higher order can push
                # the residual extremum marginally past zero so it never
                # changes sign; the previous order's boundary is then the
                # near-stationary point and an accurate stand-in.
                if n == 0:
                    raise
                b, iters = guess, 0
            total_iters += iters
            c[0] = _closing_constant(model, spec, node, c, s, b)
            coeffs[n][i] = c
            boundaries[n, i] = b
            node.cum = _accumulate(node.cum, c)
            node.cum_orders = n
            if n == 0:
                guess = b  # walk the order-0 boundary up the grid
        if n == 0:
            dh_coeffs_prev = _order0_h_derivatives(
                model, spec, taus, hs, rhos, boundaries[0], coeffs[0], s
            )

    return VanillaSolution(
        model=model, spec=spec, orders=orders, settings=settings, sign=s,
        taus=taus[:n_keep], hs=hs[:n_keep], rhos=rhos[:n_keep],
        boundaries=boundaries[:, :n_keep],
        coeffs=[c[:n_keep] for c in coeffs],
        wall_time_s=time.perf_counter() - t0, boundary_iterations=total_iters,
    )


def _accumulate(cum: np.ndarray, c: np.ndarray) -> np.ndarray:
    if c.shape[0] > cum.shape[0]:
        out = c.copy()
        out[: cum.shape[0]] += cum
        return out
    out = cum.copy()
    out[: c.shape[0]] += c
    return out


def _euro_scaled(model: ModelParams, side: str, x: float, tau: float):
    """European bundle at scaled spot (strike 1)."""
    return _vanilla_bundle(model, side, 1.0, x, tau)


def _boundary_residual(
    model: ModelParams, spec: OptionSpec, node: _NodeWorkspace,
    c: np.ndarray, s: int, b: float,
) -> float:
    eur, dlt, *_ = _euro_scaled(model, spec.side, b, node.tau)
    h = node.h
    rho = node.rho
    u = math.log(b)
    # Value matching with smooth pasting folded in. The x^rho pieces of
    # the prior-order sum and of this order's tail are combined before
    # exponentiation: their leading parts cancel exactly, and computing
    # them separately would produce inf - inf far above the boundary.
    tail = _dpoly(node.cum, u) + _dpoly(c, u)
    return (
        s * (b - 1.0)
        - eur
        - (b / rho) * (s - dlt)
        + _scaled_exp_mul(rho * u, h * tail / rho)
    )


def _solve_node_boundary(
    model, spec, node, c, s, guess, lo_cap, hi_cap, tol
):
    def f(b):
        return _boundary_residual(model, spec, node, c, s, b)

    return _robust_root(f, guess, lo_cap, hi_cap, tol)


def _closing_constant(
    model: ModelParams, spec: OptionSpec, node: _NodeWorkspace,
    c: np.ndarray, s: int, b: float,
) -> float:
    """Constant coefficient from smooth pasting at the solved boundary."""
    _, dlt, *_ = _euro_scaled(model, spec.side, b, node.tau)
    _, Fx_prev = node.F_and_Fx(b)
    h = node.h
    rho = node.rho
    u = math.log(b)
    head = (s - dlt - h * Fx_prev) * b ** (1.0 - rho) / (h * rho)
    poly_tail = _poly(c, u) - c[0]
    return head - poly_tail - _dpoly(c, u) / rho


def _order0_h_derivatives(
    model: ModelParams,
    spec: OptionSpec,
    taus: np.ndarray,
    hs: np.ndarray,
    rhos: np.ndarray,
    b0: np.ndarray,
    c0: np.ndarray,
    s: int,
) -> np.ndarray:
    """Closed-form d/dh of the order-0 constant at every node.

    Differentiating the order-0 boundary conditions in maturity gives a
    linear equation for the boundary velocity, from which the constant's
    maturity derivative follows; dividing by h'(T) converts to an
    h-derivative. This avoids differencing the boundary, which is the
    numerically delicate object.
    """
    out = np.zeros_like(c0)
    for i in range(taus.shape[0]):
        tau = taus[i]
        h = hs[i]
        rho = rhos[i]
        b = b0[i]
        hp = model.r * math.exp(-model.r * tau)
        rho_p = d_rho_dh(model, h, rho) * hp
        eur, dlt, gam, tht, crs = _euro_scaled(model, spec.side, b, tau)
        G = s - dlt
        denom = s - dlt - G / rho + (b / rho) * gam
        rhs = tht - (b * rho_p / (rho * rho)) * G - (b / rho) * crs
        if abs(denom) < 1e-14:
            raise SolverError(
                "boundary velocity equation is degenerate at order 0"
            )
        bp = rhs / denom
        Gp = -(crs + gam * bp)
        c00 = c0[i][0]
        dc_dT = c00 * (
            -rho_p * math.log(b)
            + (1.0 - rho) * bp / b
            + Gp / G
            - hp / h
            - rho_p / rho
        )
        out[i][0] = dc_dT / hp
    return out


def american_vanilla_price(
    model: ModelParams,
    spec: OptionSpec,
    S0: float,
    orders: int = 3,
    settings: SolverSettings | None = None,
) -> PriceReport:
    """One-shot pricing: solve the boundary problem and report at S0."""
    solution = solve_american_vanilla(model, spec, orders, settings)
    return solution.report(S0)
