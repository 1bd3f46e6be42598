"""Flux function, C1 cut-off, and the singular Q integrals with tracked constants.

The cut-off phi(s) = f(2s/s_0) is built from the flux function

    f(sigma) = [sigma (log sigma - log a) - (sigma - a)] / (-log a),  a <= sigma <= 1,

extended by 0 below a and continued concavely to reach 1 with zero slope at
or before sigma = 2.  The weighted-area machinery only ever uses three facts
about the continuation: it is C1, it stays in [0,1], and its second
derivative is <= 0 on (1,2].  The quantity

    Q = int_S^{s0/2} s^{2 gamma} |phi''|^{1+gamma} phi^{-gamma} ds

has an integrable endpoint singularity at s = S and admits a fully explicit
upper bound; both are computed here, the bound with every constant tracked
numerically rather than hidden in a generic C(gamma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

__all__ = [
    "CutoffSpec",
    "QReport",
    "flux_value",
    "flux_deriv",
    "flux_second_deriv",
    "flux_knots",
    "compute_Q",
    "q_analytic_bound",
    "q_bound_constant",
    "elementary_inequalities",
    "log_excess",
    "INV_SQUARE_CONSTANT",
]

# Universal constant in the barrier consequence 1/U <= C s^2 / t on (0, s_0):
# from U >= 2t/sinh^2(s) and the chord bound sinh(s) <= 3s/(4 log 2) valid on
# (0, log 2) by convexity with sinh(log 2) = 3/4, giving C = 9/(32 log^2 2).
INV_SQUARE_CONSTANT = 9.0 / (32.0 * math.log(2.0) ** 2)


def log_excess(x):
    """(1+x) log(1+x) - x, stable near x = 0.

    Alternating series sum_{n>=2} (-1)^n x^n / (n(n-1)) takes over for
    |x| < 1e-4 where the direct formula loses all significant digits.
    The flux numerator sigma log(sigma/a) - (sigma - a) equals
    a * log_excess(sigma/a - 1), which is how the Q integrand stays finite
    through adaptive quadrature sampling arbitrarily close to the endpoint.
    """
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, x, 0.0)
    # x^2/2 - x^3/6 + x^4/12 - x^5/20 + x^6/30; next term <= 1e-30 at the cut
    series = xs * xs * (1.0 / 2.0 + xs * (-1.0 / 6.0 + xs * (1.0 / 12.0 + xs * (-1.0 / 20.0 + xs / 30.0))))
    xl = np.where(small, 1.0, x)
    direct = (1.0 + xl) * np.log1p(xl) - xl
    out = np.where(small, series, direct)
    return float(out) if out.ndim == 0 else out


def _f1(a: float) -> float:
    # f(1) = 1 - (1-a)/(-log a), the height the closed form reaches at sigma=1
    return 1.0 - (1.0 - a) / (-math.log(a))


def _filler(a: float):
    """Concave C1 continuation of f on [1,2]: kind, knot, and coefficients.

    The cubic Hermite through (1, f1) slope 1 and (2, 1) slope 0 has
    p'' = (12 f1 - 6) tau + (2 - 6 f1), tau = sigma - 1, so it is concave
    exactly when f1 in [1/3, 2/3].  Outside that window:
      f1 > 2/3: single quadratic peaking at 3 - 2 f1 <= 2, then constant 1;
      f1 < 1/3: slope-1 line to sigma = 2 - 2 f1, then a downward parabola
                arriving at (2, 1) with zero slope.
    All three are C1, nondecreasing, within [f1, 1], and have f'' <= 0.
    """
    f1 = _f1(a)
    if 1.0 / 3.0 <= f1 <= 2.0 / 3.0:
        return ("cubic", 2.0, f1)
    if f1 >= 0.5:
        return ("quadratic", 3.0 - 2.0 * f1, f1)
    return ("linear_parabola", 2.0 - 2.0 * f1, f1)


def flux_knots(a: float) -> tuple:
    """Breakpoints of the piecewise definition: (a, 1, interior knot, 2)."""
    _check_a(a)
    _, knot, _ = _filler(a)
    return (a, 1.0, knot, 2.0)


def _check_a(a: float):
    if not (0.0 < a < 1.0):
        raise ValueError("flux parameter a must lie in (0,1)")


def _filler_eval(a: float, sigma: np.ndarray, order: int) -> np.ndarray:
    kind, knot, f1 = _filler(a)
    tau = sigma - 1.0
    if kind == "cubic":
        # expanded Hermite basis: p(tau) = f1 + tau + c2 tau^2 + c3 tau^3
        c2 = 1.0 - 3.0 * f1
        c3 = 2.0 * f1 - 1.0
        if order == 0:
            return f1 + tau + tau * tau * (c2 + c3 * tau)
        if order == 1:
            return 1.0 + tau * (2.0 * c2 + 3.0 * c3 * tau)
        return 2.0 * c2 + 6.0 * c3 * tau
    if kind == "quadratic":
        # q(sigma) = f1 + tau - tau^2/(4(1-f1)) until the peak, then 1
        denom = 4.0 * (1.0 - f1)
        before = sigma < knot
        if order == 0:
            return np.where(before, f1 + tau - tau * tau / denom, 1.0)
        if order == 1:
            return np.where(before, 1.0 - 2.0 * tau / denom, 0.0)
        return np.where(before, -2.0 / denom, 0.0)
    # linear then parabola: line f1 + tau until knot = 2 - 2 f1, then
    # 1 - (2 - sigma)^2/(4 f1); C1 because the line slope is 1 and the
    # parabola slope at the knot is (2 - knot)/(2 f1) = 1.
    before = sigma < knot
    rem = 2.0 - sigma
    if order == 0:
        return np.where(before, f1 + tau, 1.0 - rem * rem / (4.0 * f1))
    if order == 1:
        return np.where(before, 1.0, rem / (2.0 * f1))
    return np.where(before, 0.0, -1.0 / (2.0 * f1))


def _flux_piecewise(a: float, sigma, order: int):
    _check_a(a)
    sigma = np.asarray(sigma, dtype=float)
    scalar = sigma.ndim == 0
    sigma = np.atleast_1d(sigma)
    out = np.zeros_like(sigma)
    neg_log_a = -math.log(a)

    core = (sigma >= a) & (sigma < 1.0)
    filler = (sigma >= 1.0) & (sigma < 2.0)
    high = sigma >= 2.0

    if np.any(core):
        sc = sigma[core]
        if order == 0:
            out[core] = a * log_excess(sc / a - 1.0) / neg_log_a
        elif order == 1:
            out[core] = np.log(sc / a) / neg_log_a
        else:
            out[core] = 1.0 / (sc * neg_log_a)
    if np.any(filler):
        out[filler] = _filler_eval(a, sigma[filler], order)
    if np.any(high) and order == 0:
        out[high] = 1.0
    # below a everything is identically zero, all orders
    if scalar:
        return float(out[0])
    return out


def flux_value(a: float, sigma):
    """The C1 flux function: 0 below a, closed form on [a,1], concave filler, then 1.

    On [a,1] the numerator sigma log(sigma/a) - (sigma - a) is evaluated via
    log_excess, which keeps f >= 0 exact through roundoff at sigma ~ a.
    """
    return _flux_piecewise(a, sigma, 0)


def flux_deriv(a: float, sigma):
    """First derivative of flux_value; log(sigma/a)/(-log a) on the core range."""
    return _flux_piecewise(a, sigma, 1)


def flux_second_deriv(a: float, sigma):
    """Second derivative, right-hand limit at the breakpoints.

    Classically undefined exactly at sigma = a and sigma = 1 (the one-sided
    values disagree there); this function always reports the limit from the
    right, so f''(a) = 1/(a(-log a)) and f''(1) is the filler's value.
    """
    return _flux_piecewise(a, sigma, 2)


@dataclass(frozen=True)
class CutoffSpec:
    """The triple (r0, R, gamma) with the derived cut-off geometry.

    Invariants enforced: r0 in (1/2, 1) so s0 = -log r0 <= log 2;
    R in (r0^{1/3}, 1) so S = -log R <= s0/3 and a = 2S/s0 <= 2/3;
    gamma in (0, 1/2) so the Q singularity (sigma-a)^{-2 gamma} is integrable.
    """

    r0: float
    R: float
    gamma: float
    s0: float = field(init=False)
    S: float = field(init=False)
    a: float = field(init=False)

    def __post_init__(self):
        if not (0.5 < self.r0 < 1.0):
            raise ValueError("r0 must lie in (1/2, 1)")
        if not (self.r0 ** (1.0 / 3.0) < self.R < 1.0):
            raise ValueError("R must lie in (r0^{1/3}, 1)")
        if not (0.0 < self.gamma < 0.5):
            raise ValueError("gamma must lie in (0, 1/2)")
        object.__setattr__(self, "s0", -math.log(self.r0))
        object.__setattr__(self, "S", -math.log(self.R))
        object.__setattr__(self, "a", 2.0 * self.S / self.s0)

    def value(self, s):
        """phi(s) = f(2s/s0) with a = 2S/s0."""
        return flux_value(self.a, 2.0 * np.asarray(s, dtype=float) / self.s0)

    def deriv(self, s):
        return (2.0 / self.s0) * flux_deriv(self.a, 2.0 * np.asarray(s, dtype=float) / self.s0)

    def second_deriv(self, s):
        return (2.0 / self.s0) ** 2 * flux_second_deriv(self.a, 2.0 * np.asarray(s, dtype=float) / self.s0)

    def knots_s(self) -> tuple:
        """Piecewise breakpoints in the s variable: (S, s0/2, filler knot, s0)."""
        return tuple(k * self.s0 / 2.0 for k in flux_knots(self.a))


@dataclass(frozen=True)
class QReport:
    """Q quadrature values, split parts, analytic bound, and tracked constant."""

    Q: float
    Q1: float
    Q2: float
    analytic_bound: float
    tracked_constant: float
    quadrature_error: float
    split_applied: bool

    def __post_init__(self):
        if self.Q < 0.0 or self.Q1 < 0.0 or self.Q2 < 0.0:
            raise ValueError("Q integrals must be nonnegative")


def _q_integral_beta(gamma: float, b_lo: float, b_hi: float, tol: float = 1e-12) -> tuple:
    """int_{b_lo}^{b_hi} beta^{gamma-1} (beta log beta - beta + 1)^{-gamma} dbeta.

    The integrand blows up like 2^gamma (beta-1)^{-2 gamma} at beta = 1, so the
    singular factor is handed to the quadrature routine as an algebraic weight
    and the remaining smooth part is evaluated with log_excess protection.
    """
    if b_hi <= b_lo:
        return 0.0, 0.0

    def smooth(beta):
        beta = np.asarray(beta, dtype=float)
        x = beta - 1.0
        # (beta log beta - beta + 1)/(beta-1)^2, series-protected; -> 1/2 at beta=1
        small = np.abs(x) < 1e-4
        xsafe = np.where(small, 1.0, x)
        ratio = np.where(small,
                         0.5 + x * (-1.0 / 6.0 + x * (1.0 / 12.0 - x / 20.0)),
                         log_excess(xsafe) / (xsafe * xsafe))
        return beta ** (gamma - 1.0) * ratio ** (-gamma)

    if b_lo == 1.0:
        val, err = integrate.quad(smooth, b_lo, b_hi, weight="alg", wvar=(-2.0 * gamma, 0.0),
                                  epsabs=tol, epsrel=tol, limit=200)
        return val, err

    def integrand(beta):
        beta = np.asarray(beta, dtype=float)
        return beta ** (gamma - 1.0) * log_excess(beta - 1.0) ** (-gamma)

    val, err = integrate.quad(integrand, b_lo, b_hi, epsabs=tol, epsrel=tol, limit=200)
    return val, err


def compute_Q(spec: CutoffSpec, tol: float = 1e-12) -> QReport:
    """Adaptive quadrature of Q with the substitution beta = sigma/a.

    In beta coordinates Q = (2/s0) (-log a)^{-1} int_1^{1/a} beta^{gamma-1}
    (beta log beta - beta + 1)^{-gamma} dbeta, which removes every power of a
    from the integrand.  When e^2 a < 1 the integral is split at beta = e^2
    into the near part Q2 (sigma of order a) and the far part Q1, mirroring
    the two-regime estimate; otherwise the single-range value is reported
    with Q1 = 0.
    """
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    a, gamma = spec.a, spec.gamma
    prefactor = (2.0 / spec.s0) / (-math.log(a))
    b_max = 1.0 / a
    split = math.exp(2.0) * a < 1.0
    if split:
        near, err_near = _q_integral_beta(gamma, 1.0, math.exp(2.0), tol)
        far, err_far = _q_integral_beta(gamma, math.exp(2.0), b_max, tol)
        q2 = prefactor * near
        q1 = prefactor * far
        q = q1 + q2
        err = prefactor * (err_near + err_far)
    else:
        whole, err_whole = _q_integral_beta(gamma, 1.0, b_max, tol)
        q = prefactor * whole
        q1, q2 = 0.0, q
        err = prefactor * err_whole
    return QReport(
        Q=q, Q1=q1, Q2=q2,
        analytic_bound=q_analytic_bound(spec),
        tracked_constant=q_bound_constant(gamma),
        quadrature_error=err,
        split_applied=split,
    )


@lru_cache(maxsize=None)
def _i2(gamma: float) -> float:
    """int_1^{e^2} beta^gamma (beta-1)^{-2 gamma} dbeta, finite for gamma < 1/2."""
    val, _ = integrate.quad(
        lambda b: b ** gamma, 1.0, math.exp(2.0),
        weight="alg", wvar=(-2.0 * gamma, 0.0), epsabs=1e-13, epsrel=1e-13, limit=200,
    )
    return val


@lru_cache(maxsize=None)
def q_bound_constant(gamma: float) -> float:
    """The explicit constant C(gamma) in Q <= C(gamma)/(s0 (log s0 - log S)^gamma).

    Assembled from the two-regime chain:
      far range:   numerator bound sigma log(sigma/a) - (sigma-a) >= (sigma/2) log(sigma/a)
                   gives Q1 <= 2^{1+gamma}/(1-gamma) (-log a)^{-gamma}/s0;
      near range:  numerator bound >= (sigma-a)^2/(2 sigma) gives
                   Q2 <= 2^{1+gamma} I2(gamma) (-log a)^{-1}/s0
                   with I2 = int_1^{e^2} beta^gamma (beta-1)^{-2 gamma} dbeta;
      absorption:  (-log a)^{-1} <= (log 3/2)^{gamma-1} (-log a)^{-gamma}
                   since a <= 2/3;
      final:       -log a >= (1 - log2/log3)(log s0 - log S) since S <= s0/3.
    The single-range case (e^2 a >= 1) is dominated by the same expression.
    """
    if not (0.0 < gamma < 0.5):
        raise ValueError("gamma must lie in (0, 1/2)")
    i2 = _i2(gamma)
    bracket = i2 * math.log(1.5) ** (gamma - 1.0) + 1.0 / (1.0 - gamma)
    return 2.0 ** (1.0 + gamma) * (1.0 - math.log(2.0) / math.log(3.0)) ** (-gamma) * bracket


def q_analytic_bound(spec: CutoffSpec) -> float:
    """Upper bound C(gamma)/[s0 (log s0 - log S)^gamma] with the tracked constant."""
    depth = math.log(spec.s0) - math.log(spec.S)
    return q_bound_constant(spec.gamma) / (spec.s0 * depth ** spec.gamma)


def elementary_inequalities(kind: str, *args) -> float:
    """Margin (RHS - LHS) of the three scalar inequalities the chain relies on.

    kind "log_power":   log(1+x) <= x^lam / lam       for lam in (0,1), x >= 0
    kind "log_quad":    log(1+x) <= x - x^2/2         for x in (-1, 0]
    kind "sinh_chord":  sinh(s) <= 3 s/(4 log 2)      for s in (0, log 2)
    """
    if kind == "log_power":
        lam, x = args
        if not (0.0 < lam < 1.0):
            raise ValueError("lambda must lie in (0,1)")
        if x < 0.0:
            raise ValueError("x must be nonnegative")
        return x ** lam / lam - math.log1p(x)
    if kind == "log_quad":
        (x,) = args
        if not (-1.0 < x <= 0.0):
            raise ValueError("x must lie in (-1, 0]")
        return (x - x * x / 2.0) - math.log1p(x)
    if kind == "sinh_chord":
        (s,) = args
        if not (0.0 < s < math.log(2.0)):
            raise ValueError("s must lie in (0, log 2)")
        return 3.0 * s / (4.0 * math.log(2.0)) - math.sinh(s)
    raise ValueError(f"unknown inequality kind {kind!r}")
