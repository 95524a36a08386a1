"""Genus one: Siegel functions g_v(tau) as q-products, their q-orders, the
collapse Theta_v = g_v^{12N}, and the diagonal factorization of theta_v.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .characteristics import HALF, as_vector, frac_part, split
from .points import SiegelPoint
from .theta import (
    DEFAULT_EPS,
    LogValue,
    big_theta_log,
    log_relative_residual,
    theta,
)

MIN_FACTORS = 40


@dataclass(frozen=True)
class QProductValue:
    value: complex
    terms_used: int
    truncation_error: float
    log: LogValue


def b2(x) -> Fraction:
    """Second Bernoulli polynomial x^2 - x + 1/6, exact."""
    x = Fraction(x)
    return x * x - x + Fraction(1, 6)


def _e(x) -> complex:
    return cmath.exp(2j * math.pi * x)


def _pair(v) -> tuple:
    v = as_vector(v)
    if v.dim != 2:
        raise ValueError("a Siegel function index is a pair (r, s), got length %d" % v.dim)
    r, s = v.entries
    if r.denominator == 1 and s.denominator == 1:
        raise ValueError("g_v is undefined for integral v = (%s, %s)" % (r, s))
    return r, s


def siegel_g(v, tau: complex, eps: float = DEFAULT_EPS) -> QProductValue:
    """g_v(tau) = -q^{B_2(r)/2} e(s(r-1)/2) (1 - q^r e(s)) prod_{n>=1} (1 - q^{n+r} e(s))(1 - q^{n-r} e(-s)).

    Powers q^x are exp(2 pi i x tau) with x the exact rational.  The product is
    accumulated as a sum of logarithms.
    """
    r, s = _pair(v)
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    aq = math.exp(-2 * math.pi * tau.imag)
    # |q|^{n/2} < eps, and n beyond |r| so every remaining factor is near 1
    M = max(MIN_FACTORS, math.ceil(2 * math.log(1 / eps) / (2 * math.pi * tau.imag)) + math.ceil(abs(r)) + 1)
    n = np.arange(1, M + 1)
    rf, sf = float(r), float(s)
    x_plus = np.exp(2j * np.pi * ((n + rf) * tau + sf))
    x_minus = np.exp(2j * np.pi * ((n - rf) * tau - sf))
    head = 1 - _e(rf * tau + sf)
    log_head = LogValue.of(head)
    logs = np.log(1 - x_plus) + np.log(1 - x_minus)
    total = complex(logs.sum())
    # leading factor: -1 * q^{B_2(r)/2} * e(s(r-1)/2)
    lead = 2j * math.pi * (float(b2(r) / 2) * tau + float(frac_part(s * (r - 1) / 2))) + 1j * math.pi
    log_val = LogValue(lead.real + total.real + log_head.log_magnitude,
                       lead.imag + total.imag + log_head.argument)
    tail = 2 * (aq ** (M + 1 + rf) + aq ** (M + 1 - rf)) / (1 - aq)
    return QProductValue(log_val.to_complex(), M, tail, log_val)


def ord_q(v) -> Fraction:
    """(1/2) B_2(<r>)."""
    r, _ = _pair(v)
    return b2(frac_part(r)) / 2


DEFAULT_Y_GRID = (24, 32, 40, 48)


def numeric_order(v, y_grid=DEFAULT_Y_GRID) -> float:
    """Least-squares slope of log|g_v(iy)| against -2 pi y.

    The next q-power after the leading one is q^{min(<r>, 1-<r>)}, so for
    denominators up to 7 the grid must reach Im tau ~ 40 before that
    correction drops below 1e-6 of the slope.
    """
    y = np.asarray(y_grid, dtype=float)
    if len(y) < 2 or np.any(np.diff(y) <= 0) or y[0] < 2:
        raise ValueError("y_grid must be increasing with min >= 2")
    logs = np.array([siegel_g(v, 1j * yy).log.log_magnitude for yy in y])
    slope, _ = np.polyfit(-2 * np.pi * y, logs, 1)
    return float(slope)


def xi(vk, vkg) -> complex:
    """xi_k = e((2 v_k v_{k+g} + v_k - v_{k+g}) / 4), from the exact rationals."""
    return _e(float(frac_part((2 * vk * vkg + vk - vkg) / 4)))


def diag_restrict_rhs(v, taus, eps: float = DEFAULT_EPS) -> complex:
    """prod_k xi_k g_{(1/2 - v_k, 1/2 - v_{k+g})}(tau_k) g_{(1/2,1/2)}(tau_k)^{-1} theta_{00}(tau_k),
    or exactly 0 when some (<v_k>, <v_{k+g}>) = (1/2, 1/2)."""
    u, l = split(v)
    if len(taus) != len(u):
        raise ValueError("need %d values of tau, got %d" % (len(u), len(taus)))
    out = 1 + 0j
    for vk, vkg, tau in zip(u, l, taus):
        if frac_part(vk) == HALF and frac_part(vkg) == HALF:
            return 0j
        gk = siegel_g((HALF - vk, HALF - vkg), tau, eps).value
        gh = siegel_g((HALF, HALF), tau, eps).value
        t0 = theta((0, 0), SiegelPoint([[tau]]), eps).value
        out *= xi(vk, vkg) * gk / gh * t0
    return out


def diag_restrict_check(v, taus, eps: float = DEFAULT_EPS) -> dict:
    """Compare theta_v(diag(tau_1..tau_g)) against its product formula.

    Returns ``branch`` ('product' or 'zero') and ``residual``: relative difference
    on the product branch, |theta_v(diag)| on the zero branch.
    """
    v = as_vector(v)
    Z = SiegelPoint.diag(taus)
    lhs = theta(v, Z, eps, use_criterion=False).value
    rhs = diag_restrict_rhs(v, taus, eps)
    if rhs == 0:
        return {"branch": "zero", "residual": abs(lhs), "lhs": lhs, "rhs": rhs}
    return {"branch": "product", "residual": abs(lhs - rhs) / abs(rhs), "lhs": lhs, "rhs": rhs}


def genus1_identity_residual(v, tau: complex, N: int | None = None, eps: float = DEFAULT_EPS) -> float:
    """|Theta_v(tau) - g_v(tau)^{12N}| / |g_v(tau)^{12N}|."""
    v = as_vector(v)
    if v.dim != 2:
        raise ValueError("genus-1 identity needs a pair (r, s)")
    N = N or v.level
    if N != v.level:
        raise ValueError("v has exact denominator %d, not %d" % (v.level, N))
    if N < 3:
        raise ValueError("the identity is stated for N >= 3")
    lhs = big_theta_log(v, SiegelPoint([[tau]]), eps)
    rhs = siegel_g(v, tau, eps).log ** (12 * N)
    return log_relative_residual(lhs, rhs)


def siegel_power_log(v, tau: complex, power: int, eps: float = DEFAULT_EPS) -> LogValue:
    return siegel_g(v, tau, eps).log ** power


__all__ = [
    "QProductValue", "b2", "siegel_g", "ord_q", "numeric_order", "xi",
    "diag_restrict_rhs", "diag_restrict_check", "genus1_identity_residual",
    "siegel_power_log", "DEFAULT_Y_GRID",
]
