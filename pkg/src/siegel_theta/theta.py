"""Theta constants with rational characteristics and the quotient family Theta_v.

theta_v(Z) = sum_{n in Z^g} e(1/2 (n+v_u)^T Z (n+v_u) + (n+v_u)^T v_l)

is summed over the ellipsoid (n+v_u)^T Y (n+v_u) <= R^2 with a certified
Gaussian tail bound.  Theta_v is assembled from integer-weighted logarithms of
theta constants so the large exponents never overflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .characteristics import (
    as_vector,
    enumerate_half_chars,
    frac_part,
    half_parity,
    split,
)
from .points import SiegelPoint
from .symplectic import act_on_H, act_on_index, is_gsp

DEFAULT_EPS = 1e-12
RADIUS_CAP = 40.0
RADIUS_START = 1.0
RADIUS_GROWTH = 1.25
# share of the Gaussian exponent kept for the tail sum; the rest pays for the shell
_TAIL_T = 0.5


class TruncationError(RuntimeError):
    def __init__(self, msg, achieved_bound):
        super().__init__(msg)
        self.achieved_bound = achieved_bound


class DegenerateFamilyError(ValueError):
    pass


class EvaluationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    radius: float
    tail_bound: float

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class LogValue:
    """A complex number stored as log|w| and arg w (any branch)."""

    log_magnitude: float
    argument: float

    @classmethod
    def of(cls, w: complex) -> "LogValue":
        if w == 0:
            return cls(-math.inf, 0.0)
        return cls(math.log(abs(w)), cmath.phase(w))

    def to_complex(self) -> complex:
        if self.log_magnitude == -math.inf:
            return 0j
        return cmath.exp(complex(self.log_magnitude, self.argument))

    def __mul__(self, other):
        return LogValue(self.log_magnitude + other.log_magnitude, self.argument + other.argument)

    def __truediv__(self, other):
        return LogValue(self.log_magnitude - other.log_magnitude, self.argument - other.argument)

    def __pow__(self, k: int):
        return LogValue(k * self.log_magnitude, k * self.argument)


def log_relative_residual(a: LogValue, b: LogValue) -> float:
    """|a - b| / |b| computed from logarithms."""
    if b.log_magnitude == -math.inf:
        return 0.0 if a.log_magnitude == -math.inf else math.inf
    if a.log_magnitude == -math.inf:
        return 1.0
    d_mag = a.log_magnitude - b.log_magnitude
    d_arg = math.remainder(a.argument - b.argument, 2 * math.pi)
    if d_mag > 700:
        return math.inf
    return abs(cmath.exp(complex(d_mag, d_arg)) - 1)


def tail_bound(R: float, lam_min: float, g: int) -> float:
    """Bound on sum of |terms| outside the ellipsoid x^T Y x <= R^2.

    For x^T Y x > R^2:  e^{-pi x^TYx} <= e^{-pi(1-t)R^2} e^{-pi t lam |x|^2}, and
    sum_n e^{-c(n+a)^2} <= 2 + sqrt(pi/c) for any shift a.
    """
    c = math.pi * _TAIL_T * lam_min
    return math.exp(-math.pi * (1 - _TAIL_T) * R * R) * (2 + math.sqrt(math.pi / c)) ** g


@lru_cache(maxsize=4096)
def _box(halfwidths: tuple, centers: tuple) -> np.ndarray:
    axes = [
        np.arange(math.floor(-c - h), math.ceil(-c + h) + 1)
        for h, c in zip(halfwidths, centers)
    ]
    grid = np.array(list(product(*axes)), dtype=float)
    grid.flags.writeable = False
    return grid


def _lattice_sum(a: np.ndarray, b: np.ndarray, Z: SiegelPoint, R: float) -> complex:
    halfwidths = tuple(float(R * math.sqrt(d)) for d in Z.Yinv_diag)
    n = _box(halfwidths, tuple(float(x) for x in a))
    x = n + a
    qY = np.einsum("ki,ij,kj->k", x, Z.Y, x)
    keep = qY <= R * R
    x = x[keep]
    qY = qY[keep]
    qX = np.einsum("ki,ij,kj->k", x, Z.X, x)
    phase = math.pi * qX + 2 * math.pi * (x @ b)
    terms = np.exp(-math.pi * qY) * np.exp(1j * phase)
    return complex(terms.sum())


def is_vanishing_char(v) -> bool:
    """True iff <v> lies in S_-, i.e. theta_v vanishes identically."""
    v = as_vector(v).reduced()
    if any(x not in (0, Fraction(1, 2)) for x in v):
        return False
    return half_parity(v) < 0


def theta(v, Z: SiegelPoint, eps: float = DEFAULT_EPS, radius_cap: float = RADIUS_CAP,
          use_criterion: bool = True) -> ThetaValue:
    """theta_v(Z) to absolute accuracy eps.

    With ``use_criterion`` a characteristic in S_- returns exactly 0 without summing.
    """
    v = as_vector(v)
    g = Z.genus
    if v.dim != 2 * g:
        raise ValueError("characteristic of length %d does not match genus %d" % (v.dim, g))
    if eps <= 0:
        raise ValueError("eps must be positive")
    if use_criterion and is_vanishing_char(v):
        return ThetaValue(0j, 0.0, 0.0)
    u, l = split(v)
    # an integer shift of v_u only re-indexes the sum; center the lattice on [-1/2, 1/2)
    a = np.array([float(frac_part(x + Fraction(1, 2)) - Fraction(1, 2)) for x in u])
    b = np.array([float(x) for x in l])
    R = RADIUS_START
    bound = tail_bound(R, Z.lam_min, g)
    while bound >= eps:
        if R >= radius_cap:
            raise TruncationError(
                "tail bound %.3g above eps=%.3g at radius cap %g" % (bound, eps, radius_cap), bound)
        R = min(R * RADIUS_GROWTH, radius_cap)
        bound = tail_bound(R, Z.lam_min, g)
    value = _lattice_sum(a, b, Z, R)
    return ThetaValue(value, R, bound)



def theta_exponents(g: int, N: int) -> tuple:
    """(4N(2^g+1), 4N(2^g-1)): powers of the S_- numerator and S_+ denominator."""
    return 4 * N * (2**g + 1), 4 * N * (2**g - 1)


def prefactor_phase(v, N: int) -> Fraction:
    """t in [0,1) with e(t) = e(-2^g N (2^g-1)(2^g+1) v_u^T v_l), exact."""
    u, l = split(v)
    g = len(u)
    c = 2**g * N * (2**g - 1) * (2**g + 1)
    return frac_part(-c * sum(x * y for x, y in zip(u, l)))


def _char_log(w, Z, eps, radius_cap, use_criterion) -> tuple:
    tv = theta(w, Z, eps, radius_cap, use_criterion=use_criterion)
    return LogValue.of(tv.value), tv


def big_theta_log(v, Z: SiegelPoint, eps: float = DEFAULT_EPS, radius_cap: float = RADIUS_CAP,
                  allow_degenerate: bool = False) -> LogValue:
    """log of Theta_v(Z).

    Theta_v = 2^{4N} e(-2^g N (2^g-1)(2^g+1) v_u^T v_l)
              prod_{a in S_-} theta_{a-v}^{4N(2^g+1)} / prod_{b in S_+} theta_b^{4N(2^g-1)}

    with N the exact denominator of v.  ``v`` is used as given (not reduced), so
    invariance under v -> v + integer vector is a property of the formula.
    ``allow_degenerate`` permits N = 2 and sums vanishing characteristics
    directly instead of short-cutting them to 0.
    """
    v = as_vector(v)
    g = Z.genus
    if v.dim != 2 * g:
        raise ValueError("characteristic of length %d does not match genus %d" % (v.dim, g))
    N = v.level
    if N < 2:
        raise ValueError("v is integral; the family is indexed by exact denominators N >= 2")
    if N == 2 and not allow_degenerate:
        raise DegenerateFamilyError(
            "level N=2: Theta_v becomes identically zero when N=2; the family needs N >= 3")
    minus, plus = enumerate_half_chars(g)
    e_num, e_den = theta_exponents(g, N)
    crit = not allow_degenerate

    acc = LogValue(4 * N * math.log(2.0), 2 * math.pi * float(prefactor_phase(v, N)))
    key = ("splus", eps, radius_cap)
    den = Z.cache.get(key)
    if den is None:
        den = LogValue(0.0, 0.0)
        for b in plus:
            lb, tv = _char_log(b.vector, Z, eps, radius_cap, True)
            if abs(tv.value) <= tv.tail_bound:
                raise EvaluationError(
                    "theta_b for b=%s in S_+ is below its tail bound at Z; numerics bug" % (b.vector,))
            den = den * lb
        Z.cache[key] = den
    acc = acc / den**e_den
    for a in minus:
        la, _ = _char_log(a.vector - v, Z, eps, radius_cap, crit)
        acc = acc * la**e_num
    return acc


def big_theta(v, Z: SiegelPoint, eps: float = DEFAULT_EPS, radius_cap: float = RADIUS_CAP) -> complex:
    """Theta_v(Z) as a complex number (see ``big_theta_log``)."""
    return big_theta_log(v, Z, eps, radius_cap).to_complex()


def big_theta_residual(v, w, Z: SiegelPoint, eps: float = DEFAULT_EPS) -> float:
    """|Theta_v(Z) - Theta_w(Z)| / |Theta_w(Z)|."""
    return log_relative_residual(big_theta_log(v, Z, eps), big_theta_log(w, Z, eps))


def check_sp_action(alpha, v, Z: SiegelPoint, eps: float = DEFAULT_EPS,
                    radius_cap: float = RADIUS_CAP) -> float:
    """Relative gap between Theta_v(alpha(Z)) and Theta_{alpha^T v}(Z).

    Only nu = 1 is in numeric scope; a similitude factor acts on Fourier
    coefficients, not on Z.
    """
    M = np.asarray(getattr(alpha, "m", alpha), dtype=np.int64)
    if is_gsp(M) != 1:
        raise ValueError("check_sp_action needs an integral symplectic matrix (nu = 1)")
    w = act_on_index(M, v)
    lhs = big_theta_log(v, act_on_H(M, Z), eps, radius_cap)
    rhs = big_theta_log(w, Z, eps, radius_cap)
    return log_relative_residual(lhs, rhs)
