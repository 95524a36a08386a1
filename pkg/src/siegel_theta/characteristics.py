"""Exact characteristic vectors v in Q^{2g}, their +-classes mod Z^{2g},
and the half-integral characteristics split by parity.

Everything here is exact (``fractions.Fraction``); no floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Sequence

HALF = Fraction(1, 2)

# enumerate_I_N returns a list below this many raw vectors, an iterator above
MATERIALIZE_LIMIT = 10**7


class DimensionError(ValueError):
    pass


def frac_part(x) -> Fraction:
    """<x>: the representative of x mod 1 in [0, 1)."""
    x = Fraction(x)
    return x - math.floor(x)


def _to_fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("characteristic entries must be exact, got float %r" % x)
    return Fraction(x)


@dataclass(frozen=True)
class FracVector:
    entries: tuple

    def __init__(self, entries: Iterable):
        if isinstance(entries, str):
            entries = FracVector.parse(entries).entries
        object.__setattr__(self, "entries", tuple(_to_fraction(x) for x in entries))

    @classmethod
    def parse(cls, text: str) -> "FracVector":
        """Parse the comma-separated grammar, e.g. ``"1/3,0,0,2/3"``."""
        parts = text.split(",")
        entries = []
        pos = 0
        for part in parts:
            try:
                entries.append(Fraction(part.strip()))
            except (ValueError, ZeroDivisionError):
                raise ValueError("cannot parse rational %r at position %d" % (part, pos)) from None
            pos += len(part) + 1
        return cls(entries)

    def __str__(self):
        return ",".join(str(x) for x in self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __neg__(self):
        return FracVector(-x for x in self.entries)

    def __add__(self, other):
        other = as_vector(other)
        if len(other) != len(self):
            raise DimensionError("length mismatch %d != %d" % (len(self), len(other)))
        return FracVector(a + b for a, b in zip(self.entries, other.entries))

    def __sub__(self, other):
        return self + (-as_vector(other))

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def genus(self) -> int:
        if self.dim % 2:
            raise DimensionError("odd dimension %d has no genus" % self.dim)
        return self.dim // 2

    @property
    def level(self) -> int:
        """Exact denominator: least N >= 1 with N*v integral."""
        return math.lcm(*(x.denominator for x in self.entries)) if self.entries else 1

    def reduced(self) -> "FracVector":
        return FracVector(frac_part(x) for x in self.entries)

    def scaled(self, n: int) -> tuple:
        """Integer vector n*v; raises if not integral."""
        out = []
        for x in self.entries:
            y = x * n
            if y.denominator != 1:
                raise ValueError("%s * %d is not integral" % (self, n))
            out.append(y.numerator)
        return tuple(out)


def as_vector(v) -> FracVector:
    if isinstance(v, FracVector):
        return v
    if isinstance(v, IndexClass):
        return v.rep
    if isinstance(v, str):
        return FracVector.parse(v)
    return FracVector(v)


def split(v) -> tuple:
    """(v_u, v_l): first and last g entries."""
    v = as_vector(v)
    g = v.genus
    return v.entries[:g], v.entries[g:]


@dataclass(frozen=True)
class IndexClass:
    """A class of I_N modulo +- and Z^{2g}, stored by its canonical rep."""

    rep: FracVector
    level: int

    def __str__(self):
        return str(self.rep)

    @property
    def genus(self) -> int:
        return self.rep.genus

    def residues(self) -> tuple:
        """N*rep as a tuple of integers in [0, N)."""
        return self.rep.scaled(self.level)


def canonical(v) -> IndexClass:
    v = as_vector(v)
    a = v.reduced()
    b = (-v).reduced()
    rep = min(a, b, key=lambda w: w.entries)
    return IndexClass(rep, rep.level)


def _index_residues(g: int, N: int) -> Iterator[tuple]:
    # residue vectors in [0,N)^{2g} with gcd(entries, N) = 1, i.e. exact denominator N,
    # taking the lexicographic min of the +- pair
    for r in product(range(N), repeat=2 * g):
        if math.gcd(N, *r) != 1:
            continue
        neg = tuple((-x) % N for x in r)
        if neg < r:
            continue
        yield r


def iter_I_N(g: int, N: int) -> Iterator[IndexClass]:
    if g < 1:
        raise ValueError("genus must be >= 1")
    if N < 2:
        raise ValueError("level N must be >= 2, got %d" % N)
    for r in _index_residues(g, N):
        yield IndexClass(FracVector(Fraction(x, N) for x in r), N)


def enumerate_I_N(g: int, N: int):
    """All classes of I_N / (+-, Z^{2g}).

    A list for desk-scale (g, N); past ``MATERIALIZE_LIMIT`` raw vectors an iterator.
    """
    if N < 2:
        raise ValueError("level N must be >= 2, got %d" % N)
    if N ** (2 * g) > MATERIALIZE_LIMIT:
        return iter_I_N(g, N)
    return list(iter_I_N(g, N))


def count_I_N(g: int, N: int) -> int:
    """|I_N / +-| via Jordan's totient; used as an independent count."""
    J = N ** (2 * g)
    for p in _prime_factors(N):
        J = J // p ** (2 * g) * (p ** (2 * g) - 1)
    # v = -v mod Z only for half-integral vectors (N = 2)
    return J if N == 2 else J // 2


def _prime_factors(n: int) -> list:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class HalfChar:
    entries: tuple
    parity: int

    @property
    def vector(self) -> FracVector:
        return FracVector(self.entries)


def half_parity(a) -> int:
    """e(2 a_u^T a_l) for a in {0,1/2}^{2g}: +1 or -1."""
    u, l = split(a)
    if any((2 * Fraction(x)).denominator != 1 for x in u + l):
        raise ValueError("not a half-integral characteristic: %s" % (as_vector(a),))
    # t lies in (1/2)Z, so e(t) = +-1
    t = 2 * sum(x * y for x, y in zip(u, l))
    return 1 if t.denominator == 1 else -1


def enumerate_half_chars(g: int) -> tuple:
    """(S_minus, S_plus) partitioning {0,1/2}^{2g} by parity."""
    minus, plus = [], []
    for bits in product((0, 1), repeat=2 * g):
        entries = tuple(Fraction(b, 2) for b in bits)
        p = half_parity(entries)
        (minus if p < 0 else plus).append(HalfChar(entries, p))
    return minus, plus


def n_counts(g: int) -> tuple:
    """(n_0, n_half) = (2^{2g-2} - 2^{g-1}, 2^{2g-2})."""
    if g < 1:
        raise ValueError("genus must be >= 1")
    n_half = 4 ** (g - 1)
    return n_half - 2 ** (g - 1), n_half


def coordinate_counts(g: int) -> list:
    """Per coordinate k, the number of a in S_- with a_k = 0 and with a_k = 1/2."""
    minus, _ = enumerate_half_chars(g)
    out = []
    for k in range(2 * g):
        zeros = sum(1 for a in minus if a.entries[k] == 0)
        out.append((zeros, len(minus) - zeros))
    return out


def basis_vector(g: int, j: int, N: int) -> FracVector:
    """(1/N) e_j, with j 1-based in 1..2g."""
    if not 1 <= j <= 2 * g:
        raise ValueError("index j=%d out of range for g=%d" % (j, g))
    return FracVector(Fraction(1, N) if k == j - 1 else 0 for k in range(2 * g))


def e_vector(g: int, N: int) -> FracVector:
    """(1/N) e, e = e_1 + ... + e_{2g}."""
    return FracVector([Fraction(1, N)] * (2 * g))


def f_vector(g: int, N: int) -> FracVector:
    """(1/N) f, f = e_1 + ... + e_g."""
    return FracVector([Fraction(1, N)] * g + [Fraction(0)] * g)


def target_vector(target: str, g: int, N: int) -> FracVector:
    """Named generator index: ``e``, ``f`` or ``e1`` ... ``e{2g}``."""
    t = target.strip().lower().replace("_", "")
    if t == "e":
        return e_vector(g, N)
    if t == "f":
        return f_vector(g, N)
    if t.startswith("e") and t[1:].isdigit():
        return basis_vector(g, int(t[1:]), N)
    raise ValueError("unknown target %r (expected e, f or e1..e%d)" % (target, 2 * g))


def has_half_integral_pair(v) -> bool:
    """True if some (<v_k>, <v_{k+g}>) lies in {0,1/2}^2."""
    u, l = split(v)
    ok = {Fraction(0), HALF}
    return any(frac_part(a) in ok and frac_part(b) in ok for a, b in zip(u, l))


def vectors_from_residues(residues: Sequence[int], N: int) -> FracVector:
    return FracVector(Fraction(r, N) for r in residues)
