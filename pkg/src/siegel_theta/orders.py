"""Exact vanishing-order calculus for Theta_v.

Along diagonal degenerations Z -> diag(tau_1, ..., tau_g) the q-order of Theta_v
in coordinate k is controlled by

    n_0 B_2(<1/2 + v_k>) + n_{1/2} B_2(<v_k>),

and equality of these signatures is necessary for Theta_v^n = Theta_{v'}^n when
v has no half-integral coordinate pair.  All arithmetic here is exact.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from .characteristics import (
    HALF,
    as_vector,
    canonical,
    enumerate_I_N,
    frac_part,
    has_half_integral_pair,
    n_counts,
    split,
    target_vector,
)
from .genus1 import b2
from .symplectic import act_on_index, elementary, from_blocks, gl_block, rotation

CASES = ("both-lower", "lower-upper", "upper-lower", "both-upper")


@dataclass(frozen=True)
class OrderSignature:
    level: int
    entries: tuple

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.entries) + ")"

    def to_strings(self) -> list:
        return [str(x) for x in self.entries]


def signature_entry(x, g: int) -> Fraction:
    n0, nh = n_counts(g)
    return n0 * b2(frac_part(HALF + x)) + nh * b2(frac_part(x))


def order_signature(v, g: int | None = None) -> OrderSignature:
    v = as_vector(v)
    g = g or v.genus
    if v.dim != 2 * g:
        raise ValueError("index of length %d does not have genus %d" % (v.dim, g))
    return OrderSignature(v.level, tuple(signature_entry(x, g) for x in v))


def rotated(v):
    """(v_l; -v_u), the index after the rotation [[O, I], [-I, O]]^T."""
    u, l = split(v)
    return as_vector(list(l) + [-x for x in u])


def signature_pair(v) -> tuple:
    return order_signature(v), order_signature(rotated(v))


def _in_half(V: int, N: int, upper: bool) -> bool:
    return (2 * V >= N) if upper else (0 <= 2 * V < N)


def case_candidates(V: int, g: int, N: int, case: str) -> set:
    """Residues V' = N v'_k solving the signature equation for one coordinate.

    ``case`` fixes which half of [0, 1) v_k and v'_k lie in.  Each case has the
    trivial root (V or N - V) and one more root that is integral only when
    (2^g - 1) divides the relevant multiple of N.
    """
    if g < 2:
        raise ValueError("the signature calculus needs g >= 2")
    if case not in CASES:
        raise ValueError("case must be one of %s" % (CASES,))
    v_upper = case in ("upper-lower", "both-upper")
    w_upper = case in ("lower-upper", "both-upper")
    if not (0 <= V < N) or not _in_half(V, N, v_upper):
        raise ValueError("V=%d is not in the %s half for case %s" % (V, "upper" if v_upper else "lower", case))
    m = 2**g - 1
    n0_frac = Fraction((2 ** (g - 1) - 1) * N, m)   # n_0 N / (n_0 + n_half)
    nh_frac = Fraction(2 ** (g - 1) * N, m)         # n_half N / (n_0 + n_half)
    if case == "both-lower":
        roots = [Fraction(V), nh_frac - V]
    elif case == "lower-upper":
        roots = [Fraction(N - V), V + n0_frac]
    elif case == "upper-lower":
        roots = [Fraction(N - V), V - n0_frac]
    else:
        roots = [Fraction(V), N + n0_frac - V]
    out = set()
    for x in roots:
        if x.denominator == 1 and 0 <= x < N and _in_half(int(x), N, w_upper):
            out.add(int(x))
    return out


def case_candidates_bruteforce(V: int, g: int, N: int, case: str) -> set:
    """All V' in the case's half with equal signature entry, by enumeration."""
    w_upper = case in ("lower-upper", "both-upper")
    target = signature_entry(Fraction(V, N), g)
    return {W for W in range(N) if _in_half(W, N, w_upper)
            and signature_entry(Fraction(W, N), g) == target}


def primitivity_precondition(g: int, N: int) -> bool:
    """g >= 2, N not in {1, 2, 4}, and (2^g - 1) does not divide N."""
    return g >= 2 and N not in (1, 2, 4) and N % (2**g - 1) != 0


def precondition_failures(g: int, N: int) -> list:
    out = []
    if g < 2:
        out.append("g >= 2")
    if N in (1, 2, 4):
        out.append("N != 1,2,4")
    if N % (2**g - 1) == 0:
        out.append("(2^g-1) does not divide N")
    return out


# -- sign bookkeeping of the coordinate case analysis, as a checker --------

def case_pattern(Vi, Vj, Vi2, Vj2, N: int, kind: str) -> list:
    """Labels among A1..A8 (kind 'A', sums) or B1..B8 (kind 'B', differences)
    whose three congruences hold for (V_i, V_j) versus (V_i', V_j')."""
    s = 1 if kind == "A" else -1
    labels = []
    for idx, (t, a, b) in enumerate(product((1, -1), repeat=3), start=1):
        ok = ((Vi + s * Vj) - t * (Vi2 + s * Vj2)) % N == 0
        ok = ok and (Vi - a * Vi2) % N == 0 and (Vj - b * Vj2) % N == 0
        if ok:
            labels.append("%s%d" % (kind, idx))
    return labels


def pattern_consistent(Vi, Vj, Vi2, Vj2, N: int, kind: str) -> bool:
    """True iff the pattern is one the case analysis allows: the coordinate signs agree.

    A2, A7, B2, B7 force V_j = -V_j; A4 and B4 force the sum (difference) into
    {0, N/2}; the remaining ten give V_i = +-V_i' and V_j = +-V_j' with one sign.
    """
    if (Vj + Vj) % N == 0:
        return False
    return (((Vi - Vi2) % N == 0 and (Vj - Vj2) % N == 0)
            or ((Vi + Vi2) % N == 0 and (Vj + Vj2) % N == 0))


# -- special fibers -------------------------------------------------------

@dataclass(frozen=True)
class FiberCandidates:
    target: str
    coordinates: tuple | None   # per-coordinate residue sets (target f only)
    classes: frozenset          # assembled IndexClass set


def _f_coordinate_sets(g: int, N: int) -> tuple:
    m = 2**g - 1
    inv = Fraction(1, N)
    upper = set()
    # (a) 0 <= v_k < 1/2:  v_k = 1/N or 2^{g-1}/(2^g-1) - 1/N
    for x in (inv, Fraction(2 ** (g - 1), m) - inv):
        if (x * N).denominator == 1 and 0 <= x < HALF:
            upper.add(x)
    # (b) 1/2 <= v_k < 1:  v_k = 1 - 1/N or (2^{g-1}-1)/(2^g-1) + 1/N; v_k = 1/2 would make
    # (v_k, v_{k+g}) = (1/2, 0) half-integral, which the signature formula excludes
    for x in (1 - inv, Fraction(2 ** (g - 1) - 1, m) + inv):
        if (x * N).denominator == 1 and HALF <= x < 1 and x != HALF:
            upper.add(x)
    lower_set = set()
    # (c) 0 <= v_k < 1/2:  0 or 2^{g-1}/(2^g-1) (> 1/2, dropped)
    for x in (Fraction(0), Fraction(2 ** (g - 1), m)):
        if (x * N).denominator == 1 and 0 <= x < HALF:
            lower_set.add(x)
    # (d) 1/2 <= v_k < 1:  1 or (2^{g-1}-1)/(2^g-1) (< 1/2): no solutions
    for x in (Fraction(1), Fraction(2 ** (g - 1) - 1, m)):
        if (x * N).denominator == 1 and HALF <= x < 1:
            lower_set.add(x)
    return tuple([frozenset(upper)] * g + [frozenset(lower_set)] * g)


def _assemble_f(coords, g: int, N: int) -> frozenset:
    out = set()
    inv = Fraction(1, N)
    for w in product(*[sorted(c) for c in coords]):
        u = w[:g]
        # the upper coordinates agree mod Z (a lower-unipotent action otherwise moves
        # v_i - v_j into a lower coordinate, whose only admissible value is 0)
        if any(x != u[0] for x in u):
            continue
        # N = 2^g - 1 > 3: (1/2 +- 1/(2N)) f is excluded by acting with [[I,O],[E'_1i + E'_1j, I]]^T
        if N == 2**g - 1 and N != 3 and u[0] not in (inv, 1 - inv):
            continue
        out.add(canonical(w))
    return frozenset(out)


def _transport_matrix(target: str, g: int) -> np.ndarray:
    """alpha in Sp_{2g}(Z) with alpha^T (target) = f."""
    I = np.eye(g, dtype=np.int64)
    O = np.zeros((g, g), dtype=np.int64)
    t = target.strip().lower().replace("_", "")
    if t == "e":
        return from_blocks(I, O, -I, I).T
    j = int(t[1:])
    col = j if j <= g else j - g
    A = I.copy()
    A[:, col - 1] = 1
    if j <= g:
        return gl_block(A).T
    Ainv_T = np.rint(np.linalg.inv(A)).astype(np.int64).T
    return from_blocks(O, A, -Ainv_T, O).T


def _integer_inverse(M) -> np.ndarray:
    Minv = np.rint(np.linalg.inv(np.asarray(M, dtype=float))).astype(np.int64)
    if not np.array_equal(np.asarray(M) @ Minv, np.eye(len(Minv), dtype=np.int64)):
        raise ValueError("matrix is not unimodular")
    return Minv


def special_fiber_candidates(target: str, g: int, N: int) -> FiberCandidates:
    """Indices v whose Theta_v^n can equal Theta_{target}^n, from the order calculus.

    For f the per-coordinate residue sets come from the four half-range cases and
    are then assembled.  For e and e_j the f-fiber is pulled back through a
    symplectic alpha with alpha^T (target) = f.
    """
    if g < 2 or N < 3:
        raise ValueError("special fibers need g >= 2 and N >= 3")
    t = target.strip().lower().replace("_", "")
    target_vector(t, g, N)  # validates the name
    coords = _f_coordinate_sets(g, N)
    f_classes = _assemble_f(coords, g, N)
    if t == "f":
        return FiberCandidates("f", coords, f_classes)
    alpha = _transport_matrix(t, g)
    # alpha^T v = w  <=>  v = (alpha^T)^{-1} w; act_on_index applies M^T, so pass M = alpha^{-1}
    pull = _integer_inverse(alpha)
    classes = frozenset(act_on_index(pull, c) for c in f_classes)
    return FiberCandidates(t, None, classes)


# -- collision partition ---------------------------------------------------

def _good_pivot(v) -> int | None:
    """0-based j < g with exact denominator of v_j >= 3 and != 4."""
    u, _ = split(v)
    for j, x in enumerate(u):
        d = frac_part(x).denominator
        if d >= 3 and d != 4:
            return j
    return None


def half_pair_transport(v):
    """(M, w) with w = M^T v free of half-integral pairs, or None.

    Rotates first when no upper coordinate has a usable denominator, then adds
    v_j to every half-integral pair (the elementary kind "half-pair").
    """
    v0 = as_vector(v)
    g = v0.genus
    pre = np.eye(2 * g, dtype=np.int64)
    x = v0
    j = _good_pivot(x)
    if j is None:
        pre = rotation(g)
        x = rotated(v0)
        j = _good_pivot(x)
        if j is None:
            return None
    u, l = split(x)
    ks = [k + 1 for k in range(g)
          if frac_part(u[k]) in (0, HALF) and frac_part(l[k]) in (0, HALF)]
    if not ks:
        return pre, canonical(x).rep
    # act(beta, act(pre, v)) = act(pre @ beta, v)
    M = pre @ elementary("half-pair", j=j + 1, g=g, ks=ks)
    w = act_on_index(M, v0).rep
    if has_half_integral_pair(w):
        return None
    return M, w


def separated_exactly(v, w) -> bool:
    """True when the order calculus alone proves Theta_v^n != Theta_w^n for every n != 0."""
    v, w = as_vector(v), as_vector(w)
    hv, hw = has_half_integral_pair(v), has_half_integral_pair(w)
    if not hv and not hw:
        return signature_pair(v) != signature_pair(w)
    if hv != hw:
        return True
    tr = half_pair_transport(v)
    if tr is None:
        return False
    M, tv = tr
    tw = act_on_index(M, canonical(w)).rep
    if has_half_integral_pair(tw):
        return True
    return signature_pair(tv) != signature_pair(tw)


@dataclass
class CollisionReport:
    g: int
    N: int
    classes: list
    buckets: list          # lists of class indices not separated exactly
    half_pair_classes: int

    @property
    def singletons(self) -> int:
        return sum(1 for b in self.buckets if len(b) == 1)

    @property
    def undecided_pairs(self) -> list:
        return [p for b in self.buckets for p in combinations(b, 2)]


def signature_collision_classes(g: int, N: int) -> CollisionReport:
    """Partition I_N / +- into groups that exact signatures cannot tell apart.

    Classes without a half-integral pair are keyed by (signature, rotated
    signature).  Classes with one are compared pairwise after the half-pair
    transport; any pair not separated lands in a shared bucket.
    """
    if g < 2:
        raise ValueError("the signature calculus needs g >= 2")
    classes = list(enumerate_I_N(g, N))
    plain = defaultdict(list)
    halfs = []
    for idx, c in enumerate(classes):
        if has_half_integral_pair(c.rep):
            halfs.append(idx)
        else:
            plain[signature_pair(c.rep)].append(idx)
    buckets = list(plain.values())

    parent = {i: i for i in halfs}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in combinations(halfs, 2):
        va, vb = classes[a].rep, classes[b].rep
        if not (separated_exactly(va, vb) or separated_exactly(vb, va)):
            parent[find(a)] = find(b)
    groups = defaultdict(list)
    for i in halfs:
        groups[find(i)].append(i)
    buckets.extend(groups.values())
    buckets.sort(key=lambda b: b[0])
    return CollisionReport(g, N, classes, buckets, len(halfs))


__all__ = [
    "CASES", "OrderSignature", "signature_entry", "order_signature", "rotated",
    "signature_pair", "case_candidates", "case_candidates_bruteforce",
    "primitivity_precondition", "precondition_failures", "case_pattern",
    "pattern_consistent", "FiberCandidates", "special_fiber_candidates",
    "half_pair_transport", "separated_exactly", "CollisionReport",
    "signature_collision_classes",
]
