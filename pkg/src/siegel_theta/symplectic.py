"""Symplectic and similitude groups: membership, actions, congruence tests,
the elementary matrices used by the primitivity argument, BFS enumeration of
GSp_{2g}(Z/NZ)/{+-1} and pointwise stabilizers.

J = [[O, -I], [I, O]] throughout, and alpha is in GSp iff alpha^T J alpha = nu J.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from fractions import Fraction

import numpy as np

from .characteristics import IndexClass, as_vector, canonical
from .points import SiegelPoint

COND_LIMIT = 1e12
DEFAULT_MAX_SIZE = 10**7
CACHE_MAGIC = "SIEGEL-GROUPTABLE"
CACHE_VERSION = 1


class DimensionError(ValueError):
    pass


class ConditioningError(ArithmeticError):
    def __init__(self, msg, cond, residual):
        super().__init__(msg)
        self.cond = cond
        self.residual = residual


class GroupOverflowError(RuntimeError):
    pass


def J(g: int) -> np.ndarray:
    I = np.eye(g, dtype=np.int64)
    O = np.zeros((g, g), dtype=np.int64)
    return np.block([[O, -I], [I, O]])


def blocks(M):
    M = np.asarray(M)
    g = M.shape[0] // 2
    return M[:g, :g], M[:g, g:], M[g:, :g], M[g:, g:]


def from_blocks(A, B, C, D) -> np.ndarray:
    return np.block([[A, B], [C, D]])


def _check_shape(M):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError("matrix must be square, got shape %s" % (M.shape,))
    if M.shape[0] % 2:
        raise DimensionError("matrix size %d is odd" % M.shape[0])
    return M


def is_gsp(M, N: int | None = None):
    """nu with M^T J M = nu J, or None when M is not a similitude.

    With ``N`` the test is mod N and nu must be a unit mod N.  Without it,
    integer matrices need nu = +-1 and real matrices any nu != 0.
    """
    M = _check_shape(M)
    g = M.shape[0] // 2
    if N is not None:
        M = np.asarray(M, dtype=np.int64) % N
        K = (M.T @ J(g) @ M) % N
        nu = int(K[g, 0])
        if math.gcd(nu, N) != 1 or not np.array_equal(K, (nu * J(g)) % N):
            return None
        return nu
    if np.issubdtype(M.dtype, np.integer):
        K = M.T @ J(g) @ M
        nu = int(K[g, 0])
        if nu not in (1, -1) or not np.array_equal(K, nu * J(g)):
            return None
        return nu
    M = np.asarray(M, dtype=float)
    K = M.T @ J(g) @ M
    nu = float(K[g, 0])
    if nu == 0 or not np.allclose(K, nu * J(g), atol=1e-10 * max(1.0, abs(nu))):
        return None
    return nu


def is_symplectic_blocks(M, N: int | None = None) -> bool:
    """The block form of nu = 1: A^TD - C^TB = I, A^TC sym, B^TD sym."""
    A, B, C, D = (np.asarray(X, dtype=np.int64) for X in blocks(M))
    g = A.shape[0]
    red = (lambda X: X % N) if N else (lambda X: X)
    I = np.eye(g, dtype=np.int64)
    return (np.array_equal(red(A.T @ D - C.T @ B), red(I))
            and np.array_equal(red(A.T @ C), red(C.T @ A))
            and np.array_equal(red(B.T @ D), red(D.T @ B)))


class SymplecticMatrix:
    """An integral (``level=None``) or mod-N 2g x 2g similitude with its nu."""

    __slots__ = ("m", "level", "nu")

    def __init__(self, m, level: int | None = None):
        m = np.array(m, dtype=np.int64)
        if level is not None:
            m = m % level
        nu = is_gsp(m, level)
        if nu is None:
            raise ValueError("matrix is not in GSp%s" % ("" if level is None else " mod %d" % level))
        self.m = m
        self.level = level
        self.nu = nu

    @property
    def genus(self) -> int:
        return self.m.shape[0] // 2

    def reduce(self, N: int) -> "SymplecticMatrix":
        return SymplecticMatrix(self.m, N)

    def __matmul__(self, other):
        level = self.level or other.level
        return SymplecticMatrix(self.m @ other.m, level)

    def transpose(self):
        return SymplecticMatrix(self.m.T, self.level)

    def inverse(self):
        """alpha^{-1} = -nu^{-1} J alpha^T J."""
        g = self.genus
        core = -(J(g) @ self.m.T @ J(g))
        if self.level is None:
            return SymplecticMatrix(core * self.nu, None)
        return SymplecticMatrix(core * pow(self.nu, -1, self.level), self.level)

    def __eq__(self, other):
        return (isinstance(other, SymplecticMatrix) and self.level == other.level
                and np.array_equal(self.m, other.m))

    def __hash__(self):
        return hash((self.level, self.m.tobytes()))

    def __repr__(self):
        tag = "" if self.level is None else " mod %d" % self.level
        return "SymplecticMatrix(%s%s)" % (self.m.tolist(), tag)


def _matrix(alpha) -> np.ndarray:
    return alpha.m if isinstance(alpha, SymplecticMatrix) else np.asarray(alpha)


def act_on_H(alpha, Z: SiegelPoint) -> SiegelPoint:
    """alpha(Z) = (AZ + B)(CZ + D)^{-1} for real alpha with nu > 0."""
    M = np.asarray(_matrix(alpha), dtype=float)
    nu = is_gsp(M)
    if nu is None or nu <= 0:
        raise ValueError("act_on_H needs a real similitude with nu > 0")
    A, B, C, D = blocks(M)
    P = A @ Z.Z + B
    Q = C @ Z.Z + D
    cond = np.linalg.cond(Q)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ConditioningError("CZ + D is numerically singular (cond %.3g)" % cond, cond, np.nan)
    # W Q = P  <=>  Q^T W^T = P^T, solved with partial pivoting
    W = np.linalg.solve(Q.T, P.T).T
    residual = float(np.abs(W @ Q - P).max() / max(1.0, np.abs(P).max()))
    if residual > 1e-8:
        raise ConditioningError("solve residual %.3g too large" % residual, cond, residual)
    return SiegelPoint(W, atol=1e-9)


def _level_of(v) -> int:
    return v.level if isinstance(v, IndexClass) else as_vector(v).level


def act_on_index(alpha, v) -> IndexClass:
    """canonical(alpha^T v)."""
    M = np.asarray(_matrix(alpha), dtype=np.int64)
    N = _level_of(v)
    if isinstance(alpha, SymplecticMatrix) and alpha.level is not None and alpha.level != N:
        raise ValueError("level mismatch: matrix mod %d, index of level %d" % (alpha.level, N))
    w = as_vector(v).entries
    d = len(w)
    if M.shape != (d, d):
        raise DimensionError("matrix size %s does not match index length %d" % (M.shape, d))
    out = [sum((int(M[j, i]) * w[j] for j in range(d)), Fraction(0)) for i in range(d)]
    return canonical(out)


def act_on_residues(M, r, N: int) -> tuple:
    """alpha^T r mod N for an integer residue vector r."""
    M = np.asarray(M, dtype=np.int64)
    return tuple(int(x) for x in (M.T @ np.asarray(r, dtype=np.int64)) % N)


def congruence_tests(alpha, N: int) -> dict:
    """Membership of an integral symplectic alpha in Gamma(N), Gamma^1(N), Gamma_1(N).

    Gamma^1(N): alpha = [[I, *], [O, I]] mod N.  Gamma_1(N): alpha = [[I, O], [*, I]] mod N.
    """
    M = np.asarray(_matrix(alpha), dtype=np.int64) % N
    A, B, C, D = blocks(M)
    g = A.shape[0]
    I = np.eye(g, dtype=np.int64) % N
    diag_ok = np.array_equal(A, I) and np.array_equal(D, I)
    zB = not B.any()
    zC = not C.any()
    return {
        "in_Gamma": bool(diag_ok and zB and zC),
        "in_Gamma_upper": bool(diag_ok and zC),
        "in_Gamma_lower": bool(diag_ok and zB),
    }


# -- elementary matrices ---------------------------------------------------

def E(g: int, r: int, s: int) -> np.ndarray:
    """E_{rs}: 1 at (r, s), 1-based."""
    M = np.zeros((g, g), dtype=np.int64)
    M[r - 1, s - 1] = 1
    return M


def E_sym(g: int, r: int, s: int) -> np.ndarray:
    """E'_{rs} = E_{rs} + E_{sr} for r != s, E_{rr} on the diagonal."""
    return E(g, r, s) if r == s else E(g, r, s) + E(g, s, r)


def rotation(g: int) -> np.ndarray:
    """[[O, I], [-I, O]]^T, sending index (v_u; v_l) to (v_l; -v_u) and Z to -Z^{-1}."""
    I = np.eye(g, dtype=np.int64)
    O = np.zeros((g, g), dtype=np.int64)
    return from_blocks(O, I, -I, O).T


def translation(S) -> np.ndarray:
    """[[I, S], [O, I]] for S symmetric: Z -> Z + S."""
    S = np.asarray(S, dtype=np.int64)
    g = S.shape[0]
    I = np.eye(g, dtype=np.int64)
    return from_blocks(I, S, np.zeros_like(S), I)


def lower(S) -> np.ndarray:
    """[[I, O], [S, I]] for S symmetric."""
    S = np.asarray(S, dtype=np.int64)
    g = S.shape[0]
    I = np.eye(g, dtype=np.int64)
    return from_blocks(I, np.zeros_like(S), S, I)


def gl_block(A) -> np.ndarray:
    """[[A, O], [O, (A^T)^{-1}]] for A in GL_g(Z)."""
    A = np.asarray(A, dtype=np.int64)
    Ainv = np.rint(np.linalg.inv(A)).astype(np.int64)
    if not np.array_equal(A @ Ainv, np.eye(A.shape[0], dtype=np.int64)):
        raise ValueError("A is not unimodular")
    return from_blocks(A, np.zeros_like(A), np.zeros_like(A), Ainv.T)


def similitude_diag(g: int, nu: int) -> np.ndarray:
    """[[I, O], [O, nu I]], the G_N representative."""
    I = np.eye(g, dtype=np.int64)
    return from_blocks(I, 0 * I, 0 * I, nu * I)


ELEMENTARY_KINDS = ("C1", "C2", "C3", "C4", "rotation", "half-pair", "upper", "lower")


def elementary(kind: str, i: int = 0, j: int = 0, sign: int = 1, g: int = 2, ks=()) -> np.ndarray:
    """The integral symplectic matrices that move indices in the primitivity argument.

    C1: [[I+E_ij, O], [O, I-E_ji]]^T      (1 <= i != j <= g)
    C2: [[I-E_ij, O], [O, I+E_ji]]^T      (1 <= i != j <= g)
    C3: [[I, O], [E'_{i-g,j}, I]]^T       (g+1 <= i <= 2g, 1 <= j <= g)
    C4: [[I, O], [-E'_{i-g,j}, I]]^T
    rotation: [[O, I], [-I, O]]^T
    half-pair: [[I + sum_k E_kj, O], [O, I - sum_k E_jk]]^T over k in ``ks``
    upper / lower: [[I, sign E'_ij], [O, I]] and [[I, O], [sign E'_ij, I]]
    """
    I = np.eye(g, dtype=np.int64)
    if kind in ("C1", "C2"):
        if not (1 <= i <= g and 1 <= j <= g) or i == j:
            raise ValueError("%s needs 1 <= i != j <= g, got i=%d j=%d" % (kind, i, j))
        s = 1 if kind == "C1" else -1
        return gl_block(I + s * E(g, i, j)).T
    if kind in ("C3", "C4"):
        if not (g + 1 <= i <= 2 * g and 1 <= j <= g):
            raise ValueError("%s needs g+1 <= i <= 2g and 1 <= j <= g" % kind)
        s = 1 if kind == "C3" else -1
        return lower(s * E_sym(g, i - g, j)).T
    if kind == "rotation":
        return rotation(g)
    if kind == "half-pair":
        ks = list(ks)
        if not ks or not 1 <= j <= g or any(not 1 <= k <= g or k == j for k in ks):
            raise ValueError("half-pair needs indices ks != j in 1..g")
        A = I + sum(E(g, k, j) for k in ks)
        return gl_block(A).T
    if kind == "upper":
        if not (1 <= i <= g and 1 <= j <= g):
            raise ValueError("upper needs 1 <= i, j <= g")
        return translation(sign * E_sym(g, i, j))
    if kind == "lower":
        if not (1 <= i <= g and 1 <= j <= g):
            raise ValueError("lower needs 1 <= i, j <= g")
        return lower(sign * E_sym(g, i, j))
    raise ValueError("unknown kind %r; expected one of %s" % (kind, ", ".join(ELEMENTARY_KINDS)))


def standard_generators(g: int) -> list:
    """The rotation and every [[I, E'_rs], [O, I]]; these generate Sp_{2g}(Z)."""
    gens = [rotation(g)]
    for r in range(1, g + 1):
        for s in range(r, g + 1):
            gens.append(translation(E_sym(g, r, s)))
    return gens


def sp_order(g: int, N: int) -> int:
    """|Sp_{2g}(Z/NZ)| from the classical order formula over F_p and lifting to p^k."""
    total = 1
    n, p = N, 2
    while n > 1:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            base = p ** (g * g)
            for i in range(1, g + 1):
                base *= p ** (2 * i) - 1
            total *= base * p ** ((k - 1) * g * (2 * g + 1))
        p += 1
    return total


def _units(N: int) -> list:
    return [x for x in range(1, N) if math.gcd(x, N) == 1] if N > 1 else [0]


# -- finite group tables ---------------------------------------------------

def _canon_pm(flat: np.ndarray, N: int) -> np.ndarray:
    """Row-wise: the lexicographically smaller of M and -M mod N."""
    neg = (-flat) % N
    diff = flat != neg
    first = diff.argmax(axis=1)
    rows = np.arange(flat.shape[0])
    take_neg = diff.any(axis=1) & (neg[rows, first] < flat[rows, first])
    out = flat.copy()
    out[take_neg] = neg[take_neg]
    return out


def canonical_pm(M, N: int) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64) % N
    d = M.shape[0]
    return _canon_pm(M.reshape(1, -1), N).reshape(d, d)


def _generator_hash(generators, N: int, gsp: bool) -> str:
    h = hashlib.sha256()
    h.update(("%d|%d|" % (N, int(gsp))).encode())
    for G in generators:
        h.update((np.asarray(G, dtype=np.int64) % N).tobytes())
    return h.hexdigest()[:16]


class GroupTable:
    """Elements of GSp (or Sp) mod N up to sign, with their similitude factors."""

    def __init__(self, genus, level, elements, nus, provenance):
        self.genus = genus
        self.level = level
        self.elements = elements
        self.nus = nus
        self.provenance = provenance
        d = 2 * genus
        self._index = {elements[k].reshape(d * d).tobytes(): k for k in range(len(elements))}

    def __len__(self):
        return len(self.elements)

    def __contains__(self, M):
        M = canonical_pm(M, self.level).astype(self.elements.dtype)
        return M.tobytes() in self._index

    def index_of(self, M) -> int:
        M = canonical_pm(M, self.level).astype(self.elements.dtype)
        return self._index[M.tobytes()]

    def matrix(self, k: int) -> np.ndarray:
        return self.elements[k].astype(np.int64)

    def inverse(self, k: int) -> np.ndarray:
        g, N = self.genus, self.level
        core = -(J(g) @ self.matrix(k).T @ J(g))
        return (core * pow(int(self.nus[k]), -1, N)) % N

    # cache file: one JSON header line, then uint8 entries row-major, then uint8 nus
    def save(self, path):
        d = 2 * self.genus
        header = {
            "magic": CACHE_MAGIC, "version": CACHE_VERSION, "g": self.genus, "N": self.level,
            "generator_hash": self.provenance["generator_hash"], "count": len(self),
            "provenance": self.provenance,
        }
        folder = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=folder, prefix=".gt-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
                fh.write(self.elements.reshape(-1, d * d).astype(np.uint8).tobytes())
                fh.write(self.nus.astype(np.uint8).tobytes())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path, g=None, N=None, generator_hash=None) -> "GroupTable":
        with open(path, "rb") as fh:
            header = json.loads(fh.readline().decode())
            if header.get("magic") != CACHE_MAGIC or header.get("version") != CACHE_VERSION:
                raise ValueError("%s is not a version-%d group table" % (path, CACHE_VERSION))
            for key, want in (("g", g), ("N", N), ("generator_hash", generator_hash)):
                if want is not None and header[key] != want:
                    raise ValueError("cached table has %s=%r, wanted %r" % (key, header[key], want))
            d = 2 * header["g"]
            n = header["count"]
            raw = np.frombuffer(fh.read(n * d * d), dtype=np.uint8)
            nus = np.frombuffer(fh.read(n), dtype=np.uint8)
        if raw.size != n * d * d or nus.size != n:
            raise ValueError("truncated group table %s" % path)
        return cls(header["g"], header["N"], raw.reshape(n, d, d).copy(), nus.copy(),
                   header["provenance"])


def bfs_group(g: int, N: int, generators=None, gsp: bool = True,
              max_size: int = DEFAULT_MAX_SIZE) -> GroupTable:
    """Close ``generators`` (default: ``standard_generators``) under right
    multiplication mod N, identifying M with -M.  With ``gsp`` the result is
    extended by the cosets [[I,O],[O,nu I]] . Sp over nu in (Z/NZ)^x.

    Raises GroupOverflowError rather than truncating when the closure passes
    ``max_size`` elements.
    """
    if N < 2:
        raise ValueError("level must be >= 2")
    if N > 255:
        raise ValueError("levels above 255 are outside the uint8 table format")
    if generators is None:
        generators = standard_generators(g)
    gens = [np.asarray(G, dtype=np.int64) % N for G in generators]
    for G in gens:
        if is_gsp(G, N) is None:
            raise ValueError("generator is not in GSp mod %d:\n%s" % (N, G))
    d = 2 * g
    budget_hint = sp_order(g, N) // (1 if N == 2 else 2)
    if gsp:
        budget_hint *= len(_units(N))

    identity = np.eye(d, dtype=np.int64).reshape(1, d * d)
    seen = {_canon_pm(identity, N).astype(np.uint8).tobytes()}
    found = [_canon_pm(identity, N)]
    frontier = identity.reshape(1, d, d)
    while len(frontier):
        new = []
        for G in gens:
            P = (frontier @ G) % N
            flat = _canon_pm(P.reshape(-1, d * d), N)
            for row in flat:
                key = row.astype(np.uint8).tobytes()
                if key not in seen:
                    seen.add(key)
                    new.append(row)
                    if len(seen) > max_size:
                        raise GroupOverflowError(
                            "group closure exceeded %d elements (expected about %d)"
                            % (max_size, budget_hint))
        if not new:
            break
        block = np.array(new)
        found.append(block)
        frontier = block.reshape(-1, d, d)
    sp = np.concatenate(found).reshape(-1, d, d)
    nus = np.ones(len(sp), dtype=np.int64)

    if gsp:
        parts, nu_parts = [sp], [nus]
        for nu in _units(N):
            if nu == 1:
                continue
            P = (similitude_diag(g, nu) @ sp) % N
            parts.append(_canon_pm(P.reshape(-1, d * d), N).reshape(-1, d, d))
            nu_parts.append(np.full(len(sp), nu, dtype=np.int64))
        total = sum(len(p) for p in parts)
        if total > max_size:
            raise GroupOverflowError("GSp table would hold %d > %d elements" % (total, max_size))
        sp = np.concatenate(parts)
        nus = np.concatenate(nu_parts)

    provenance = {
        "generators": [np.asarray(G).tolist() for G in gens],
        "gsp": gsp,
        "generator_hash": _generator_hash(gens, N, gsp),
    }
    return GroupTable(g, N, sp.astype(np.uint8), nus.astype(np.uint8), provenance)


def load_or_build(g: int, N: int, cache_path=None, gsp: bool = True,
                  max_size: int = DEFAULT_MAX_SIZE) -> GroupTable:
    gens = [np.asarray(G, dtype=np.int64) % N for G in standard_generators(g)]
    want = _generator_hash(gens, N, gsp)
    if cache_path and os.path.exists(cache_path):
        try:
            return GroupTable.load(cache_path, g, N, want)
        except ValueError:
            pass
    table = bfs_group(g, N, gens, gsp=gsp, max_size=max_size)
    if cache_path:
        table.save(cache_path)
    return table


def stabilizer(table: GroupTable, W) -> np.ndarray:
    """Indices k of table elements with act_on_index(alpha_k, w) = w for all w in W."""
    N = table.level
    mask = np.ones(len(table), dtype=bool)
    for w in W:
        if _level_of(w) != N:
            raise ValueError("index %s does not have level %d" % (w, N))
        r = np.array(as_vector(w).scaled(N), dtype=np.int64) % N
        # (alpha^T r)_i = sum_j alpha_{ji} r_j
        img = np.einsum("kji,j->ki", table.elements.astype(np.int64), r) % N
        mask &= (img == r).all(axis=1) | (img == (-r) % N).all(axis=1)
    return np.nonzero(mask)[0]
