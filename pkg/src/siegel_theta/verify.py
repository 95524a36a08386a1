"""Verification suites and experiments behind the command-line tool.

Every command returns a ``Report``: a list of check records, each naming the
statement it exercises, a status, and either a max residual or an exact
witness.  Function equality is tested by sampling at shared seeded points of
H_g; a pair of indices that differs at some point is "numerically separated".
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import wraps
from itertools import product

import numpy as np

from .characteristics import (
    FracVector,
    basis_vector,
    canonical,
    enumerate_half_chars,
    enumerate_I_N,
    f_vector,
    count_I_N,
    split,
    target_vector,
)
from .genus1 import diag_restrict_check, genus1_identity_residual, numeric_order, ord_q
from .orders import (
    precondition_failures,
    signature_collision_classes,
    special_fiber_candidates,
)
from .points import SiegelPoint, random_tau
from .symplectic import (
    DEFAULT_MAX_SIZE,
    act_on_H,
    act_on_index,
    blocks,
    congruence_tests,
    elementary,
    from_blocks,
    gl_block,
    is_gsp,
    load_or_build,
    lower,
    rotation,
    sp_order,
    stabilizer,
    translation,
    E,
    E_sym,
)
from .theta import (
    DEFAULT_EPS,
    RADIUS_CAP,
    big_theta_log,
    check_sp_action,
    is_vanishing_char,
    log_relative_residual,
    theta,
)

PASS, FAIL, NOT_MET, OBSERVATION = "pass", "fail", "hypothesis-not-met", "observation"

VANISH_TOL = 1e-10
IDENTITY_TOL = 1e-6
DIAG_TOL = 1e-8
TRANSLATION_TOL = 1e-8
ORDER_TOL = 1e-6
CONTROL_MIN = 1e-2
# relative gap in |Theta| below which two indices count as agreeing at a point
AGREE_TOL = 1e-6
# Theta evaluations one command may spend
MAX_EVALUATIONS = 200_000

REF_VANISHING = "parity criterion: theta_a vanishes identically iff a is odd; |S_-| = 2^(g-1)(2^g-1)"
REF_DIAG = "diagonal restriction of theta_v as a product of Siegel functions"
REF_GENUS1 = "genus one: Theta_v(tau) = g_v(tau)^(12N)"
REF_ACTION = "Sp-equivariance: Theta_v(alpha Z) = Theta_(alpha^T v)(Z)"
REF_GAMMA_N = "Gamma(N)-invariance of every Theta_v of level N"
REF_PM = "Theta_v depends only on +-v mod Z^(2g)"
REF_ORDERS = "ord_q g_v = B_2(<r>)/2"
REF_PRIMITIVE = "primitivity: Theta_v^n = Theta_w^n for some n != 0 forces v = +-w"
REF_FIBERS = "special fibers of the generators (1/N)e_j, (1/N)e, (1/N)f"
REF_STAB_FULL = "level-N field generated by Theta over e_1..e_2g, e: stabilizer is trivial"
REF_STAB_G1 = "Gamma_1-type index set: stabilizer is +-[[I,O],[C,nu I]]"
REF_GROUP = "|Sp_2g(Z/N)| from the classical order formula"
REF_RESCALE = "Gamma^1(N) = delta Gamma_1(N) delta^-1, transported to Theta_v(NZ)"
REF_DEGENERATE = "Theta_v is identically zero when N = 2"


class BudgetError(RuntimeError):
    """A command would exceed its desk-scale budget."""


@dataclass
class RunConfig:
    genus: int = 2
    level: int = 3
    epsilon: float = DEFAULT_EPS
    samples: int = 8
    seed: int = 0
    radius_cap: float = RADIUS_CAP
    cache_path: str | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.genus < 1:
            raise ValueError("genus must be >= 1")

    @staticmethod
    def default_epsilon() -> float:
        env = os.environ.get("SIEGEL_EPS")
        return float(env) if env else DEFAULT_EPS

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    def parameters(self) -> dict:
        return {
            "genus": self.genus, "level": self.level, "seed": self.seed,
            "epsilon": self.epsilon, "samples": self.samples, "radius_cap": self.radius_cap,
        }


@dataclass
class Report:
    command: str
    parameters: dict
    checks: list = field(default_factory=list)
    observations: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def add(self, name: str, paper_ref: str, status: str, **data) -> dict:
        rec = {"name": name, "paper_ref": paper_ref, "status": status}
        rec.update({k: _jsonable(v) for k, v in data.items()})
        self.checks.append(rec)
        return rec

    @property
    def status(self) -> str:
        states = {c["status"] for c in self.checks}
        if FAIL in states:
            return FAIL
        if NOT_MET in states:
            return NOT_MET
        return PASS

    @property
    def exit_code(self) -> int:
        return {PASS: 0, FAIL: 1, NOT_MET: 2}[self.status]

    def check(self, name: str) -> dict:
        for c in self.checks:
            if c["name"] == name:
                return c
        raise KeyError(name)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "command": self.command,
            "parameters": self.parameters,
            "status": self.status,
            "checks": self.checks,
            "observations": _jsonable(self.observations),
        }
        if timing:
            out["timing"] = self.timing
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=str) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, SiegelPoint):
        return matrix_to_json(x.Z)
    if isinstance(x, (Fraction, FracVector)) or hasattr(x, "rep"):
        return str(x)
    if isinstance(x, complex):
        return complex_to_text(x)
    return x


def complex_to_text(z: complex) -> str:
    z = complex(z)
    return "%s%si" % (repr(z.real), repr(z.imag) if z.imag < 0 or math.copysign(1, z.imag) < 0 else "+" + repr(z.imag))


def matrix_to_json(M) -> list:
    return [[complex_to_text(x) for x in row] for row in np.asarray(M, dtype=complex)]


def _timed(fn):
    @wraps(fn)
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.timing = {"seconds": round(time.perf_counter() - t0, 3)}
        return rep
    return run


def _points(cfg: RunConfig, g: int, salt: int) -> list:
    rng = cfg.rng(salt)
    return [SiegelPoint.random(g, rng) for _ in range(cfg.samples)]


def random_index(g: int, N: int, rng: np.random.Generator):
    while True:
        r = rng.integers(0, N, size=2 * g)
        if math.gcd(N, *map(int, r)) == 1:
            return canonical([Fraction(int(x), N) for x in r])


def _budget(needed: int, what: str):
    if needed > MAX_EVALUATIONS:
        raise BudgetError("%s needs about %d Theta evaluations; the budget is %d"
                          % (what, needed, MAX_EVALUATIONS))


# -- verification suites ------------------------------------------------------

def suite_vanishing(cfg: RunConfig, report: Report):
    g = cfg.genus
    if g > 3:
        raise BudgetError("vanishing census is sized for g <= 3 (4^g characteristics)")
    pts = _points(cfg, g, 1)
    minus, plus = enumerate_half_chars(g)
    mismatches, vanish = [], 0
    max_small, min_large = 0.0, math.inf
    for a in sorted(minus + plus, key=lambda c: c.entries):
        mags = [abs(theta(a.vector, Z, cfg.epsilon, cfg.radius_cap, use_criterion=False).value)
                for Z in pts]
        numeric = max(mags) < VANISH_TOL
        vanish += numeric
        if numeric:
            max_small = max(max_small, max(mags))
        else:
            min_large = min(min_large, max(mags))
        if numeric != is_vanishing_char(a.vector):
            mismatches.append({"v": a.vector, "magnitudes": mags,
                               "Z": pts[int(np.argmax(mags))]})
    report.add("vanishing verdicts match parity", REF_VANISHING, FAIL if mismatches else PASS,
               characteristics=4**g, tolerance=VANISH_TOL, max_vanishing_magnitude=max_small,
               min_nonvanishing_magnitude=min_large, witness=mismatches or None)
    expected = 2 ** (g - 1) * (2**g - 1)
    report.add("vanishing count", REF_VANISHING, PASS if vanish == expected else FAIL,
               exact={"vanishing": vanish, "expected": expected})


def suite_diag(cfg: RunConfig, report: Report, levels=None, count=None):
    g = cfg.genus
    levels = tuple(levels or (cfg.level,))
    count = count or cfg.samples
    rng = cfg.rng(2)
    cases = []
    for k in range(count):
        N = levels[k % len(levels)]
        cases.append(random_index(g, N, rng).rep)
    # the zero branch: every half-integral v with a (1/2, 1/2) pair ...
    for bits in product((0, 1), repeat=2 * g):
        v = FracVector(Fraction(b, 2) for b in bits)
        u, l = split(v)
        if any(x == Fraction(1, 2) and y == Fraction(1, 2) for x, y in zip(u, l)):
            cases.append(v)
    # ... and mixed ones, with one such pair and the rest of level N
    for N in levels:
        for k in range(g):
            w = list(random_index(g, N, rng).rep.entries)
            w[k], w[k + g] = Fraction(1, 2), Fraction(1, 2)
            cases.append(FracVector(w))
    worst = {"product": (0.0, None), "zero": (0.0, None)}
    counts = {"product": 0, "zero": 0}
    for v in cases:
        taus = [random_tau(rng) for _ in range(g)]
        r = diag_restrict_check(v, taus, cfg.epsilon)
        counts[r["branch"]] += 1
        if r["residual"] >= worst[r["branch"]][0]:
            worst[r["branch"]] = (r["residual"], {"v": v, "taus": taus})
    for branch, tol in (("product", DIAG_TOL), ("zero", VANISH_TOL)):
        res, wit = worst[branch]
        ok = res < tol
        report.add("diagonal restriction, %s branch" % branch, REF_DIAG, PASS if ok else FAIL,
                   cases=counts[branch], max_residual=res, tolerance=tol,
                   witness=None if ok else wit)


def suite_genus1(cfg: RunConfig, report: Report, level=None):
    N = level or cfg.level
    if N < 3:
        raise ValueError("genus-one collapse is stated for N >= 3")
    rng = cfg.rng(3)
    taus = [random_tau(rng) for _ in range(cfg.samples)]
    classes = enumerate_I_N(1, N)
    worst, wit = 0.0, None
    for c in classes:
        for tau in taus:
            r = genus1_identity_residual(c.rep, tau, N, cfg.epsilon)
            if r >= worst:
                worst, wit = r, {"v": c.rep, "tau": tau}
    ok = worst < IDENTITY_TOL
    report.add("genus-one collapse N=%d" % N, REF_GENUS1, PASS if ok else FAIL,
               classes=len(classes), points=len(taus), max_residual=worst,
               tolerance=IDENTITY_TOL, witness=None if ok else wit)


def _random_letter(g: int, rng: np.random.Generator) -> np.ndarray:
    kinds = ["rotation", "upper", "lower", "C3", "C4"] + (["C1", "C2"] if g >= 2 else [])
    kind = kinds[rng.integers(len(kinds))]
    if kind in ("C1", "C2"):
        i, j = rng.choice(np.arange(1, g + 1), size=2, replace=False)
        return elementary(kind, int(i), int(j), g=g)
    if kind in ("C3", "C4"):
        return elementary(kind, int(rng.integers(g + 1, 2 * g + 1)), int(rng.integers(1, g + 1)), g=g)
    if kind in ("upper", "lower"):
        i, j = rng.integers(1, g + 1, size=2)
        return elementary(kind, int(i), int(j), sign=int(rng.choice([-1, 1])), g=g)
    return elementary(kind, g=g)


def random_word(g: int, rng: np.random.Generator, max_len: int = 4) -> np.ndarray:
    M = np.eye(2 * g, dtype=np.int64)
    for _ in range(int(rng.integers(1, max_len + 1))):
        M = M @ _random_letter(g, rng)
    return M


def _int_inverse(M) -> np.ndarray:
    # alpha^-1 = -J alpha^T J for nu = 1
    g = M.shape[0] // 2
    I = np.eye(g, dtype=np.int64)
    O = np.zeros((g, g), dtype=np.int64)
    Jm = from_blocks(O, -I, I, O)
    return -Jm @ M.T @ Jm


def random_gamma_N(g: int, N: int, rng: np.random.Generator) -> np.ndarray:
    """A conjugate W T W^-1 of an N-scaled unipotent T; lies in Gamma(N)."""
    W = random_word(g, rng, max_len=2)
    i, j = rng.integers(1, g + 1, size=2)
    S = N * E_sym(g, int(i), int(j))
    T = translation(S) if rng.integers(2) else lower(S)
    return W @ T @ _int_inverse(W)


def suite_action(cfg: RunConfig, report: Report, words: int = 20, gammas: int = 10):
    g, N = cfg.genus, cfg.level
    _budget((words + 2 * gammas) * 2, "action suite")
    rng = cfg.rng(4)
    worst, wit = 0.0, None
    for _ in range(words):
        M = random_word(g, rng)
        v = random_index(g, N, rng)
        Z = SiegelPoint.random(g, rng)
        r = check_sp_action(M, v, Z, cfg.epsilon, cfg.radius_cap)
        if r >= worst:
            worst, wit = r, {"alpha": M, "v": v, "Z": Z}
    ok = worst < IDENTITY_TOL
    report.add("Sp-action on random words", REF_ACTION, PASS if ok else FAIL,
               words=words, max_residual=worst, tolerance=IDENTITY_TOL, witness=None if ok else wit)

    worst, wit, index_moves = 0.0, None, []
    for _ in range(gammas):
        G = random_gamma_N(g, N, rng)
        if not congruence_tests(G, N)["in_Gamma"]:
            raise AssertionError("constructed element is not in Gamma(%d)" % N)
        v = random_index(g, N, rng)
        if act_on_index(G, v) != v:
            index_moves.append({"alpha": G, "v": v})
        Z = SiegelPoint.random(g, rng)
        r = log_relative_residual(big_theta_log(v, act_on_H(G, Z), cfg.epsilon, cfg.radius_cap),
                                  big_theta_log(v, Z, cfg.epsilon, cfg.radius_cap))
        if r >= worst:
            worst, wit = r, {"alpha": G, "v": v, "Z": Z}
    ok = worst < IDENTITY_TOL and not index_moves
    report.add("Gamma(N)-invariance", REF_GAMMA_N, PASS if ok else FAIL,
               elements=gammas, max_residual=worst, tolerance=IDENTITY_TOL,
               witness=None if ok else {"worst": wit, "index_moves": index_moves})


def suite_invariance(cfg: RunConfig, report: Report, count=None):
    g, N = cfg.genus, cfg.level
    count = count or cfg.samples
    rng = cfg.rng(5)
    worst_pm = worst_tr = 0.0
    wit_pm = wit_tr = None
    for _ in range(count):
        v = random_index(g, N, rng).rep
        Z = SiegelPoint.random(g, rng)
        base = big_theta_log(v, Z, cfg.epsilon, cfg.radius_cap)
        r = log_relative_residual(big_theta_log(-v, Z, cfg.epsilon, cfg.radius_cap), base)
        if r >= worst_pm:
            worst_pm, wit_pm = r, {"v": v, "Z": Z}
        shift = FracVector(int(x) for x in rng.integers(-2, 3, size=2 * g))
        r = log_relative_residual(big_theta_log(v + shift, Z, cfg.epsilon, cfg.radius_cap), base)
        if r >= worst_tr:
            worst_tr, wit_tr = r, {"v": v, "shift": shift, "Z": Z}
    ok = worst_pm < TRANSLATION_TOL
    report.add("Theta_v = Theta_-v", REF_PM, PASS if ok else FAIL, cases=count,
               max_residual=worst_pm, tolerance=TRANSLATION_TOL, witness=None if ok else wit_pm)
    ok = worst_tr < TRANSLATION_TOL
    report.add("Theta_v = Theta_(v+n), n integral", REF_PM, PASS if ok else FAIL, cases=count,
               max_residual=worst_tr, tolerance=TRANSLATION_TOL, witness=None if ok else wit_tr)


def suite_orders(cfg: RunConfig, report: Report, max_denominator=None):
    D = max_denominator or cfg.level
    worst, wit, n = 0.0, None, 0
    seen = set()
    for d in range(2, D + 1):
        for a, b in product(range(d), repeat=2):
            v = (Fraction(a, d), Fraction(b, d))
            if v in seen or (v[0].denominator == 1 and v[1].denominator == 1):
                continue
            seen.add(v)
            n += 1
            err = abs(numeric_order(v) - float(ord_q(v)))
            if err >= worst:
                worst, wit = err, {"v": FracVector(v), "exact": ord_q(v)}
    ok = worst < ORDER_TOL
    report.add("q-order of g_v, denominators <= %d" % D, REF_ORDERS, PASS if ok else FAIL,
               cases=n, max_residual=worst, tolerance=ORDER_TOL, witness=None if ok else wit)


SUITES = {
    "vanishing": suite_vanishing,
    "diag": suite_diag,
    "genus1": suite_genus1,
    "action": suite_action,
    "invariance": suite_invariance,
    "orders": suite_orders,
}


@_timed
def cmd_verify(suite: str, cfg: RunConfig, **kwargs) -> Report:
    if suite not in SUITES:
        raise ValueError("unknown suite %r; choose from %s" % (suite, ", ".join(SUITES)))
    report = Report("verify " + suite, cfg.parameters())
    SUITES[suite](cfg, report, **kwargs)
    return report


# -- primitivity and fibers ---------------------------------------------------

def _log_magnitudes(indices, pts, cfg: RunConfig) -> np.ndarray:
    out = np.empty((len(indices), len(pts)))
    for i, v in enumerate(indices):
        for k, Z in enumerate(pts):
            out[i, k] = big_theta_log(v, Z, cfg.epsilon, cfg.radius_cap).log_magnitude
    return out


def _agree(a: np.ndarray, b: np.ndarray) -> bool:
    # |Theta_v|^n = |Theta_w|^n at every point, to relative AGREE_TOL
    return bool(np.all(np.abs(a - b) < AGREE_TOL))


@_timed
def cmd_primitivity(cfg: RunConfig) -> Report:
    """Exact signature partition of I_N/+-, then numeric separation of what is left."""
    g, N = cfg.genus, cfg.level
    report = Report("primitivity", cfg.parameters())
    if N < 3:
        raise ValueError("Theta_v needs N >= 3")
    failures = precondition_failures(g, N)
    if g < 2:
        raise ValueError("the signature calculus needs g >= 2")
    _budget(count_I_N(g, N) * cfg.samples, "primitivity (%d, %d)" % (g, N))

    part = signature_collision_classes(g, N)
    undecided = part.undecided_pairs
    report.observations["classes"] = len(part.classes)
    report.observations["signature_buckets"] = len(part.buckets)
    report.observations["singleton_buckets"] = part.singletons
    report.observations["half_pair_classes"] = part.half_pair_classes
    report.observations["pairs_left_by_signatures"] = len(undecided)

    involved = sorted({i for p in undecided for i in p})
    pts = _points(cfg, g, 6)
    mags = dict(zip(involved, _log_magnitudes([part.classes[i].rep for i in involved], pts, cfg)))
    survivors, margin = [], math.inf
    for a, b in undecided:
        gap = float(np.max(np.abs(mags[a] - mags[b])))
        margin = min(margin, gap)
        if _agree(mags[a], mags[b]):
            survivors.append({"v": part.classes[a], "w": part.classes[b], "Z": pts})
    report.observations["surviving_collisions"] = len(survivors)
    report.observations["separation"] = "numeric separation at %d shared points" % len(pts)
    data = dict(classes=len(part.classes), surviving_collisions=len(survivors),
                min_separation_log_gap=margin if undecided else None, tolerance=AGREE_TOL)
    if failures:
        report.observations["precondition_failures"] = failures
        report.add("primitivity of Theta over I_N", REF_PRIMITIVE, NOT_MET,
                   precondition_failures=failures, collisions=survivors or None, **data)
        # the generator fibers do not need the primitivity hypothesis
        for t in _targets(g):
            _fiber_checks(report, cfg, g, N, t)
    else:
        ok = not survivors
        report.add("primitivity of Theta over I_N", REF_PRIMITIVE, PASS if ok else FAIL,
                   witness=None if ok else survivors, **data)
    return report


def _targets(g: int) -> list:
    return ["e%d" % j for j in range(1, 2 * g + 1)] + ["e", "f"]


def _fiber_checks(report: Report, cfg: RunConfig, g: int, N: int, target: str):
    tv = target_vector(target, g, N)
    tc = canonical(tv)
    classes = list(enumerate_I_N(g, N))
    _budget((len(classes) + 1) * cfg.samples, "fiber scan (%d, %d)" % (g, N))
    pts = _points(cfg, g, 7)
    ref = _log_magnitudes([tv], pts, cfg)[0]
    allm = _log_magnitudes([c.rep for c in classes], pts, cfg)
    matches = [c for c, m in zip(classes, allm) if _agree(m, ref)]
    ok = matches == [tc]
    report.add("fiber of %s: only +-target matches" % target, REF_FIBERS, PASS if ok else FAIL,
               classes=len(classes), matches=[str(c) for c in matches],
               witness=None if ok else {"target": tc, "matches": matches, "Z": pts})
    cand = special_fiber_candidates(target, g, N).classes
    inside = tc in cand and all(c in cand for c in matches)
    report.add("fiber of %s: survivors within order-calculus candidates" % target, REF_FIBERS,
               PASS if inside else FAIL, candidates=sorted(str(c) for c in cand),
               witness=None if inside else {"matches": matches})


@_timed
def cmd_fibers(target: str, cfg: RunConfig) -> Report:
    g, N = cfg.genus, cfg.level
    if N < 3:
        raise ValueError("fiber scan needs N >= 3")
    report = Report("fibers " + target, cfg.parameters())
    _fiber_checks(report, cfg, g, N, target)
    return report


# -- stabilizers ----------------------------------------------------------------

def _totient(N: int) -> int:
    return sum(1 for k in range(1, N + 1) if math.gcd(k, N) == 1)


def _gamma1_shape(M: np.ndarray, nu: int, N: int) -> bool:
    A, B, C, D = blocks(np.asarray(M, dtype=np.int64) % N)
    g = A.shape[0]
    I = np.eye(g, dtype=np.int64)
    for s in (1, -1):
        if (np.array_equal(A, (s * I) % N) and not B.any()
                and np.array_equal(D, (s * nu * I) % N) and np.array_equal(C, C.T)):
            return True
    return False


@_timed
def cmd_stabilizer(index_set: str, cfg: RunConfig) -> Report:
    g, N = cfg.genus, cfg.level
    if index_set not in ("full", "gamma1-type"):
        raise ValueError("index set must be 'full' or 'gamma1-type'")
    if N < 3:
        raise ValueError("stabilizers are computed for N >= 3")
    need = sp_order(g, N) // 2 * _totient(N)
    if need > DEFAULT_MAX_SIZE:
        raise BudgetError("GSp_%d(Z/%d)/+- has %d elements; the BFS budget is %d"
                          % (2 * g, N, need, DEFAULT_MAX_SIZE))
    report = Report("stabilizer " + index_set, cfg.parameters())
    table = load_or_build(g, N, cfg.cache_path)
    sp_count = int(np.sum(table.nus == 1))
    expected = sp_order(g, N) // 2
    report.add("|Sp_2g(Z/N)/+-| by BFS", REF_GROUP, PASS if sp_count == expected else FAIL,
               exact={"bfs": sp_count, "formula": expected, "gsp_elements": len(table)})

    if index_set == "full":
        W = [basis_vector(g, j, N) for j in range(1, 2 * g + 1)] + [target_vector("e", g, N)]
    else:
        W = [basis_vector(g, j, N) for j in range(1, g + 1)] + [f_vector(g, N)]
    stab = stabilizer(table, [canonical(w) for w in W])
    elements = [(table.matrix(k), int(table.nus[k])) for k in stab]
    if index_set == "full":
        ok = len(stab) == 1 and np.array_equal(elements[0][0] % N, np.eye(2 * g, dtype=np.int64) % N)
        report.add("full index set: stabilizer trivial", REF_STAB_FULL, PASS if ok else FAIL,
                   exact={"size": len(stab)},
                   witness=None if ok else [{"alpha": M, "nu": nu} for M, nu in elements])
    else:
        bad = [{"alpha": M, "nu": nu} for M, nu in elements if not _gamma1_shape(M, nu, N)]
        predicted = N ** (g * (g + 1) // 2) * _totient(N)
        ok = not bad and len(stab) == predicted
        report.add("gamma1-type index set: stabilizer shape", REF_STAB_G1, PASS if ok else FAIL,
                   exact={"size": len(stab), "predicted": predicted, "off_shape": len(bad)},
                   witness=bad or None)
    return report


# -- rescaling ----------------------------------------------------------------

def random_gamma1_lower(g: int, N: int, rng: np.random.Generator, max_len: int = 4) -> np.ndarray:
    """A word in Gamma_1(N) = {[[I,O],[*,I]] mod N}: lower unipotents with any
    symmetric block, and N-scaled upper and GL_g letters."""
    M = np.eye(2 * g, dtype=np.int64)
    for _ in range(int(rng.integers(1, max_len + 1))):
        i, j = (int(x) for x in rng.integers(1, g + 1, size=2))
        s = int(rng.choice([-1, 1]))
        pick = int(rng.integers(3 if g >= 2 else 2))
        if pick == 0:
            L = lower(s * E_sym(g, i, j))
        elif pick == 1:
            L = translation(s * N * E_sym(g, i, j))
        else:
            i, j = (int(x) for x in rng.choice(np.arange(1, g + 1), size=2, replace=False))
            L = gl_block(np.eye(g, dtype=np.int64) + s * N * E(g, i, j))
        M = M @ L
    return M


def conjugate_to_upper(G, N: int) -> np.ndarray:
    """delta^-1 G delta with delta = diag(sqrt(N) I, I/sqrt(N)): [[A, B/N], [NC, D]]."""
    A, B, C, D = blocks(np.asarray(G, dtype=np.int64))
    if np.any(B % N):
        raise ValueError("B is not divisible by N; G is not in Gamma_1(N)")
    return from_blocks(A, B // N, N * C, D)


@_timed
def cmd_rescale_check(cfg: RunConfig, elements: int = 10) -> Report:
    """h(Z) = Theta_v(NZ) for v in {(1/N)e_1..(1/N)e_g, (1/N)f} is invariant under
    Gamma^1(N), the delta-conjugate of Gamma_1(N).  Each random gamma in Gamma_1(N)
    is tested through its conjugate delta^-1 gamma delta."""
    g, N = cfg.genus, cfg.level
    if N < 3:
        raise ValueError("rescale check needs N >= 3")
    report = Report("rescale", cfg.parameters())
    rng = cfg.rng(8)
    vs = [basis_vector(g, j, N) for j in range(1, g + 1)] + [f_vector(g, N)]
    _budget((elements + 2) * len(vs) * 4, "rescale check")

    def h(v, Z):
        return big_theta_log(v, Z.scaled(N), cfg.epsilon, cfg.radius_cap)

    gammas = [np.eye(2 * g, dtype=np.int64), lower(N * E_sym(g, 1, 1))]
    gammas += [random_gamma1_lower(g, N, rng) for _ in range(elements)]
    worst, wit, literal = 0.0, None, 0.0
    for G in gammas:
        if not (congruence_tests(G, N)["in_Gamma_lower"] and is_gsp(G) == 1):
            raise AssertionError("constructed element is not in Gamma_1(%d)" % N)
        Gt = conjugate_to_upper(G, N)
        assert congruence_tests(Gt, N)["in_Gamma_upper"]
        Z = SiegelPoint.random(g, rng)
        conj_Z, plain_Z = act_on_H(Gt, Z), act_on_H(G, Z)
        for v in vs:
            base = h(v, Z)
            r = log_relative_residual(h(v, conj_Z), base)
            if r >= worst:
                worst, wit = r, {"gamma": G, "conjugate": Gt, "v": v, "Z": Z}
            literal = max(literal, log_relative_residual(h(v, plain_Z), base))
    ok = worst < IDENTITY_TOL
    report.add("h invariant under delta^-1 Gamma_1(N) delta", REF_RESCALE, PASS if ok else FAIL,
               elements=len(gammas), generators=[str(v) for v in vs], max_residual=worst,
               tolerance=IDENTITY_TOL, witness=None if ok else wit)
    # h(gamma Z) itself, for gamma in Gamma_1(N) unconjugated; not expected to vanish
    report.observations["unconjugated_max_residual"] = literal

    # outside Gamma_1(N) and Gamma^1(N) alike
    controls = [rotation(g)] + ([elementary("C1", 1, 2, g=g)] if g >= 2 else [])
    best, cwit = 0.0, None
    for G in controls:
        Z = SiegelPoint.random(g, rng)
        for v in vs:
            r = log_relative_residual(h(v, act_on_H(G, Z)), h(v, Z))
            if r > best:
                best, cwit = r, {"gamma": G, "v": v, "Z": Z}
    ok = best > CONTROL_MIN
    report.add("negative control: generic gamma moves some h", REF_RESCALE, PASS if ok else FAIL,
               max_residual=best, required_min=CONTROL_MIN, witness=None if ok else cwit)
    return report


# -- degenerate level ---------------------------------------------------------------

def degenerate_magnitudes(v, pts, cfg: RunConfig) -> list:
    """|Theta_v| at each point for a level-2 v, summing the vanishing characteristics."""
    return [math.exp(big_theta_log(v, Z, cfg.epsilon, cfg.radius_cap, allow_degenerate=True)
                     .log_magnitude) for Z in pts]


__all__ = [
    "RunConfig", "Report", "BudgetError", "SUITES", "cmd_verify", "cmd_primitivity",
    "cmd_fibers", "cmd_stabilizer", "cmd_rescale_check", "random_word", "random_gamma_N",
    "random_gamma1_lower", "conjugate_to_upper", "random_index", "degenerate_magnitudes",
    "complex_to_text", "matrix_to_json", "PASS", "FAIL", "NOT_MET",
]
