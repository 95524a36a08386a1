"""The ten acceptance criteria, each at its stated tolerance and time limit.

Every test records one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.
"""

import math
import time

import numpy as np
import pytest

from siegel_theta.characteristics import FracVector
from siegel_theta.points import SiegelPoint
from siegel_theta.theta import DegenerateFamilyError, big_theta, big_theta_log
from siegel_theta.verify import (
    RunConfig,
    cmd_fibers,
    cmd_primitivity,
    cmd_rescale_check,
    cmd_stabilizer,
    cmd_verify,
    degenerate_magnitudes,
)


def verdict(record, k, ok, text, seconds):
    record("criterion %d: %s %s (%.1fs)" % (k, "PASS" if ok else "FAIL", text, seconds))
    return ok


def test_criterion_01_vanishing_census(acceptance_line):
    t0 = time.perf_counter()
    counts, ok = {}, True
    for g in (1, 2, 3):
        rep = cmd_verify("vanishing", RunConfig(genus=g, samples=3))
        counts[g] = rep.check("vanishing count")["exact"]["vanishing"]
        ok &= rep.status == "pass"
    dt = time.perf_counter() - t0
    ok &= counts == {1: 1, 2: 6, 3: 28} and dt < 10
    assert verdict(acceptance_line, 1, ok, "vanishing census g=1,2,3 -> %s" % counts, dt)


def test_criterion_02_genus1_collapse(acceptance_line):
    t0 = time.perf_counter()
    worst, classes = 0.0, 0
    for N in (3, 5):
        rep = cmd_verify("genus1", RunConfig(genus=1, level=N, samples=3))
        c = rep.checks[0]
        worst = max(worst, c["max_residual"])
        classes += c["classes"]
    dt = time.perf_counter() - t0
    ok = classes == 16 and worst < 1e-6 and dt < 5
    assert verdict(acceptance_line, 2, ok, "Theta_v = g_v^(12N), 4+12 classes, max residual %.1e" % worst, dt)


def test_criterion_03_diagonal_restriction(acceptance_line):
    t0 = time.perf_counter()
    rep = cmd_verify("diag", RunConfig(genus=2, seed=0), levels=(3, 5), count=50)
    prod_c = rep.check("diagonal restriction, product branch")
    zero_c = rep.check("diagonal restriction, zero branch")
    dt = time.perf_counter() - t0
    ok = (rep.status == "pass" and prod_c["cases"] >= 50 and prod_c["max_residual"] < 1e-8
          and zero_c["max_residual"] < 1e-10 and dt < 30)
    assert verdict(acceptance_line, 3, ok, "diag restriction: %d product (max %.1e), %d zero (max %.1e)"
                   % (prod_c["cases"], prod_c["max_residual"], zero_c["cases"], zero_c["max_residual"]), dt)


def test_criterion_04_order_law(acceptance_line):
    t0 = time.perf_counter()
    rep = cmd_verify("orders", RunConfig(level=7))
    c = rep.checks[0]
    dt = time.perf_counter() - t0
    ok = rep.status == "pass" and c["max_residual"] < 1e-6
    assert verdict(acceptance_line, 4, ok, "q-order slope fit, %d indices of denominator <= 7, max error %.1e"
                   % (c["cases"], c["max_residual"]), dt)


def test_criterion_05_sp_action(acceptance_line):
    t0 = time.perf_counter()
    rep = cmd_verify("action", RunConfig(genus=2, level=5), words=20, gammas=10)
    a = rep.check("Sp-action on random words")
    b = rep.check("Gamma(N)-invariance")
    dt = time.perf_counter() - t0
    ok = rep.status == "pass" and a["max_residual"] < 1e-6 and b["max_residual"] < 1e-6 and dt < 120
    assert verdict(acceptance_line, 5, ok, "Sp-action 20 words (max %.1e), Gamma(5) 10 elements (max %.1e)"
                   % (a["max_residual"], b["max_residual"]), dt)


def test_criterion_06_primitivity_2_5(acceptance_line):
    t0 = time.perf_counter()
    rep = cmd_primitivity(RunConfig(genus=2, level=5, samples=8))
    c = rep.checks[0]
    dt = time.perf_counter() - t0
    ok = (rep.status == "pass" and c["classes"] == 312 and c["surviving_collisions"] == 0
          and dt < 600)
    assert verdict(acceptance_line, 6, ok, "(2,5): %d classes, %d pairs left by signatures, %d surviving collisions"
                   % (c["classes"], rep.observations["pairs_left_by_signatures"],
                      c["surviving_collisions"]), dt)


def test_criterion_07_generator_fibers_2_3(acceptance_line):
    t0 = time.perf_counter()
    found = {}
    ok = True
    for t in ("e1", "e2", "e3", "e4", "e", "f"):
        rep = cmd_fibers(t, RunConfig(genus=2, level=3))
        scan = rep.checks[0]
        found[t] = len(scan["matches"])
        ok &= rep.status == "pass" and scan["classes"] == 40
    dt = time.perf_counter() - t0
    ok &= all(n == 1 for n in found.values()) and dt < 60
    assert verdict(acceptance_line, 7, ok, "(2,3) fibers, matches per target %s" % found, dt)


def test_criterion_08_stabilizers(acceptance_line, tmp_path):
    t0 = time.perf_counter()
    cache = str(tmp_path / "gsp4_3.bin")
    full = cmd_stabilizer("full", RunConfig(genus=2, level=3, cache_path=cache))
    g1 = cmd_stabilizer("gamma1-type", RunConfig(genus=2, level=3, cache_path=cache))
    order = full.check("|Sp_2g(Z/N)/+-| by BFS")["exact"]["bfs"]
    size_full = full.check("full index set: stabilizer trivial")["exact"]["size"]
    shape = g1.check("gamma1-type index set: stabilizer shape")["exact"]
    dt = time.perf_counter() - t0
    ok = (full.status == g1.status == "pass" and order == 25920 and size_full == 1
          and shape["size"] == 54 and shape["off_shape"] == 0 and dt < 300)
    assert verdict(acceptance_line, 8, ok, "|Sp4(Z/3)/+-| = %d, full stabilizer %d, gamma1-type %d (off-shape %d)"
                   % (order, size_full, shape["size"], shape["off_shape"]), dt)


def test_criterion_09_rescale(acceptance_line):
    t0 = time.perf_counter()
    rep = cmd_rescale_check(RunConfig(genus=2, level=3), elements=10)
    inv = rep.check("h invariant under delta^-1 Gamma_1(N) delta")
    ctl = rep.check("negative control: generic gamma moves some h")
    dt = time.perf_counter() - t0
    ok = rep.status == "pass" and inv["max_residual"] < 1e-6 and ctl["max_residual"] > 1e-2
    assert verdict(acceptance_line, 9, ok,
                   "h(Z)=Theta_v(3Z) fixed by 10 conjugated Gamma_1(3) elements (max %.1e); "
                   "control moves h (%.1e)" % (inv["max_residual"], ctl["max_residual"]), dt)


def test_criterion_10_level_two(acceptance_line):
    t0 = time.perf_counter()
    Z = SiegelPoint(1j * np.eye(2))
    with pytest.raises(DegenerateFamilyError, match="becomes identically zero when N=2"):
        big_theta(FracVector("1/2,0,0,0"), Z)
    cfg = RunConfig(genus=2, samples=3)
    rng = cfg.rng(10)
    pts = [SiegelPoint.random(2, rng) for _ in range(3)]
    chars = ["1/2,0,0,0", "0,1/2,0,0", "1/2,1/2,0,1/2", "0,0,1/2,1/2", "1/2,1/2,1/2,1/2"]
    worst = max(max(degenerate_magnitudes(FracVector(v), pts, cfg)) for v in chars)
    worst_log10 = max(big_theta_log(FracVector(v), Z, allow_degenerate=True).log_magnitude / math.log(10)
                      for v in chars for Z in pts)
    rejected = 0
    for v in chars:
        try:
            big_theta(FracVector(v), pts[0])
        except DegenerateFamilyError:
            rejected += 1
    dt = time.perf_counter() - t0
    ok = worst < 1e-10 and rejected == 5
    assert verdict(acceptance_line, 10, ok, "level 2 rejected (%d/5); direct |Theta_v| <= %.1e (log10 <= %.0f)"
                   % (rejected, worst, worst_log10), dt)
