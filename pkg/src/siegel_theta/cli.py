"""siegel-theta: evaluate theta constants and Theta_v, run verification suites.

All output is JSON on stdout.  Exit status: 0 when every check passes, 1 on a
failed check or an evaluation error, 2 on bad input or a run whose theorem
hypotheses are not met.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from .characteristics import FracVector
from .points import SiegelPoint
from .theta import DegenerateFamilyError, EvaluationError, TruncationError, big_theta_log, theta
from .verify import (
    SUITES,
    BudgetError,
    RunConfig,
    cmd_fibers,
    cmd_primitivity,
    cmd_rescale_check,
    cmd_stabilizer,
    cmd_verify,
    complex_to_text,
)


def parse_complex(x) -> complex:
    """A JSON number or a string like ``"0+1i"``, ``"-0.5-2i"``, ``"3"`` or ``"i"``."""
    if isinstance(x, bool):
        raise ValueError("boolean is not a complex entry")
    if isinstance(x, (int, float)):
        return complex(x)
    if not isinstance(x, str):
        raise ValueError("matrix entries must be numbers or strings, got %r" % (x,))
    s = x.replace(" ", "").replace("i", "j")
    # Python wants an explicit coefficient before j
    s = re.sub(r"(^|[+-])j$", r"\g<1>1j", s)
    try:
        return complex(s)
    except ValueError:
        raise ValueError("cannot parse complex entry %r" % x) from None


def parse_matrix(text: str) -> SiegelPoint:
    """JSON array of arrays; ``@path`` reads the JSON from a file."""
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError("matrix JSON: %s at position %d" % (exc.msg, exc.pos)) from None
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValueError("matrix must be a non-empty JSON array of arrays")
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix must be square")
    Z = np.array([[parse_complex(x) for x in r] for r in rows], dtype=complex)
    return SiegelPoint(Z)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--genus", type=int, default=2)
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--eps", type=float, default=None,
                   help="absolute tolerance for theta sums (default: $SIEGEL_EPS or 1e-12)")
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius-cap", type=float, default=40.0)
    p.add_argument("--cache", default=None, help="group-table cache file")
    p.add_argument("--json-out", default=None, metavar="PATH")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="siegel-theta", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, what in (("theta", "theta_v(Z)"), ("btheta", "Theta_v(Z)")):
        p = sub.add_parser(name, help="evaluate " + what)
        p.add_argument("v", help="comma-separated rationals, e.g. 1/3,0,0,0")
        p.add_argument("Z", help='JSON matrix, e.g. [["0+1i"]], or @file')
        _common(p)

    p = sub.add_parser("verify", help="run an identity suite")
    p.add_argument("suite", choices=sorted(SUITES))
    _common(p)

    p = sub.add_parser("primitivity", help="separate all classes of I_N/+-")
    _common(p)

    p = sub.add_parser("fibers", help="find the classes whose Theta matches a generator")
    p.add_argument("target", help="e, f or e1..e2g")
    _common(p)

    p = sub.add_parser("stabilizer", help="stabilizer of a generator index set in GSp/+-")
    p.add_argument("index_set", choices=["full", "gamma1-type"])
    _common(p)

    p = sub.add_parser("rescale", help="invariance of Theta_v(NZ) under the conjugated Gamma_1(N)")
    p.add_argument("--elements", type=int, default=10)
    _common(p)
    return parser


def _config(args) -> RunConfig:
    eps = args.eps if args.eps is not None else RunConfig.default_epsilon()
    return RunConfig(genus=args.genus, level=args.level, epsilon=eps, samples=args.samples,
                     seed=args.seed, radius_cap=args.radius_cap, cache_path=args.cache)


def _emit(payload: str, path: str | None):
    print(payload)
    if path:
        with open(path, "w") as fh:
            fh.write(payload + "\n")


def _evaluate(args, cfg: RunConfig) -> dict:
    v = FracVector.parse(args.v)
    Z = parse_matrix(args.Z)
    if v.dim != 2 * Z.genus:
        raise ValueError("v has length %d but Z is %dx%d" % (v.dim, Z.genus, Z.genus))
    if args.command == "theta":
        tv = theta(v, Z, cfg.epsilon, cfg.radius_cap)
        return {"v": str(v), "value": complex_to_text(tv.value),
                "radius": tv.radius, "tail_bound": tv.tail_bound}
    lv = big_theta_log(v, Z, cfg.epsilon, cfg.radius_cap)
    return {"v": str(v), "level": v.level, "value": complex_to_text(lv.to_complex()),
            "log_magnitude": lv.log_magnitude,
            "argument": math.remainder(lv.argument, 2 * math.pi)}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command in ("theta", "btheta"):
            _emit(json.dumps(_evaluate(args, cfg), indent=2, sort_keys=True), args.json_out)
            return 0
        if args.command == "verify":
            report = cmd_verify(args.suite, cfg)
        elif args.command == "primitivity":
            report = cmd_primitivity(cfg)
        elif args.command == "fibers":
            report = cmd_fibers(args.target, cfg)
        elif args.command == "stabilizer":
            report = cmd_stabilizer(args.index_set, cfg)
        else:
            report = cmd_rescale_check(cfg, elements=args.elements)
    except (DegenerateFamilyError, BudgetError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (TruncationError, EvaluationError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    _emit(report.to_json(), args.json_out)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
