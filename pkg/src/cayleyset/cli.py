"""Command-line front end.

Exit codes: 0 success, 1 negative verdict (``check --strict``), 2 input
error, 3 numerical failure.

CSV columns for ``fiber``/``atlas --format csv``:
z_re, z_im, l1_re, l1_im, l2_re, l2_im, l3_re, l3_im, mult, res_cayley, res_j
(one row per fiber root).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from . import serialize as ser
from .cayley import cayley_condition_n, sample_cayley
from .dynamics import random_start_points, trace
from .elliptic import JValue, fiber_atlas, fiber_solutions, j_from_lambda, j_from_sigma
from .errors import (
    BadOrder,
    CayleySetError,
    CriticalZ,
    DegeneratePencil,
    RepeatedLambda,
    SingularConic,
)
from .gradients import gradcheck, random_gradcheck
from .moduli import ModuliPoint, normal_form
from .numeric import Tolerance
from .pencil import is_transverse
from .selftest import run_selftest

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

INPUT_ERRORS = (ser.InputError, SingularConic, DegeneratePencil, CriticalZ, BadOrder, RepeatedLambda)


@dataclass(frozen=True)
class RunConfig:
    tol: Tolerance = field(default_factory=Tolerance)
    seed: int = 42
    output: str | None = None
    format: str = "json"

    @classmethod
    def from_args(cls, args, environ=None) -> "RunConfig":
        tol = Tolerance.from_env(
            environ,
            abs_eps=args.abs_eps,
            rel_eps=args.rel_eps,
            cluster_eps=args.cluster_eps,
        )
        return cls(tol=tol, seed=args.seed, output=args.output, format=args.format)


def parse_z(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(parts[0])
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ser.InputError(f"--z expects RE,IM, got {text!r}")


def parse_lambda(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise ser.InputError(f"--lambda expects three comma-separated numbers, got {text!r}")
    try:
        return np.array([complex(p.replace(" ", "")) for p in parts])
    except ValueError as exc:
        raise ser.InputError(f"--lambda: {exc}") from exc


def parse_grid(text: str) -> list[complex]:
    """circle:cx,cy,r,n  or  box:x0,x1,y0,y1,nx,ny (row-major, x fastest)."""
    kind, _, rest = text.partition(":")
    try:
        vals = [float(v) for v in rest.split(",")]
    except ValueError:
        raise ser.InputError(f"--grid: cannot parse numbers in {text!r}")
    if kind == "circle" and len(vals) == 4:
        cx, cy, r, n = vals
        t = 2 * np.pi * np.arange(int(n)) / int(n)
        return list(complex(cx, cy) + r * np.exp(1j * t))
    if kind == "box" and len(vals) == 6:
        x0, x1, y0, y1, nx, ny = vals
        xs = np.linspace(x0, x1, int(nx))
        ys = np.linspace(y0, y1, int(ny))
        return [complex(x, y) for y in ys for x in xs]
    raise ser.InputError(f"--grid expects circle:cx,cy,r,n or box:x0,x1,y0,y1,nx,ny, got {text!r}")


# -- subcommands ---------------------------------------------------------------------


def cmd_check(args, cfg):
    pair = ser.load_pair(args.pair)
    report = is_transverse(pair, tol=cfg.tol)
    out = {"transverse": bool(report), "discriminant": ser.cx(report.discriminant)}
    if not report:
        out.update({"satisfied": False, "gamma": None, "verdict": None, "j": None})
        return out, EXIT_NEGATIVE if args.strict else EXIT_OK
    verdict = cayley_condition_n(pair, args.n, cfg.tol)
    z = j_from_sigma(pair.sigma, cfg.tol)
    out.update(
        {
            "satisfied": verdict.satisfied,
            "gamma": ser.cx(verdict.gamma),
            "verdict": ser.verdict_to_json(verdict),
            "j": ser.jvalue_to_json(JValue.of(z, cfg.tol)),
        }
    )
    return out, EXIT_NEGATIVE if (args.strict and not verdict.satisfied) else EXIT_OK


def cmd_normalize(args, cfg):
    pair = ser.load_pair(args.pair)
    nf = normal_form(pair, cfg.tol)
    res = nf.residuals(pair)
    return {
        "normal_form": ser.normal_form_to_json(nf),
        "residuals": [float(r) for r in res],
        "moduli": ser.moduli_to_json(ModuliPoint.from_lambda(nf.lam, cfg.tol)),
    }, EXIT_OK


def cmd_jinv(args, cfg):
    if (args.pair is None) == (args.lam is None):
        raise ser.InputError("jinv needs exactly one of PAIR or --lambda")
    if args.lam is not None:
        z = j_from_lambda(parse_lambda(args.lam), cfg.tol)
    else:
        z = j_from_sigma(ser.load_pair(args.pair).sigma, cfg.tol)
    return ser.jvalue_to_json(JValue.of(z, cfg.tol)), EXIT_OK


def cmd_fiber(args, cfg):
    rec = fiber_solutions(parse_z(args.z), cfg.tol)
    if cfg.format == "csv":
        return ser.atlas_to_csv([rec]), EXIT_OK
    return ser.atlas_to_json(rec), EXIT_OK


def cmd_atlas(args, cfg):
    records = fiber_atlas(parse_grid(args.grid), cfg.tol, jobs=args.jobs)
    if cfg.format == "csv":
        return ser.atlas_to_csv(records), EXIT_OK
    return {"records": [ser.atlas_to_json(r) for r in records]}, EXIT_OK


def cmd_sample(args, cfg):
    D = ser.load_conic(args.d)
    found = sample_cayley(D, seed=cfg.seed, count=args.count, tol=cfg.tol)
    return {"seed": cfg.seed, "D": ser.conic_to_json(D), "samples": [ser.conic_to_json(C) for C in found]}, EXIT_OK


def cmd_trace(args, cfg):
    pair = ser.load_pair(args.pair)
    starts = random_start_points(pair, seed=args.start_seed, count=args.count)
    traces = [trace(pair, p, steps=args.steps, tol=cfg.tol) for p in starts]
    errors = [t.closure_error for t in traces]
    return {
        "start_seed": args.start_seed,
        "traces": [ser.trace_to_json(t) for t in traces],
        "closure_errors": errors,
        "all_closed": all(t.closed for t in traces),
    }, EXIT_OK


def cmd_gradcheck(args, cfg):
    if args.pair:
        reports = [gradcheck(ser.load_pair(args.pair), h=args.h, tol=cfg.tol)]
    else:
        reports = random_gradcheck(seed=cfg.seed, count=args.count, h=args.h, tol=cfg.tol)
    passed = all(r.passed for r in reports)
    return {
        "reports": [ser.gradcheck_to_json(r) for r in reports],
        "worst": max(r.worst for r in reports),
        "passed": passed,
    }, EXIT_OK if passed else EXIT_NUMERIC


def cmd_selftest(args, cfg):
    checks = run_selftest(seed=cfg.seed, tol=cfg.tol)
    ok = all(c.passed for c in checks)
    return {
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        "passed": ok,
    }, EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--abs-eps", type=float, help="absolute tolerance (default 1e-10)")
    common.add_argument("--rel-eps", type=float, help="relative tolerance (default 1e-8; env PONCELET_TOL)")
    common.add_argument("--cluster-eps", type=float, help="root clustering radius (default 1e-6)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("-o", "--output", help="write here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(
        prog="cayleyset",
        description=__doc__.split("\n\n")[0],
        epilog=__doc__.split("\n\n", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="transversality, Cayley verdict and j of a pair")
    s.add_argument("pair")
    s.add_argument("--n", type=int, default=3, help="polygon order")
    s.add_argument("--strict", action="store_true", help="exit 1 when the verdict is negative")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("normalize", parents=[common], help="normal form and moduli point")
    s.add_argument("pair")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("jinv", parents=[common], help="j-invariant of a pair or of lambda")
    s.add_argument("pair", nargs="?")
    s.add_argument("--lambda", dest="lam", help="l1,l2,l3 (python complex syntax allowed)")
    s.set_defaults(func=cmd_jinv)

    s = sub.add_parser("fiber", parents=[common], help="the 24 Cayley points with j = z")
    s.add_argument("--z", required=True, help="RE,IM")
    s.set_defaults(func=cmd_fiber)

    s = sub.add_parser("atlas", parents=[common], help="fibers over a grid of z values")
    s.add_argument("--grid", required=True, help="circle:cx,cy,r,n or box:x0,x1,y0,y1,nx,ny")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_atlas)

    s = sub.add_parser("sample", parents=[common], help="random conics C with gamma(C, D) = 0")
    s.add_argument("--d", required=True, help="conic JSON (or a pair file; its D is used)")
    s.add_argument("--count", type=int, default=10)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("trace", parents=[common], help="Poncelet trajectories from seeded starts")
    s.add_argument("pair")
    s.add_argument("--start-seed", type=int, default=42)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--steps", type=int, default=3)
    s.set_defaults(func=cmd_trace)

    s = sub.add_parser("gradcheck", parents=[common], help="eigenvalue gradients vs finite differences")
    s.add_argument("pair", nargs="?")
    s.add_argument("--count", type=int, default=10, help="random pairs when no PAIR is given")
    s.add_argument("--h", type=float, default=1e-6)
    s.set_defaults(func=cmd_gradcheck)

    s = sub.add_parser("selftest", parents=[common], help="built-in property checks")
    s.set_defaults(func=cmd_selftest)
    return p


def run_cli(argv=None, environ=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig.from_args(args, environ)
        payload, code = args.func(args, cfg)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except CayleySetError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC
    text = payload if isinstance(payload, str) else ser.dumps(payload)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run_cli())
