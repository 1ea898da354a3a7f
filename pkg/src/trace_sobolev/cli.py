"""Command-line front end: ``constants``, ``curve`` and ``verify``.

Exit codes: 0 success, 1 a verified property failed, 2 bad usage or
parameters, 3 a numerical routine failed.
"""

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .curves import Curves
from .errors import DomainError, ModeError, NumericalFailure, Violation
from .params import derive_exponents
from .phi_curve import PhiCurve
from .radial_quad import QuadratureSpec
from .verification.suites import SUITES, SuiteConfig, default_workers, run_suite, to_jsonl

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
CSV_HEADER = "T,phi,family,t,dphi,envelope"
DEFAULT_SAMPLES = 60


@dataclass(frozen=True)
class RunConfig:
    n: int
    p: float
    tol: float = 1e-9
    seed: int = 0
    samples: int = DEFAULT_SAMPLES
    trials: int = 200
    out: str = None
    fmt: str = None

    @property
    def exps(self):
        return derive_exponents(self.n, self.p)

    @property
    def quad(self):
        return QuadratureSpec(abs_tol=self.tol, rel_tol=self.tol)


def _num(x):
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".10g")


# ------------------------------------------------------------------- constants


def constant_table(cfg: RunConfig):
    """Rows (name, value, error estimate); errors compare against a 100x tighter run."""
    exps = cfg.exps
    if exps.is_p1:
        c = Curves(exps, cfg.quad).constants()
        return [("ISO_B1", c.S, 0.0), ("T_0", c.T_0, 0.0), ("Phi_T0", c.phi_T0, 0.0)]
    names = ("S", "T_0", "Phi_T0", "T_E", "G_E", "E", "T_star", "Y_E")
    coarse = Curves(exps, cfg.quad).constants()
    fine_quad = QuadratureSpec(abs_tol=cfg.tol / 100, rel_tol=cfg.tol / 100,
                               max_subdivisions=4 * cfg.quad.max_subdivisions)
    fine = Curves(exps, fine_quad).constants()
    key = {"Phi_T0": "phi_T0"}
    rows = []
    for name in names:
        attr = key.get(name, name)
        a, b = getattr(coarse, attr), getattr(fine, attr)
        rows.append((name, a, abs(a - b)))
    return rows


def cmd_constants(cfg: RunConfig) -> str:
    rows = constant_table(cfg)
    if cfg.fmt == "json":
        return json.dumps({"n": cfg.n, "p": cfg.p,
                           "constants": {k: {"value": v, "error": e} for k, v, e in rows}},
                          sort_keys=True) + "\n"
    if cfg.fmt == "svg":
        raise DomainError("constants has no SVG form; use csv or json")
    buf = io.StringIO()
    buf.write("name,value,error\n")
    for k, v, e in rows:
        buf.write(f"{k},{_num(v)},{format(e, '.2g')}\n")
    return buf.getvalue()


# ----------------------------------------------------------------------- curve


def curve_grid(cfg: RunConfig, curve: PhiCurve, T=None, tmin=None, tmax=None):
    if T is not None:
        return [float(x) for x in T]
    c = curve.constants
    top = 3.0 * (c.T_E if math.isfinite(c.T_E) else c.T_0)
    lo = c.T_0 / 20.0 if tmin is None else float(tmin)
    hi = top if tmax is None else float(tmax)
    if not (0 <= lo < hi and math.isfinite(hi)):
        raise DomainError(f"need 0 <= tmin < tmax, got {lo}, {hi}")
    if cfg.samples < 2:
        raise DomainError("need at least two samples")
    return [float(x) for x in np.linspace(lo, hi, cfg.samples)]


def curve_rows(cfg: RunConfig, grid, workers=1):
    curve = PhiCurve(Curves(cfg.exps, cfg.quad))
    c = curve.constants
    positive = [T for T in grid if T > 0]
    for T in grid:
        if T < 0:
            raise DomainError("T must be nonnegative")
    points = dict(zip(positive, curve.sample(positive, with_derivative=True, workers=workers)))
    rows = []
    for T in grid:
        env = curve.envelope(T)
        if T == 0:
            # no minimizer at T = 0; the value is the Sobolev (isoperimetric for p = 1) constant
            fam = "BallP1" if cfg.exps.is_p1 else "Sobolev"
            rows.append((0.0, c.S, fam, math.inf, None, env))
            continue
        pt = points[T]
        rows.append((T, pt.phi, str(pt.family), pt.t, pt.dphi, env))
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for T, phi, fam, t, dphi, env in rows:
        buf.write(",".join([_num(T), _num(phi), fam, _num(t), _num(dphi), _num(env)]) + "\n")
    return buf.getvalue()


def rows_to_json(rows) -> str:
    keys = CSV_HEADER.split(",")
    out = []
    for row in rows:
        rec = dict(zip(keys, row))
        for k in ("T", "phi", "t", "dphi", "envelope"):
            v = rec[k]
            rec[k] = None if v is None or not math.isfinite(v) else float(v)
        out.append(rec)
    return json.dumps(out, sort_keys=True) + "\n"


def rows_to_svg(rows, title="") -> str:
    """Self-contained line chart of phi (solid) over the lower envelope (dashed)."""
    w, h, pad = 640, 420, 50
    T = np.array([r[0] for r in rows])
    phi = np.array([r[1] for r in rows])
    env = np.array([r[5] for r in rows])
    x0, x1 = float(T.min()), float(T.max())
    y0 = 0.0
    y1 = float(max(phi.max(), env.max())) * 1.05
    if x1 == x0:
        x1 = x0 + 1.0

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (w - 2 * pad)

    def sy(y):
        return h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad)

    def poly(ys, style):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(T, ys))
        return f'<polyline fill="none" {style} points="{pts}"/>'

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{pad}" y1="{h - pad}" x2="{w - pad}" y2="{h - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{h - pad}" stroke="black"/>',
        poly(env, 'stroke="gray" stroke-dasharray="6,4"'),
        poly(phi, 'stroke="black" stroke-width="2"'),
        f'<text x="{w / 2:.0f}" y="{h - 12}" text-anchor="middle" font-size="14">T</text>',
        f'<text x="14" y="{h / 2:.0f}" font-size="14">Phi</text>',
        f'<text x="{pad}" y="{h - pad + 16}" font-size="11">{x0:.3g}</text>',
        f'<text x="{w - pad}" y="{h - pad + 16}" font-size="11" text-anchor="end">{x1:.3g}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" font-size="11" text-anchor="end">{y1:.3g}</text>',
        f'<text x="{w / 2:.0f}" y="24" text-anchor="middle" font-size="14">{title}</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


def cmd_curve(cfg: RunConfig, T=None, tmin=None, tmax=None, workers=1) -> str:
    curve = PhiCurve(Curves(cfg.exps, cfg.quad))
    grid = curve_grid(cfg, curve, T, tmin, tmax)
    rows = curve_rows(cfg, grid, workers)
    fmt = cfg.fmt or "csv"
    if fmt == "json":
        return rows_to_json(rows)
    if fmt == "svg":
        return rows_to_svg(rows, f"n={cfg.n:g}, p={cfg.p:g}")
    return rows_to_csv(rows)


# ---------------------------------------------------------------------- verify


def cmd_verify(cfg: RunConfig, suite, workers=1):
    """(JSON-lines text, exit code) for a suite."""
    scfg = SuiteConfig(cfg.n, cfg.p, cfg.trials, cfg.seed, cfg.quad, workers)
    records = run_suite(suite, scfg)
    failed = [r for r in records if not r.passed]
    if any(r.detail.get("numerical") for r in failed):
        code = EXIT_NUMERICAL
    elif failed:
        code = EXIT_VIOLATION
    else:
        code = EXIT_OK
    return to_jsonl(records), code


# ------------------------------------------------------------------------ main


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=3, help="dimension (default 3)")
    common.add_argument("--p", type=float, default=2.0, help="exponent, 1 <= p < n (default 2)")
    common.add_argument("--tol", type=float, default=1e-9, help="quadrature abs and rel tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", dest="fmt", choices=("csv", "svg", "json"))

    parser = argparse.ArgumentParser(prog="trace-sobolev", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common], help="print the sharp constants")
    cp = sub.add_parser("curve", parents=[common], help="sample the curve and its lower envelope")
    cp.add_argument("--T", type=float, action="append", help="evaluate at this T (repeatable)")
    cp.add_argument("--tmin", type=float)
    cp.add_argument("--tmax", type=float)
    cp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    vp = sub.add_parser("verify", parents=[common], help="run a verification suite")
    vp.add_argument("suite", choices=SUITES + ("all",))
    vp.add_argument("--trials", type=int, default=200)
    return parser


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = RunConfig(args.n, args.p, args.tol, args.seed, getattr(args, "samples", DEFAULT_SAMPLES),
                        getattr(args, "trials", 200), args.out, args.fmt)
        cfg.exps    # validates (n, p) before any work
        if not args.tol > 0:
            raise DomainError("--tol must be positive")
        workers = default_workers()
        if args.command == "constants":
            _emit(cmd_constants(cfg), cfg.out)
            return EXIT_OK
        if args.command == "curve":
            _emit(cmd_curve(cfg, args.T, args.tmin, args.tmax, workers), cfg.out)
            return EXIT_OK
        text, code = cmd_verify(cfg, args.suite, workers)
        _emit(text, cfg.out)
        return code
    except (DomainError, ModeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Violation as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
