"""Named verification suites producing JSON-lines records.

Every suite returns a list of :class:`CheckResult` in a fixed order.  Random
trials come from a generator seeded by ``(seed, n, p)``; they are all drawn
before any evaluation starts, so running the evaluations in parallel does
not change the output.
"""

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..curves import Curves, p1_curve, te_gamma_formula
from ..errors import NumericalFailure, TraceSobolevError
from ..params import derive_exponents
from ..phi_curve import PhiCurve
from ..profiles import FamilyTag
from ..radial_quad import QuadratureSpec, cap_volume
from .conformal import conformal_check
from .mother import (NOT_EXTREMAL, CheckResult, check_corollary_bounds, check_mother,
                     classify_equality)
from .transport import bubble_density, bump_density, check_transport_chain, radial_brenier
from .trials import BallTrial, RadialTrial, family_trial, random_trial

SUITES = ("mother", "corollary", "equality", "transport", "conformal", "gamma", "p1")
EQUALITY_REL_TOL = 1e-6
FAMILY_OFFSETS = {
    FamilyTag.SOBOLEV: (-2.0, -0.5, 0.0, 0.7, 1.0),
    FamilyTag.ESCOBAR: (-0.5, -1.0, -2.0, -3.0, -5.0),
    FamilyTag.BEYOND_ESCOBAR: (-1.2, -1.5, -2.0, -3.0, -5.0),
}
BALL_OFFSETS = (-0.7, -0.3, 0.0, 0.3, 0.8)
GAMMA_PS = (1.3, 1.5, 2.0, 2.5)
GAMMA_SMALL_PS = (1.5, 1.2, 1.1, 1.05)
GAMMA_SLOPE_TOL = 0.25
TRANSPORT_PAIRS = 50
TRANSPORT_CENTER = 3.0


@dataclass
class SuiteConfig:
    n: int = 3
    p: float = 2.0
    trials: int = 200
    seed: int = 0
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    workers: int = 1

    @property
    def exps(self):
        return derive_exponents(self.n, self.p)

    def rng(self, stream=0):
        ss = np.random.SeedSequence([int(self.seed), int(self.n), int(round(self.p * 1e6)), int(stream)])
        return np.random.default_rng(ss)


def default_workers():
    env = os.environ.get("TRACE_SOBOLEV_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def _ordered_map(func, items, workers):
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


def _failed(check, params, exc):
    return CheckResult(check, dict(params, error=f"{type(exc).__name__}: {exc}"),
                       math.nan, math.nan, math.nan, False,
                       detail={"numerical": isinstance(exc, NumericalFailure)})


def _relative_equality(name, res):
    rel = abs(res.margin) / abs(res.lhs)
    return CheckResult(name, res.params, res.lhs, res.rhs, res.margin, rel < EQUALITY_REL_TOL,
                       EQUALITY_REL_TOL, {"relative": rel})


# ---------------------------------------------------------------------- suites


def mother_suite(cfg: SuiteConfig):
    exps = cfg.exps
    rng = cfg.rng()
    jobs = []
    for _ in range(cfg.trials):
        f = random_trial(rng, exps)
        g = random_trial(rng, exps)
        t = float(rng.uniform(-3.0, 3.0))
        jobs.append((f, g, t))

    def run(job):
        f, g, t = job
        try:
            return check_mother(f, g, t, cfg.quad, raise_on_violation=False)
        except TraceSobolevError as exc:
            return _failed("mother", {"n": exps.n, "p": exps.p, "t": t}, exc)

    out = _ordered_map(run, jobs, cfg.workers)
    out += equality_manifold(cfg)
    out += dilation_invariance(cfg, jobs[: min(5, len(jobs))])
    return out


def equality_manifold(cfg: SuiteConfig):
    exps = cfg.exps
    cases = []
    if exps.is_p1:
        cases = [BallTrial(exps, t, 1.0) for t in BALL_OFFSETS]
    else:
        for fam, offsets in FAMILY_OFFSETS.items():
            cases += [family_trial(exps, fam, t) for t in offsets]

    def run(tr):
        try:
            res = check_mother(tr, tr, tr.center, cfg.quad, raise_on_violation=False)
            return _relative_equality("mother-equality", res)
        except TraceSobolevError as exc:
            return _failed("mother-equality", {"trial": tr.describe()}, exc)

    return _ordered_map(run, cases, cfg.workers)


def dilation_invariance(cfg: SuiteConfig, jobs):
    out = []
    for f, g, t in jobs:
        try:
            base = check_mother(f, g, t, cfg.quad, raise_on_violation=False)
            moved = check_mother(f.dilate(1.7), g, t, cfg.quad, raise_on_violation=False)
        except TraceSobolevError as exc:
            out.append(_failed("mother-dilation", {"t": t}, exc))
            continue
        diff = max(abs(moved.lhs - base.lhs), abs(moved.rhs - base.rhs))
        tol = 10.0 * max(base.tol, moved.tol)
        out.append(CheckResult("mother-dilation", dict(base.params, dilation=1.7), base.rhs, moved.rhs,
                               tol - diff, diff <= tol, tol))
    return out


def corollary_suite(cfg: SuiteConfig):
    exps = cfg.exps
    curves = Curves(exps, cfg.quad)
    out = []

    def bounds(h, t):
        try:
            return [r for r in check_corollary_bounds(h, t, cfg.quad, curves, raise_on_violation=False)
                    if r.passed is not None]
        except TraceSobolevError as exc:
            return [_failed("corollary", {"t": t, "h": h.describe()}, exc)]

    if exps.is_p1:
        for t in BALL_OFFSETS:
            res = bounds(BallTrial(exps, t, 1.0), t)
            out += [_relative_equality("corollary-equality", r) for r in res]
        rng = cfg.rng(1)
        for _ in range(max(10, cfg.trials // 10)):
            h = random_trial(rng, exps)
            out += bounds(h, float(rng.uniform(-0.95, 0.95)))
        return out

    for t in FAMILY_OFFSETS[FamilyTag.SOBOLEV]:
        res = bounds(family_trial(exps, FamilyTag.SOBOLEV, t), t)
        out += [_relative_equality("corollary-equality", r) if r.check == "corollary-sobolev" else r
                for r in res]
    for t in (-1.5, -2.0):
        res = bounds(family_trial(exps, FamilyTag.BEYOND_ESCOBAR, t), t)
        out += [_relative_equality("corollary-equality", r) if r.check == "corollary-beyond_escobar" else r
                for r in res]
    res = bounds(family_trial(exps, FamilyTag.ESCOBAR, -1.0), -1.0)
    out += [_relative_equality("corollary-equality", r) if r.check == "corollary-escobar" else r
            for r in res]
    # a power decay that is not the extremal one is strictly above every bound
    beta = 1.5 * (exps.n - exps.p) / exps.p
    power = RadialTrial("power", exps, 0.5, 1.0, beta=beta)
    for t in (-2.0, 0.5):
        for r in bounds(power, t):
            strict = r.margin > r.tol
            out.append(CheckResult(r.check + "-strict", r.params, r.lhs, r.rhs, r.margin, strict, r.tol))
    rng = cfg.rng(1)
    jobs = [(random_trial(rng, exps), float(rng.uniform(-3.0, 3.0))) for _ in range(max(10, cfg.trials // 10))]
    for chunk in _ordered_map(lambda j: bounds(*j), jobs, cfg.workers):
        out += chunk
    return out


def equality_suite(cfg: SuiteConfig):
    exps = cfg.exps
    cases = []
    if exps.is_p1:
        cases = [(BallTrial(exps, t, 1.0), t, FamilyTag.BALL_P1) for t in (-0.5, 0.0, 0.3)]
        cases += [(BallTrial(exps, 0.3, 1.0), 0.8, NOT_EXTREMAL),
                  (BallTrial(exps, 2.0, 1.0), 2.0, NOT_EXTREMAL)]
    else:
        cases = [(family_trial(exps, FamilyTag.SOBOLEV, t), t, FamilyTag.SOBOLEV) for t in (-1.0, 0.0, 1.0)]
        cases += [(family_trial(exps, FamilyTag.ESCOBAR, -1.0), -1.0, FamilyTag.ESCOBAR),
                  (family_trial(exps, FamilyTag.BEYOND_ESCOBAR, -1.5), -1.5, FamilyTag.BEYOND_ESCOBAR),
                  (family_trial(exps, FamilyTag.BEYOND_ESCOBAR, -2.0), -2.0, FamilyTag.BEYOND_ESCOBAR),
                  (RadialTrial("perturbed", exps, 0.0, 1.0, amplitude=0.05), 0.0, NOT_EXTREMAL),
                  (RadialTrial("power", exps, 0.0, 1.0, beta=1.5 * (exps.n - exps.p) / exps.p), 0.0,
                   NOT_EXTREMAL),
                  (family_trial(exps, FamilyTag.SOBOLEV, 0.5), 1.0, NOT_EXTREMAL)]

    def run(case):
        f, t, want = case
        params = {"n": exps.n, "p": exps.p, "t": t, "f": f.describe(), "expected": str(want)}
        try:
            got = classify_equality(f, t, cfg.quad)
        except TraceSobolevError as exc:
            return _failed("equality-classification", params, exc)
        return CheckResult("equality-classification", dict(params, got=str(got)), 0.0, 0.0, 0.0, got == want)

    return _ordered_map(run, cases, cfg.workers)


def transport_suite(cfg: SuiteConfig):
    n = cfg.n
    rng = cfg.rng(2)
    pairs = []
    for i in range(TRANSPORT_PAIRS):
        k = int(rng.integers(2, 5))
        rf = float(rng.uniform(0.5, 2.0))
        # non-dilation pairs get clearly different modulations, so they are far from a dilation
        mods = [float(rng.uniform(0.0, 0.4)), float(rng.uniform(0.8, 1.5))]
        if rng.random() < 0.5:
            mods.reverse()
        F = bump_density(n, rf, k, TRANSPORT_CENTER, mods[0])
        if i % 5 == 0:
            lam = float(rng.uniform(0.5, 1.4))
            G = F.dilated(lam)
        else:
            G = bump_density(n, float(rng.uniform(0.5, 2.0)), k, TRANSPORT_CENTER, mods[1])
        pairs.append((F, G, i % 5 == 0))

    def run(pair):
        F, G, dil = pair
        params = {"n": n, "F": F.label, "G": G.label, "dilation": dil}
        try:
            plan = radial_brenier(F, G)
            chain = check_transport_chain(plan, cfg.quad)
        except TraceSobolevError as exc:
            return [_failed("transport-chain", params, exc)]
        ma = CheckResult("transport-ma-residual", params, plan.residual, 1e-8, 1e-8 - plan.residual,
                         plan.residual < 1e-8)
        chain.params = params
        chain.passed = chain.passed and chain.detail["is_dilation"] == dil
        return [ma, chain]

    out = []
    for chunk in _ordered_map(run, pairs, cfg.workers):
        out += chunk
    bubble = bubble_density(n, cfg.p if cfg.p > 1 else 2.0 if n > 2 else 1.5)
    plan = radial_brenier(bubble, bump_density(n, 1.0, 3))
    out.append(CheckResult("transport-ma-residual", {"n": n, "F": bubble.label, "G": "bump(R=1,k=3)"},
                           plan.residual, 1e-8, 1e-8 - plan.residual, plan.residual < 1e-8))
    return out


def conformal_suite(cfg: SuiteConfig):
    n = cfg.n
    if n < 3:
        return [CheckResult("conformal", {"n": n, "skipped": "needs n >= 3"}, math.nan, math.nan,
                            math.nan, False)]
    curve = PhiCurve(Curves(derive_exponents(n, 2.0), cfg.quad))
    cases = [(FamilyTag.SOBOLEV, t) for t in (-1.0, 0.0, 1.0)]
    cases += [(FamilyTag.ESCOBAR, -1.0), (FamilyTag.BEYOND_ESCOBAR, -1.5), (FamilyTag.BEYOND_ESCOBAR, -2.0)]
    out = []
    for fam, t in cases:
        try:
            out += conformal_check(fam, t, n, cfg.quad, curve).records
        except TraceSobolevError as exc:
            out.append(_failed("conformal", {"n": n, "family": str(fam), "t": t}, exc))
    return out


def te_ratio(n, p, quad=QuadratureSpec()):
    """T_E(n, p)^{p#} divided by the Gamma-function ratio, from quadrature."""
    curves = Curves.for_pair(n, p, quad)
    t_e = curves.escobar_constants()[0]
    return t_e ** curves.exps.p_sharp / te_gamma_formula(n, p)


def gamma_suite(cfg: SuiteConfig):
    out = []
    n = cfg.n
    ps = [p for p in GAMMA_PS if p < n]
    ratios = [te_ratio(n, p, cfg.quad) for p in ps]
    if ratios:
        spread = (max(ratios) - min(ratios)) / float(np.mean(ratios))
        out.append(CheckResult("gamma-ratio-constancy", {"n": n, "p": ps, "ratios": ratios},
                               spread, 1e-6, 1e-6 - spread, spread < 1e-6))
    tes = []
    for p in GAMMA_SMALL_PS:
        curves = Curves.for_pair(2, p, cfg.quad)
        tes.append(curves.escobar_constants()[0])
    inc = all(b > a for a, b in zip(tes, tes[1:]))
    out.append(CheckResult("gamma-te-increasing", {"n": 2, "p": list(GAMMA_SMALL_PS), "T_E": tes},
                           tes[0], tes[-1], tes[-1] - tes[0], inc))
    # local slope of log T_E^{p#} against -log(p - 1) between the two smallest p
    pa, pb = GAMMA_SMALL_PS[-2:]
    ya = math.log(tes[-2] ** derive_exponents(2, pa).p_sharp)
    yb = math.log(tes[-1] ** derive_exponents(2, pb).p_sharp)
    slope = (yb - ya) / (math.log(pa - 1.0) - math.log(pb - 1.0))
    want = (2 - 1) / (2 * 2)
    rel = abs(slope - want) / want
    out.append(CheckResult("gamma-log-slope", {"n": 2, "p": [pa, pb], "expected": want}, slope, want,
                           GAMMA_SLOPE_TOL - rel, rel < GAMMA_SLOPE_TOL))
    return out


def p1_suite(cfg: SuiteConfig):
    n = cfg.n
    exps = derive_exponents(n, 1.0)
    out = []
    curve = PhiCurve(Curves(exps, cfg.quad))
    c = curve.constants
    iso = exps.dims.iso_b1
    half = 2.0 ** (-1.0 / n) * iso
    out.append(CheckResult("p1-phi-T0", {"n": n}, c.phi_T0, half, -abs(c.phi_T0 - half),
                           abs(c.phi_T0 - half) <= 1e-9 * half))
    located = curve(c.T_0)
    out.append(CheckResult("p1-phi-at-T0", {"n": n, "T0": c.T_0}, located, half, -abs(located - half),
                           abs(located - half) <= 1e-9 * half))
    for t in (-0.5, 0.0, 0.5):
        T, G = p1_curve(n, t)
        mass = cap_volume(n, t) ** (1.0 / n)
        want = n * mass - t * T
        out.append(CheckResult("p1-identity", {"n": n, "t": t}, G, want, -abs(G - want),
                               abs(G - want) <= 1e-9 * abs(want)))
    gaps = []
    for t in (-0.9, -0.95, -0.99):
        T, G = p1_curve(n, t)
        gaps.append(G - T)
        out.append(CheckResult("p1-divergence-bound", {"n": n, "t": t}, T, G, G - T, G > T))
    dec = all(b < a for a, b in zip(gaps, gaps[1:]))
    out.append(CheckResult("p1-gap-trend", {"n": n, "t": [-0.9, -0.95, -0.99], "gaps": gaps},
                           gaps[0], gaps[-1], gaps[0] - gaps[-1], dec))
    return out


RUNNERS = {
    "mother": mother_suite,
    "corollary": corollary_suite,
    "equality": equality_suite,
    "transport": transport_suite,
    "conformal": conformal_suite,
    "gamma": gamma_suite,
    "p1": p1_suite,
}


def run_suite(name, cfg: SuiteConfig):
    if name == "all":
        out = []
        for key in SUITES:
            out += run_suite(key, cfg)
        return out
    if name not in RUNNERS:
        raise KeyError(name)
    records = RUNNERS[name](cfg)
    for r in records:
        r.params = dict(r.params, suite=name)
    return records


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, (np.floating, np.integer)):
        return _clean(x.item())
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, FamilyTag):
        return str(x)
    return x


def to_jsonl(records) -> str:
    return "".join(json.dumps(_clean(r.record()), sort_keys=True) + "\n" for r in records)
