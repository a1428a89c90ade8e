"""Executable acceptance criteria.

Each `criterion_N()` runs one criterion at its stated tolerance and returns
a `CriterionResult`. The command line exposes them as
``hrunge selftest --criterion N``; the test suite runs all of them.
"""

import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .blaschke import (C_SPLIT, FiniteBlaschke, carleson_delta, delta_via_derivative,
                       equal_spacing_product, equally_spaced_system, hoffman_params,
                       perturbed_delta_bound, schwarz_pick_containment, split_count_bound,
                       split_sequence, split_until, verify_sublevel_geometry)
from .config import load_scenario
from .dbar import Bump, WeightedDensity, make_grid, solve, weak_residual
from .geometry import PseudoDisk, mobius_image, rho, rho_triangle_bounds
from .regions import Disk
from .runge import (PlanConfig, VectorFunction, apply_E, apply_L, check_factor_margins,
                    delta_bracket, harmonic_exponents, plan, plan_base, plan_E,
                    verify_harmonic_comparison, verify_universality)
from .runner import _Clock, run_bidisk, run_study

RADIAL = {
    "schema": 1, "name": "radial", "kind": "disk",
    "K": {"disk": {"center": 0, "radius": "0.3"}},
    "U": {"disk": {"center": 0, "radius": "0.7", "closed": False}},
    "function": {"rational": {"poles": ["0.8"], "coefficients": [1]}},
    "eps": ["1/2", "1/4", "1/8", "1/16", "1/32", "1/64"],
    "margin": "0.13", "pitch": "1/128", "density": "0.01", "seed": 0,
}

HULL = {
    "schema": 1, "name": "hull", "kind": "hull",
    "K": {"disk": {"center": 0, "radius": "0.5"}},
    "U": {"disk": {"center": 0, "radius": "0.97", "closed": False}},
    "function": {"rational": {"poles": ["1.2"], "coefficients": [1]}},
    "hulls": [{"scaled_coordinate": {"center": 0, "scale": "0.6"}}],
    "eps": ["1/2", "1/4", "1/8", "1/16", "1/32"],
    "margin": "0.15", "pitch": "1/128", "density": "0.01", "seed": 0,
}

BIDISK = {
    "schema": 1, "name": "bidisk", "kind": "bidisk",
    "K": {"disk": {"center": 0, "radius": "0.4"}},
    "U": {"disk": {"center": 0, "radius": "0.6", "closed": False}},
    "function": {"sum_rational": {"a": 1, "b": 1, "c": "-1.3"}},
    "eps": ["1/2", "1/4", "1/8", "1/16"],
    "margin": "0.065", "pitch": "1/64", "density": "0.01", "eval_density": "1/32", "seed": 0,
}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    runtime: float
    limit: float = None
    details: dict = field(default_factory=dict)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        lim = f" (limit {self.limit:g} s)" if self.limit else ""
        return f"{status} criterion {self.number:2d}: {self.title} [{self.runtime:.1f} s{lim}]"


def _random_disk(rng, n, radius):
    return radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


def _finish(number, title, checks, t0, limit=None, **details):
    runtime = time.perf_counter() - t0
    ok = all(bool(v) for v in checks.values())
    if limit is not None:
        checks["runtime"] = runtime < limit
        ok = ok and checks["runtime"]
    details["checks"] = {k: bool(v) for k, v in checks.items()}
    return CriterionResult(number, title, ok, runtime, limit, details)


def criterion_1(seed=0):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    n = 10_000
    z, w, u = (_random_disk(rng, n, 0.999) for _ in range(3))
    sym = float(np.max(np.abs(rho(z, w) - rho(w, z))))
    b, p, q = (_random_disk(rng, n, 0.9) for _ in range(3))
    mob = float(np.max(np.abs(rho(mobius_image(b, p), mobius_image(b, q)) - rho(p, q))))
    lo, hi = rho_triangle_bounds(rho(z, u), rho(u, w))
    d = rho(z, w)
    tri = int(np.sum((d < lo - 1e-12) | (d > hi + 1e-12)))
    worst = 0.0
    for c, r in zip(_random_disk(rng, 200, 0.95), 0.01 + 0.98 * rng.random(200)):
        ce, re_ = PseudoDisk(c, r).euclidean()
        y = ce + re_ * np.exp(2j * np.pi * np.arange(64) / 64)
        worst = max(worst, float(np.max(np.abs(rho(y, c) - r))))
    ce, re_ = PseudoDisk(0.5, 0.5).euclidean()
    spot = abs(ce - 0.4) < 1e-15 and abs(re_ - 0.4) < 1e-15
    checks = {"symmetry": sym <= 1e-14, "mobius": mob <= 1e-12, "triangle": tri == 0,
              "realization": worst <= 1e-10, "spot": spot}
    return _finish(1, "metric and geometry suite", checks, t0, 5, symmetry=sym, mobius=mob,
                   triangle_violations=tri, realization=worst)


def criterion_2(seed=0):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(200):
        zs = _random_disk(rng, int(rng.integers(1, 13)), 0.95)
        worst = max(worst, abs(carleson_delta(zs) - delta_via_derivative(zs)))
    closed = 0.0
    for N in range(1, 9):
        for r in (0.1, 0.3, 0.5, 0.7):
            for c in (0, 0.4 - 0.3j):
                pts = equally_spaced_system(c, r, N, phase=0.3)
                brute = float(np.prod(rho(pts[0], pts[1:]))) if N > 1 else 1.0
                closed = max(closed, abs(brute - equal_spacing_product(N, r)))
    pts = equally_spaced_system(0, 0.5, 3)
    spot = max(abs(equal_spacing_product(3, 0.5) - 4 / 7),
               abs(float(np.prod(rho(pts[0], pts[1:]))) - 4 / 7))
    checks = {"derivative_identity": worst <= 1e-10, "closed_form": closed <= 1e-12,
              "four_sevenths": spot <= 1e-12}
    return _finish(2, "Blaschke identities", checks, t0, 10, derivative=worst, closed=closed,
                   spot=spot)


def _valid_lambda(delta):
    # half of the largest lambda with 2 lambda / (1 + lambda^2) < delta
    delta = min(delta, 1.0)
    return 0.5 * delta / (1 + math.sqrt(1 - delta * delta))


def criterion_3(seed=0):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    valid, r = hoffman_params(0.99, 0.8)
    h = 2 * 0.8 / (1 + 0.64)
    spot = valid and abs(h - 40 / 41) < 1e-15 and r > 5 / 8 and not hoffman_params(0.5, 0.4)[0]
    geo_ok, sp_ok = 0, 0
    for _ in range(20):
        zs = _random_disk(rng, int(rng.integers(1, 7)), 0.9)
        delta = min(delta_via_derivative(zs), 1.0)
        lam = _valid_lambda(delta)
        ok, r = hoffman_params(delta, lam)
        B = FiniteBlaschke(zs)
        geo_ok += ok and verify_sublevel_geometry(B, lam, r).ok
        sp_ok += schwarz_pick_containment(B, r) < r
    base = equally_spaced_system(0.1, 0.6, 6)
    delta = carleson_delta(base)
    lam = 0.9 * _valid_lambda(delta) * 2
    bound = perturbed_delta_bound(delta, lam)
    violations = 0
    for _ in range(1000):
        w = lam * np.sqrt(rng.random(6)) * np.exp(2j * np.pi * rng.random(6))
        violations += carleson_delta(mobius_image(base, w)) < bound * (1 - 1e-12)
    checks = {"closed_form_values": spot, "sublevel_geometry": geo_ok == 20,
              "schwarz_pick": sp_ok == 20, "perturbation": violations == 0}
    return _finish(3, "sub-level geometry and perturbation", checks, t0, 60,
                   perturbation_violations=violations, bound=bound)


def criterion_4(seed=0):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    split_bad = count_bad = 0
    for _ in range(100):
        zs = _random_disk(rng, int(rng.integers(2, 13)), 0.9)
        d = carleson_delta(zs)
        a, b = split_sequence(zs)
        split_bad += min(carleson_delta(a), carleson_delta(b)) < math.sqrt(d) * (1 - 1e-12)
        count_bad += len(split_until(zs)) > split_count_bound(d, C_SPLIT)
    checks = {"sqrt_bound": split_bad == 0, "part_count": count_bad == 0}
    return _finish(4, "sequence splitting", checks, t0, 60, split_failures=split_bad,
                   count_failures=count_bad)


def criterion_5(seed=0):
    t0 = time.perf_counter()
    pitch = 1 / 128
    r0 = 0.25
    sup = Disk(0, r0)
    dens = WeightedDensity(sup, lambda w: (1 - np.abs(w) ** 2) * np.ones(len(w)))
    g = make_grid(sup, pitch)
    F = solve(dens, g)
    pts = np.array([0.0, 0.1, 0.05j, -0.1 + 0.1j, 0.15, 0.5, -0.3 + 0.2j, 0.4j, 0.28])
    pts = pts[np.abs(np.abs(pts) - r0) >= 3 * pitch]
    exact = np.where(np.abs(pts) < r0, np.conj(pts), r0 * r0 / np.where(pts == 0, 1, pts))
    got = F(pts)
    scale = np.maximum(np.abs(exact), 1e-300)
    rel = np.where(np.abs(exact) > 0, np.abs(got - exact) / scale, np.abs(got))
    closed = float(np.max(rel[np.abs(exact) > 0]))
    at0 = float(abs(got[pts == 0][0]))
    res = []
    for p in (1 / 32, 1 / 64, 1 / 128, 1 / 256):
        gp = make_grid(sup, p)
        res.append(weak_residual(solve(dens, gp), dens, Bump(0.05, 0.5), gp))
    ratios = [res[i] / res[i + 1] for i in range(3)]
    rng = np.random.default_rng(seed)
    phi1 = rng.standard_normal((len(g), 3)) + 1j * rng.standard_normal((len(g), 3))
    phi2 = rng.standard_normal((len(g), 3)) + 1j * rng.standard_normal((len(g), 3))
    a, b = 0.7 - 0.2j, -1.3
    ev = np.array([0.05 + 0.1j, 0.3, -0.2 - 0.2j])
    d1 = WeightedDensity(sup, lambda w: phi1 * (1 - np.abs(w)[:, None] ** 2))
    d2 = WeightedDensity(sup, lambda w: phi2 * (1 - np.abs(w)[:, None] ** 2))
    d12 = WeightedDensity(sup, lambda w: (a * phi1 + b * phi2) * (1 - np.abs(w)[:, None] ** 2))
    lin = float(np.max(np.abs(solve(d12, g)(ev) - a * solve(d1, g)(ev) - b * solve(d2, g)(ev))))
    T = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    dT = WeightedDensity(sup, lambda w: (phi1 @ T.T) * (1 - np.abs(w)[:, None] ** 2))
    comm = float(np.max(np.abs(solve(d1, g)(ev) @ T.T - solve(dT, g)(ev))))
    checks = {"disk_indicator": closed <= 0.01 and at0 <= 1e-12,
              "weak_residual_first_order": all(q >= 2 for q in ratios),
              "linearity": lin <= 1e-12, "commutation": comm <= 1e-12}
    return _finish(5, "d-bar solver", checks, t0, 60, closed_form=closed, residuals=res,
                   ratios=ratios, linearity=lin, commutation=comm)


def _radial_base(config=None):
    sc = load_scenario(RADIAL)
    cfg = config or sc.config
    return sc, plan_base(sc.K, sc.U, cfg)


def criterion_6(seed=0, base=None):
    t0 = time.perf_counter()
    val = perturbed_delta_bound(C_SPLIT, 1 / 16)
    sc, base = base or _radial_base()
    e4 = []
    for e in sc.eps:
        p = plan(sc.K, sc.U, e, sc.config, base=base)
        e4.append(p.checks["e_over_4_ok"] and p.lam <= 1 / 16 and p.lam == p.frak_e / 4)
    checks = {"bound_is_0.99": abs(val - 0.99) <= 1e-10, "e_over_4": all(e4)}
    return _finish(6, "perturbation constant and e/4 <= 1/16", checks, t0, None, bound=val)


def criterion_7(seed=0, base=None):
    t0 = time.perf_counter()
    sc, base = base or _radial_base()
    p = plan(sc.K, sc.U, 2.0 ** -3, sc.config, base=base)
    fm = check_factor_margins(p, density=1e-2)
    checks = {"sup_margin": fm.sup_margin > 0, "inf_margin": fm.inf_margin > 0}
    return _finish(7, "factor margins on the radial plan", checks, t0, None,
                   sup_margin=fm.sup_margin, inf_margin=fm.inf_margin)


def criterion_8(seed=0):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    bad = 0
    for k in range(1000):
        z = complex(_random_disk(rng, 1, 0.9)[0])
        R = 0.02 + 0.96 * rng.random()
        t = 0.02 + 0.96 * rng.random()
        w = complex(mobius_image(z, t * R * rng.random() * np.exp(2j * np.pi * rng.random())))
        ok, _ = verify_harmonic_comparison(z, w, R, t, samples=10, seed=seed + k)
        bad += not ok
    a, b = harmonic_exponents(0.5, 0.5)
    spot = max(abs(a - math.log(3.5) / math.log(2)), abs(b - math.log(1.5) / math.log(2)))
    checks = {"monte_carlo": bad == 0, "spot": spot <= 1e-12}
    return _finish(8, "harmonic comparison of distances", checks, t0, None, violations=bad,
                   spot=spot)


def criterion_9(seed=0):
    t0 = time.perf_counter()
    sc = load_scenario(RADIAL, seed=seed)
    rows = run_study(sc, _Clock())
    slope = rows[0]["fitted_slope"]
    checks = {"slope": slope >= 0.9, "budget": all(r["budget_ok"] for r in rows),
              "holomorphy": all(r["holomorphy_residual"] <= 1e-4 for r in rows)}
    return _finish(9, "convergence of L on the radial scenario", checks, t0, 600, slope=slope,
                   errors=[r["sup_error"] for r in rows],
                   holomorphy=[r["holomorphy_residual"] for r in rows])


def criterion_10(seed=0, base=None):
    t0 = time.perf_counter()
    sc, base = base or _radial_base()
    brackets = [delta_bracket(plan(sc.K, sc.U, 2.0 ** -m, sc.config, base=base)).ok
                for m in (2, 3, 4)]
    single = replace(base, parts=[base.parts[0][:1]], log_delta_chain=0.0)
    worst = 0.0
    for m in (1, 2, 3, 4):
        p = plan(sc.K, sc.U, 2.0 ** -m, sc.config, base=single)
        br = delta_bracket(p)
        closed = equal_spacing_product(p.N, p.frak_e / 4)
        worst = max(worst, abs(br.measured / closed - 1), abs(br.lower / closed - 1),
                    abs(br.upper / closed - 1))
    checks = {"bracket": all(brackets), "singleton": worst <= 1e-10}
    return _finish(10, "separation bracket of the zero set", checks, t0, None,
                   singleton_rel_error=worst)


def criterion_11(seed=0, base=None):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    sc, base = base or _radial_base()
    p = plan(sc.K, sc.U, 2.0 ** -3, sc.config, base=base)
    hull = load_scenario(HULL)
    ep = plan_E(hull.K, hull.U, hull.hulls, 2.0 ** -3, hull.config)
    f = VectorFunction(lambda z: np.stack([1 / (z - 0.8), z ** 2, np.exp(z)], axis=-1), 3)
    Ts = {"identity": np.eye(3), "projection": np.eye(3)[[0, 2]],
          "random": rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))}
    pts = np.concatenate([sc.K.sample(0.05), np.array([0.5, 0.6j, -0.55 - 0.2j])])
    worst = {}
    for name, T in Ts.items():
        dl = verify_universality(lambda g: apply_L(p, g)[0].q, f, T, pts)
        de = verify_universality(lambda g: apply_E(ep, g), f, T, pts)
        worst[name] = max(dl, de)
    checks = {k: v <= 1e-10 for k, v in worst.items()}
    return _finish(11, "universality under coordinate maps", checks, t0, None, **worst)


def criterion_12(seed=0):
    t0 = time.perf_counter()
    sc = load_scenario(HULL, seed=seed)
    rows = run_study(sc, _Clock())
    slope = rows[0]["fitted_slope"]
    growth = rows[0]["norm_slope"]
    d1 = rows[0]["d1"]
    from .cli import main
    bad = dict(HULL, hulls=[{"scaled_coordinate": {"center": 0, "scale": "2"}}], eps=["1/4"])
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "bad.json")
        with open(path, "w") as fh:
            json.dump(bad, fh)
        code = main(["approx", "--config", path, "--out", os.path.join(tmp, "out"), "--quiet"])
    checks = {"slope": slope >= 0.9, "norm_growth": growth <= d1, "invalid_hull_exit_1": code == 1}
    return _finish(12, "hull-function operator E", checks, t0, None, slope=slope,
                   norm_slope=growth, d1=d1, exit_code=code)


def criterion_13(seed=0):
    t0 = time.perf_counter()
    sc = load_scenario(BIDISK, seed=seed)
    rows = run_bidisk(sc, _Clock())
    slope = rows[0]["fitted_slope"]
    from .bidisk import BidiskScenario, approximate_bidisk
    from .runge import sup_error_L
    cfg = sc.config
    base = plan_base(sc.K, sc.U, cfg)
    s = BidiskScenario(sc.K, sc.K, sc.U, sc.U, sc.function, 2.0 ** -2, 1, cfg, sc.eval_density)
    res = approximate_bidisk(s, base, base)
    Z1 = sc.K.sample(0.05)
    Z2 = sc.K.sample(0.07)
    exact = np.array_equal(res.b(Z1, Z2), res.b1(Z1)[:, None] * res.b2(Z2)[None, :])
    zeros_ok = (np.array_equal(res.b1.zeros, res.op1.zeros)
                and np.array_equal(res.b2.zeros, res.op2.zeros))
    log_inf = res.log_inf_b()
    g1 = lambda z1, z2: 1 / (z1 - 0.9) + 0 * z2
    sd = BidiskScenario(sc.K, sc.K, sc.U, sc.U, g1, 2.0 ** -2, 1, cfg, sc.eval_density)
    rd = approximate_bidisk(sd, base, base)
    one = apply_L(rd.op1, VectorFunction(lambda z: 1 / (z - 0.9)))[0]
    err2, _ = rd.sup_error()
    err1, _ = sup_error_L(one, sc.eval_density)
    degenerate = (rd.degenerate and len(rd.b2) == 0 and abs(err2 - err1) <= 1e-12 * max(err1, 1e-300) + 1e-15
                  and rd.step2_correction_sup() <= 1e-12)
    checks = {"slope": slope >= 0.8, "denominator_product": exact and zeros_ok,
              "inf_b_positive": math.isfinite(log_inf), "degeneracy": degenerate}
    return _finish(13, "bidisk induction", checks, t0, 1800, slope=slope, log_inf_b=log_inf,
                   errors=[r["sup_error"] for r in rows])


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 14)}
QUICK = (1, 2, 3, 4, 5, 6, 7, 8, 10, 11)
