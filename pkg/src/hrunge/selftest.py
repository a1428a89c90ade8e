"""Quick per-module property suites run by ``hrunge selftest``.

Each suite checks a handful of closed-form values and sampled invariants
and returns (name, passed, detail). The full acceptance criteria live in
`hrunge.acceptance`.
"""

import math

import numpy as np

from .blaschke import FiniteBlaschke, carleson_delta, equal_spacing_product, hoffman_params
from .cutoff import build_cutoff, frak_d
from .dbar import WeightedDensity, make_grid, solve
from .geometry import euclidean_realization, PseudoDisk, mobius_image, rho
from .regions import Disk, PointSet, PseudoDiskRegion, build_chain, check_chain, region_distance
from .runge import harmonic_exponents, n_eps


def _geometry(rng):
    z = 0.9 * np.sqrt(rng.random(500)) * np.exp(2j * np.pi * rng.random(500))
    w = np.roll(z, 1)
    ok = abs(rho(0.5, -0.5) - 0.8) < 1e-15
    ok &= float(np.max(np.abs(rho(z, w) - rho(w, z)))) <= 1e-14
    ok &= abs(rho(mobius_image(0.3, 0.25j), 0.3) - 0.25) < 1e-15
    c, r = euclidean_realization(PseudoDisk(0.9, 0.1))
    ok &= abs(c - 0.9 * 0.99 / (1 - 0.01 * 0.81)) < 1e-14 and abs(r - 0.019 / 0.9919) < 1e-14
    return bool(ok), "metric examples, symmetry, Mobius transport, realization"


def _regions(rng):
    ok = bool(PseudoDiskRegion(PseudoDisk(0.5, 0.5)).contains(np.array([0.75]))[0])
    d, unc = region_distance(Disk(0, 0.2), Disk(0.6, 0.1), 1 / 64)
    ok &= abs(d - 1 / 3) <= unc
    ch = build_chain(PointSet([0, 0.9]), 0.5, 0.1)
    ok &= len(ch) == 2
    ch = build_chain(Disk(0, 0.3), 0.2, 1 / 64)
    sep, cover = check_chain(ch)
    ok &= sep >= 0.2 and cover < 0.2
    return bool(ok), f"distance {d:.12f}, chain of {len(ch)} points"


def _blaschke(rng):
    ok = abs(carleson_delta([0, 0.5]) - 0.5) < 1e-15
    ok &= abs(carleson_delta([0.9, -0.9]) - 1.8 / 1.81) < 1e-14
    ok &= abs(equal_spacing_product(3, 0.5) - 4 / 7) < 1e-15
    B = FiniteBlaschke(0.9 * np.exp(2j * np.pi * rng.random(5)) * rng.random(5))
    ok &= float(np.max(np.abs(np.abs(B(np.exp(2j * np.pi * np.arange(256) / 256))) - 1))) < 1e-12
    valid, r = hoffman_params(0.99, 0.8)
    ok &= valid and r > 5 / 8
    return bool(ok), "separation examples, unimodularity, sub-level parameters"


def _dbar(rng):
    sup = Disk(0, 0.25)
    g = make_grid(sup, 1 / 64)
    F = solve(WeightedDensity(sup, lambda w: (1 - np.abs(w) ** 2)), g)
    rel = abs(F(0.5) - 0.125) / 0.125
    zero = solve(WeightedDensity(sup, lambda w: np.zeros(len(w))), g)
    ok = rel < 0.01 and float(np.max(np.abs(zero(np.array([0.1, 0.5]))))) == 0.0
    return bool(ok), f"disk indicator relative error {rel:.2e}"


def _cutoff(rng):
    K, U = Disk(0, 0.3), Disk(0, 0.7, closed=False)
    pair = build_cutoff(K, U, 0.13)
    z = pair.collar.sample(1 / 64)
    z = z[rng.permutation(len(z))[:200]]
    h = 1e-6
    dx = (pair.rho_V(z + h) - pair.rho_V(z - h)) / (2 * h)
    dy = (pair.rho_V(z + 1j * h) - pair.rho_V(z - 1j * h)) / (2 * h)
    fd = 0.5 * (dx + 1j * dy)
    err = float(np.max(np.abs(fd - pair.dbar_rho(z))))
    d, e = frak_d(pair, K, 1e-2)
    ok = err < 1e-6 and abs(d - rho(0.3, 0.43)) < 1e-9 and e == d / 4
    ok &= pair.rho_V(np.array([0.1]))[0] == 1 and pair.g(np.array([0.9]))[0] == 0
    return bool(ok), f"finite-difference d-bar error {err:.1e}, d = {d:.6f}"


def _runge(rng):
    ok = n_eps(0.5) == 2 and n_eps(0.1) == 4
    a, b = harmonic_exponents(0.5, 0.5)
    ok &= abs(a - math.log(3.5) / math.log(2)) < 1e-12 and abs(b - math.log(1.5) / math.log(2)) < 1e-12
    return bool(ok), "N_eps examples, harmonic exponents"


SUITES = [("geometry", _geometry), ("regions", _regions), ("blaschke", _blaschke),
          ("dbar", _dbar), ("cutoff", _cutoff), ("runge", _runge)]


def run_suites(seed=0):
    out = []
    for name, fn in SUITES:
        ok, detail = fn(np.random.default_rng(seed))
        out.append((name, ok, detail))
    return out
