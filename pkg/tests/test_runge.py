import math

import numpy as np
import pytest

from hrunge.blaschke import (C_SPLIT, FiniteBlaschke, carleson_delta, equal_spacing_product,
                             perturbed_delta_bound)
from hrunge.dbar import WeightedDensity, make_grid, solve
from hrunge.errors import DomainError, HullError
from hrunge.geometry import rho
from hrunge.regions import Disk
from hrunge.runge import (HullFunction, PlanConfig, ProbeCircle, VectorFunction, apply_E, apply_L,
                          check_factor_margins, default_probe_circles, delta_bracket,
                          error_budget_L, harmonic_exponents, holomorphy_residual, n_eps, plan,
                          plan_E, sup_error_E, sup_error_L, sup_norm_E, verify_harmonic_comparison,
                          verify_universality)

F = VectorFunction(lambda z: 1 / (z - 0.8))


@pytest.fixture(scope="module")
def p8(radial):
    K, U, cfg, base = radial
    return plan(K, U, 1 / 8, cfg, base=base)


@pytest.fixture(scope="module")
def hull_plan():
    K, U = Disk(0, 0.5), Disk(0, 0.97, closed=False)
    cfg = PlanConfig(margin=0.15, pitch=1 / 128)
    return plan_E(K, U, [HullFunction(lambda z: z / 0.6)], 1 / 8, cfg)


def test_n_eps():
    assert n_eps(0.5) == 2 and n_eps(0.1) == 4
    assert n_eps(0.25 + 1e-12) == 2 and n_eps(0.25) == 3
    with pytest.raises(DomainError):
        n_eps(1.0)


def test_plan_base_invariants(radial):
    K, U, cfg, base = radial
    assert base.frak_e == base.frak_d / 4 and base.lam <= 1 / 16
    for part in base.parts:
        d = carleson_delta(part)
        assert d >= C_SPLIT
        assert 2 * base.lam / (1 + base.lam ** 2) < d
        assert perturbed_delta_bound(d, base.lam) >= 0.99
    assert sum(len(p) for p in base.parts) == len(base.chain)
    assert len(base.cell_part) == len(base.grid) and np.all(np.diff(base.cell_part) >= 0)


def test_plan_invariants(p8):
    assert p8.N == 4 and len(p8.zeros) == 4 * len(p8.chain)
    assert p8.checks["min_system_delta"] >= 0.99
    assert p8.checks["rho_zeros_K"] > 0
    assert np.isclose(p8.checks["radius"], p8.checks["radius_from_d"])
    assert np.isclose(p8.C, p8.k * p8.M * p8.g_sup)
    assert np.isclose(p8.d, math.log2(4 / (5 * p8.frak_e)))
    # every point system lies on the pseudo-circle of radius e/4 about its chain point
    for part, sys in zip(p8.parts, p8.systems):
        assert np.allclose(rho(sys, part[None, :]), p8.lam)


def test_factor_margins(p8):
    fm = check_factor_margins(p8, density=1e-2)
    assert fm.ok and fm.sup_margin > 0 and fm.inf_margin > 0


def test_single_factor_modulus_is_rho():
    a = 0.5 - 0.2j
    z = np.array([0.1, -0.3j, 0.7])
    assert np.allclose(np.abs(FiniteBlaschke([a])(z)), rho(z, a))


def test_apply_L_zero(p8):
    res, B = apply_L(p8, VectorFunction(lambda z: np.zeros_like(z)))
    z = np.array([0.1, 0.5, 0.9j])
    assert np.all(res.q(z) == 0) and np.all(res.h(z) == 0)
    assert len(B) == len(p8.zeros)


def test_apply_L_constant(p8):
    res, _ = apply_L(p8, VectorFunction(lambda z: np.ones_like(z)))
    err, _ = sup_error_L(res)
    assert err <= p8.C * p8.eps
    assert err <= error_budget_L(res)[0]


def test_h_equals_B_times_q_where_B_is_representable(p8):
    res, B = apply_L(p8, F)
    z = 0.985 * np.exp(1j * np.linspace(0, 6, 9))
    Bz = B(z)
    assert np.all(np.abs(Bz) > 1e-200)
    assert np.allclose(res.h(z)[:, 0], Bz * res.q(z)[:, 0], rtol=1e-9, atol=0)


def test_error_within_budget_and_holomorphic(radial, p8):
    K, U, cfg, base = radial
    res, _ = apply_L(p8, F)
    err, _ = sup_error_L(res)
    budget, sups = error_budget_L(res)
    assert err <= budget and len(sups) == p8.k
    circles = default_probe_circles(p8.pair, K, cfg.pitch, cfg.density)
    assert len(circles) == 2
    assert max(holomorphy_residual(res.holomorphic_part, circles)) <= 1e-4


def test_holomorphy_residual_controls():
    circle = ProbeCircle(0, 0.5, np.array([0, 0.1, -0.2j]))
    assert holomorphy_residual(lambda z: 3 * z ** 4 - z + 2j, [circle])[0] <= 1e-12
    # a bare d-bar solution is not holomorphic across its support
    sup = Disk(0, 0.25)
    Fs = solve(WeightedDensity(sup, lambda w: np.ones(len(w))), make_grid(sup, 1 / 64))
    crossing = ProbeCircle(0, 0.3, np.array([0.1, -0.05j]))
    assert holomorphy_residual(Fs, [crossing])[0] > 1e-2


def test_error_decreases_with_eps(radial):
    K, U, cfg, base = radial
    errs = [sup_error_L(apply_L(plan(K, U, e, cfg, base=base), F)[0])[0] for e in (1 / 2, 1 / 8)]
    assert errs[1] < errs[0] / 4


def test_harmonic_exponents():
    a, b = harmonic_exponents(0.5, 0.5)
    assert np.isclose(a, math.log(3.5) / math.log(2), atol=1e-12)
    assert np.isclose(b, math.log(1.5) / math.log(2), atol=1e-12)
    assert a > 1 > b
    with pytest.raises(DomainError):
        harmonic_exponents(1.0, 0.5)


def test_harmonic_comparison():
    assert verify_harmonic_comparison(0, 0.1, 0.4, 0.25)[0]
    assert verify_harmonic_comparison(0.3j, 0.3j, 0.5, 0.5)[0]
    # 1D scan along the real axis
    a, b = harmonic_exponents(0.4, 0.25)
    y = np.linspace(0.4, 0.999, 500)
    assert np.all(rho(y, 0) ** a <= rho(y, 0.1) * (1 + 1e-12))
    assert np.all(rho(y, 0.1) <= rho(y, 0) ** b * (1 + 1e-12))
    with pytest.raises(DomainError):
        verify_harmonic_comparison(0, 0.5, 0.4, 0.25)


def test_delta_bracket(radial):
    K, U, cfg, base = radial
    for e in (1 / 4, 1 / 8, 1 / 16):
        br = delta_bracket(plan(K, U, e, cfg, base=base))
        assert br.ok and br.log_lower <= br.log_measured <= br.log_upper + 1e-9


def test_plan_E(hull_plan):
    ep = hull_plan
    assert ep.r > 1 and np.isclose(ep.r, 0.65 / 0.6, rtol=1e-2)
    assert ep.n == math.floor(math.log(8) / math.log(ep.r)) + 1
    assert np.isclose(ep.d1, math.log(ep.R / ep.r) / math.log(ep.r))
    assert math.floor(math.log(10) / math.log(4 / 3)) + 1 == 9


def test_plan_E_small_n():
    K, U = Disk(0, 0.5), Disk(0, 0.97, closed=False)
    ep = plan_E(K, U, [lambda z: z / 0.6], 0.95, PlanConfig(margin=0.15, pitch=1 / 64))
    assert ep.n == 1


def test_plan_E_rejects_bad_hulls():
    K, U = Disk(0, 0.5), Disk(0, 0.97, closed=False)
    cfg = PlanConfig(margin=0.15, pitch=1 / 64)
    with pytest.raises(HullError):
        plan_E(K, U, [lambda z: z / 2], 0.25, cfg)
    with pytest.raises(HullError):
        plan_E(K, U, [lambda z: z / 0.4], 0.25, cfg)


def test_apply_E(hull_plan):
    ep = hull_plan
    zero = apply_E(ep, VectorFunction(lambda z: np.zeros_like(z)))
    assert np.all(zero(np.array([0.1, 0.7])) == 0)
    one = apply_E(ep, VectorFunction(lambda z: np.ones_like(z)))
    assert sup_error_E(one)[0] <= ep.C0 * ep.eps
    res = apply_E(ep, VectorFunction(lambda z: 1 / (z - 1.2)))
    assert sup_error_E(res)[0] < 1e-2
    assert np.isfinite(sup_norm_E(res))
    circles = default_probe_circles(ep.pair, ep.K, ep.config.pitch, ep.config.density)
    assert max(holomorphy_residual(lambda z: res(z, singular=False), circles)) <= 1e-4


def test_universality(p8, hull_plan):
    f = VectorFunction(lambda z: np.stack([1 / (z - 0.8), z ** 2, np.exp(z)], axis=-1), 3)
    rng = np.random.default_rng(0)
    pts = np.array([0, 0.2, -0.1j, 0.5 + 0.1j, 0.8j])
    for T in (np.eye(3), np.eye(3)[[1]], rng.standard_normal((2, 3))):
        assert verify_universality(lambda g: apply_L(p8, g)[0].q, f, T, pts) <= 1e-10
        assert verify_universality(lambda g: apply_E(hull_plan, g), f, T, pts) <= 1e-10
