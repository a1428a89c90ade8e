import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrunge.blaschke import (C_SPLIT, FiniteBlaschke, FiniteSequence, carleson_delta,
                             delta_via_derivative, equal_spacing_product, equally_spaced_system,
                             hoffman_params, log_carleson_delta, perturbed_delta_bound,
                             schwarz_pick_containment, split_count_bound, split_sequence,
                             split_until, verify_sublevel_geometry)
from hrunge.errors import DomainError
from hrunge.geometry import mobius_image, rho


def zero_sets(max_size=12, radius=0.95):
    return st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1,
                    max_size=max_size).map(
        lambda ps: np.array([radius * math.sqrt(r) * np.exp(2j * np.pi * t) for r, t in ps]))


def distinct(z):
    return len(z) == 1 or np.min(rho(z[:, None], z[None, :]) + np.eye(len(z))) > 1e-3


def test_single_zero_at_origin_is_identity():
    B = FiniteBlaschke([0])
    z = np.array([0.1, 0.5j, -0.3 + 0.2j])
    assert np.allclose(B(z), z)


def test_zeros_and_unimodularity():
    a = np.array([0.3, -0.5j, 0.7 + 0.1j, -0.2 - 0.6j])
    B = FiniteBlaschke(a)
    assert np.allclose(B(a), 0)
    circle = np.exp(2j * np.pi * np.arange(256) / 256)
    assert np.max(np.abs(np.abs(B(circle)) - 1)) <= 1e-12
    assert np.all(np.abs(B(0.9 * circle)) < 1)


def test_log_domain_matches_direct_product():
    rng = np.random.default_rng(1)
    a = 0.9 * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
    z = np.array([0.95, -0.2 + 0.97j * 0.9])
    la, ph = FiniteBlaschke(a).log_evaluate(z)
    full = np.ones(2, complex)
    for chunk in np.array_split(a, 4):
        full *= FiniteBlaschke(chunk)(z)
    assert np.allclose(np.exp(la) * ph, full, rtol=1e-10, atol=0)
    assert np.allclose(FiniteBlaschke(a)(z), full, rtol=1e-10, atol=0)


def test_sequences_must_be_distinct():
    with pytest.raises(DomainError):
        FiniteSequence([0.1, 0.1])


def test_carleson_examples():
    assert carleson_delta([0.4j]) == 1
    assert np.isclose(carleson_delta([0, 0.5]), 0.5)
    assert np.isclose(carleson_delta([0.9, -0.9]), 1.8 / 1.81)
    assert delta_via_derivative([0.4j]) == pytest.approx(1)
    assert np.isclose(delta_via_derivative([0, 0.5]), 0.5)


@settings(max_examples=60)
@given(zero_sets())
def test_delta_identity(z):
    if distinct(z):
        assert abs(carleson_delta(z) - delta_via_derivative(z)) <= 1e-10


def test_hoffman_examples():
    valid, r = hoffman_params(0.99, 0.8)
    assert valid and np.isclose(2 * 0.8 / 1.64, 40 / 41)
    assert np.isclose(r, 0.19 / 0.208 * 0.8) and r > 5 / 8
    assert not hoffman_params(0.5, 0.4)[0]
    assert hoffman_params(0.9, 1e-9)[1] < 1e-8


def test_sublevel_single_zero():
    B = FiniteBlaschke([0])
    valid, r = hoffman_params(1.0, 0.3)
    rep = verify_sublevel_geometry(B, 0.3, r)
    assert valid and rep.ok and rep.windings == [1]
    assert np.isclose(rep.min_modulus, 0.3)


def test_sublevel_antipodal_pair():
    B = FiniteBlaschke([0.9, -0.9])
    valid, r = hoffman_params(carleson_delta([0.9, -0.9]), 0.3)
    rep = verify_sublevel_geometry(B, 0.3, r)
    assert valid and rep.ok and rep.windings == [1, 1]


def test_sublevel_fails_for_small_circle():
    B = FiniteBlaschke([0.9, -0.9])
    _, r = hoffman_params(carleson_delta([0.9, -0.9]), 0.3)
    rep = verify_sublevel_geometry(B, 0.4 * r, r)
    assert not rep.ok and rep.witness is not None


def test_schwarz_pick_containment():
    a = np.array([0.5, -0.5, 0.5j])
    d = carleson_delta(a)
    _, r = hoffman_params(d, 0.1)
    assert schwarz_pick_containment(FiniteBlaschke(a), r) < r


def test_perturbed_bound_examples():
    assert np.isclose(perturbed_delta_bound(C_SPLIT, 1 / 16), 0.99, atol=1e-10)
    assert np.isclose(perturbed_delta_bound(0.7, 1e-12), 0.7)
    with pytest.raises(DomainError):
        perturbed_delta_bound(0.5, 0.4)


def test_perturbed_bound_monte_carlo():
    rng = np.random.default_rng(2)
    base = equally_spaced_system(-0.2j, 0.55, 6)
    d = carleson_delta(base)
    lam = 0.05
    bound = perturbed_delta_bound(d, lam)
    for _ in range(200):
        w = lam * np.sqrt(rng.random(6)) * np.exp(2j * np.pi * rng.random(6))
        assert carleson_delta(mobius_image(base, w)) >= bound * (1 - 1e-12)


def test_split_examples():
    a, b = split_sequence([0.1, -0.4j])
    assert len(a) == len(b) == 1
    pts = equally_spaced_system(0, 0.3, 4)
    a, b = split_sequence(pts)
    assert min(carleson_delta(a), carleson_delta(b)) >= math.sqrt(carleson_delta(pts))


@settings(max_examples=40, deadline=None)
@given(zero_sets(12, 0.9))
def test_split_sqrt_bound(z):
    if len(z) >= 2 and distinct(z):
        a, b = split_sequence(z)
        assert len(a) + len(b) == len(z)
        assert min(carleson_delta(a), carleson_delta(b)) >= math.sqrt(carleson_delta(z)) * (1 - 1e-12)


def test_split_large_sequence_uses_local_search():
    rng = np.random.default_rng(3)
    z = 0.8 * np.sqrt(rng.random(40)) * np.exp(2j * np.pi * rng.random(40))
    a, b = split_sequence(z)
    assert min(log_carleson_delta(a), log_carleson_delta(b)) >= 0.5 * log_carleson_delta(z) - 1e-12


@settings(max_examples=30, deadline=None)
@given(zero_sets(12, 0.9))
def test_split_until_count(z):
    if distinct(z):
        parts = split_until(z)
        assert all(carleson_delta(p) >= C_SPLIT for p in parts)
        assert len(parts) <= split_count_bound(carleson_delta(z))
        assert sorted(np.concatenate([p.zeros for p in parts]).tolist(), key=complex.__repr__) == \
            sorted(z.tolist(), key=complex.__repr__)


def test_equally_spaced_system():
    assert np.allclose(equally_spaced_system(0, 0.5, 4), 0.5 * np.array([1, 1j, -1, -1j]))
    c = 0.3 - 0.4j
    p = equally_spaced_system(c, 0.2, 7, phase=0.4)
    assert np.max(np.abs(rho(p, c) - 0.2)) <= 1e-12
    steps = rho(p, np.roll(p, 1))
    assert np.allclose(steps, steps[0])


def test_equal_spacing_examples():
    assert equal_spacing_product(1, 0.4) == 1
    assert np.isclose(equal_spacing_product(2, 0.3), rho(0.3, -0.3))
    assert np.isclose(equal_spacing_product(3, 0.5), 4 / 7)


@given(st.integers(1, 8), st.sampled_from([0.1, 0.3, 0.5, 0.7]))
def test_equal_spacing_brute_force(N, r):
    p = equally_spaced_system(0, r, N)
    brute = np.prod(rho(p[0], p[1:])) if N > 1 else 1.0
    assert abs(brute - equal_spacing_product(N, r)) <= 1e-12
    assert np.isclose(carleson_delta(p), equal_spacing_product(N, r))
