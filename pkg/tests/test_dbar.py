import numpy as np
import pytest
from scipy.integrate import dblquad

from hrunge.dbar import (Bump, WeightedDensity, cauchy_matrix, cell_integral, kernel_norm_lattice,
                         make_grid, measured_norm, solve, weak_residual)
from hrunge.errors import CoarseGridError
from hrunge.regions import Disk

R0 = 0.25


def indicator(support):
    # phi = f / (1 - |w|^2) is the indicator of the support
    return WeightedDensity(support, lambda w: (1 - np.abs(w) ** 2) * np.ones(len(w)))


def test_cell_integral_matches_dblquad():
    z, c, h = 0.013 + 0.004j, 0.01 + 0.01j, 0.02
    re = dblquad(lambda y, x: (1 / (z - (x + 1j * y))).real,
                 c.real - h / 2, c.real + h / 2, c.imag - h / 2, c.imag + h / 2)[0]
    im = dblquad(lambda y, x: (1 / (z - (x + 1j * y))).imag,
                 c.real - h / 2, c.real + h / 2, c.imag - h / 2, c.imag + h / 2)[0]
    assert np.isclose(cell_integral(z, np.array([c]), h)[0], re + 1j * im, rtol=1e-8)
    # the centre of a cell sees zero by symmetry
    assert abs(cell_integral(c, np.array([c]), h)[0]) < 1e-15


def test_zero_density_gives_zero():
    g = make_grid(Disk(0, R0), 1 / 64)
    F = solve(WeightedDensity(g.support, lambda w: np.zeros(len(w))), g)
    assert np.all(F(np.array([0, 0.1, 0.5j])) == 0)


def test_coarse_grid_rejected():
    with pytest.raises(CoarseGridError):
        make_grid(Disk(0, 0.05), 1 / 32)


def test_grid_area():
    sup = Disk(0, R0)
    g = make_grid(sup, 1 / 128)
    assert abs(len(g) * g.weight - np.pi * R0 ** 2) <= 2 * g.pitch * 2 * np.pi * R0


def test_disk_indicator_closed_form():
    pitch = 1 / 128
    g = make_grid(Disk(0, R0), pitch)
    F = solve(indicator(g.support), g)
    assert np.isclose(F(0.1), 0.1, rtol=1e-2)
    assert np.isclose(F(0.5), R0 ** 2 / 0.5, rtol=1e-2)
    z = np.array([0.05 + 0.1j, -0.15j, 0.4 - 0.3j, -0.6])
    exact = np.where(np.abs(z) < R0, np.conj(z), R0 ** 2 / z)
    assert np.all(np.abs(np.abs(z) - R0) >= 3 * pitch)
    assert np.max(np.abs(F(z) - exact) / np.abs(exact)) <= 0.01


def test_on_lattice_matches_direct_evaluation():
    g = make_grid(Disk(0.1, 0.2), 1 / 64)
    F = solve(indicator(g.support), g)
    pts = g.nodes[::7]
    assert np.allclose(F.on_lattice(pts), F(pts), atol=1e-13)


def test_linearity_and_scaling():
    g = make_grid(Disk(0, R0), 1 / 64)
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal(len(g)), rng.standard_normal(len(g))
    z = np.array([0.1, 0.3j, -0.4])
    Fa = solve(WeightedDensity(g.support, lambda w: a), g)(z)
    Fb = solve(WeightedDensity(g.support, lambda w: b), g)(z)
    Fab = solve(WeightedDensity(g.support, lambda w: 2 * a - 3j * b), g)(z)
    assert np.max(np.abs(Fab - (2 * Fa - 3j * Fb))) <= 1e-12


def test_componentwise_commutation():
    g = make_grid(Disk(0, R0), 1 / 64)
    rng = np.random.default_rng(1)
    phi = rng.standard_normal((len(g), 3)) + 1j * rng.standard_normal((len(g), 3))
    T = rng.standard_normal((2, 3))
    z = np.array([0.05, 0.2 - 0.1j, 0.6j])
    lhs = solve(WeightedDensity(g.support, lambda w: phi), g)(z) @ T.T
    rhs = solve(WeightedDensity(g.support, lambda w: phi @ T.T), g)(z)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_weak_residual_decays():
    sup = Disk(0, R0)
    res = []
    for pitch in (1 / 32, 1 / 64, 1 / 128, 1 / 256):
        g = make_grid(sup, pitch)
        r = weak_residual(solve(indicator(sup), g), indicator(sup), Bump(0.05, 0.5), g)
        assert r <= 5 * pitch
        res.append(r)
    assert all(res[i] >= 2 * res[i + 1] for i in range(3))


def test_weak_residual_holomorphic_field():
    # only the quadrature error of int F dbar(s) dA remains, which is tiny for the smooth bump
    sup = Disk(0, R0)
    zero = WeightedDensity(sup, lambda w: np.zeros(len(w)))
    r = [weak_residual(lambda w: w ** 2 + 1, zero, Bump(0.1j, 0.4), make_grid(sup, p))
         for p in (1 / 64, 1 / 128)]
    assert max(r) <= 1e-7


def test_bump_dbar_matches_finite_difference():
    b = Bump(0.1 + 0.05j, 0.3)
    z = np.array([0.2, 0.05 + 0.2j, -0.1])
    h = 1e-6
    fd = 0.5 * ((b.value(z + h) - b.value(z - h)) + 1j * (b.value(z + 1j * h) - b.value(z - 1j * h))) / (2 * h)
    assert np.allclose(b.dbar(z), fd, atol=1e-8)


def test_measured_norm():
    sup = Disk(0, R0)
    g = make_grid(sup, 1 / 64)
    M = measured_norm(sup, g, probes=16)
    # constant probe: |F(0)| = (1/pi) int 1 / ((1 - |w|^2) |w|) dA
    assert M >= -np.log(1 - R0 ** 2) / R0
    big = Disk(0, 0.35)
    assert measured_norm(big, make_grid(big, 1 / 64), probes=16) >= M
    assert kernel_norm_lattice(g) <= M
    with pytest.raises(ValueError):
        measured_norm(sup, g, probes=5)


def test_point_mass_matrix_has_no_singular_correction():
    g = make_grid(Disk(0, R0), 1 / 32)
    z = g.nodes[:3] + 0.001
    K0 = cauchy_matrix(z, g, singular=False)
    assert np.allclose(K0, (g.weight / np.pi) / (z[:, None] - g.nodes[None, :]))
