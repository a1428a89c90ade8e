import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrunge.errors import DomainError
from hrunge.geometry import (DiskPoint, PseudoDisk, euclidean_realization, mobius_image, rho,
                             rho_triangle_bounds)


def disk_points(radius=0.99):
    return st.builds(lambda r, t: radius * np.sqrt(r) * np.exp(2j * np.pi * t),
                     st.floats(0, 1), st.floats(0, 1))


def test_rho_examples():
    assert rho(0.3 + 0.1j, 0.3 + 0.1j) == 0
    assert np.isclose(rho(0, 0.4 - 0.2j), abs(0.4 - 0.2j))
    assert np.isclose(rho(0.5, -0.5), 0.8)


def test_rho_rejects_boundary_points():
    with pytest.raises(DomainError):
        rho(1.0, 0.2)
    with pytest.raises(DomainError):
        rho(0.2, 1 - 1e-13)
    with pytest.raises(DomainError):
        DiskPoint.from_complex(0.8 + 0.7j)


def test_diskpoint_roundtrip():
    p = DiskPoint.from_complex(0.1 - 0.2j)
    assert complex(p) == 0.1 - 0.2j
    assert np.isclose(rho(p, 0), abs(0.1 - 0.2j))


def test_mobius_examples():
    assert np.isclose(mobius_image(0, 0.3j), 0.3j)
    assert np.isclose(mobius_image(0.4 + 0.1j, 0), 0.4 + 0.1j)
    assert np.isclose(rho(mobius_image(0.3, 0.25j), 0.3), 0.25)
    # boundary points stay on the boundary
    w = np.exp(1j * np.linspace(0, 6, 7))
    assert np.allclose(np.abs(mobius_image(0.5 - 0.2j, w)), 1)


def test_euclidean_realization_examples():
    assert np.allclose(euclidean_realization(PseudoDisk(0, 0.3)), (0, 0.3))
    assert np.allclose(euclidean_realization(PseudoDisk(0.5, 0.5)), (0.4, 0.4))
    c, r = euclidean_realization(PseudoDisk(0.9, 0.1))
    assert np.isclose(c, 0.9 * 0.99 / (1 - 0.01 * 0.81))
    assert np.isclose(r, 0.1 * 0.19 / (1 - 0.0081))


def test_triangle_bounds_examples():
    assert np.allclose(rho_triangle_bounds(0.6, 0), (0.6, 0.6))
    assert np.allclose(rho_triangle_bounds(0.5, 0.5), (0, 0.8))


@given(disk_points(), disk_points())
def test_rho_symmetric(z, w):
    assert abs(rho(z, w) - rho(w, z)) <= 1e-14
    assert 0 <= rho(z, w) < 1


@given(disk_points(0.9), disk_points(0.9), disk_points(0.9))
def test_mobius_invariance(b, u, v):
    assert abs(rho(mobius_image(b, u), mobius_image(b, v)) - rho(u, v)) <= 1e-12


@given(disk_points(), disk_points(), disk_points())
def test_strong_triangle(z, u, y):
    lo, hi = rho_triangle_bounds(rho(z, u), rho(u, y))
    d = rho(z, y)
    assert lo - 1e-12 <= d <= hi + 1e-12


@settings(max_examples=50)
@given(disk_points(0.95), st.floats(0.01, 0.99))
def test_realization_boundary_on_pseudocircle(c, r):
    d = PseudoDisk(c, r)
    ce, re_ = d.euclidean()
    y = ce + re_ * np.exp(2j * np.pi * np.arange(64) / 64)
    assert np.max(np.abs(rho(y, c) - r)) <= 1e-10
    assert np.allclose(rho(d.boundary(32), c), r)
