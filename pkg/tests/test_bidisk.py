import numpy as np
import pytest

from hrunge.bidisk import BidiskScenario, approximate_bidisk, approximate_bidisk_entire
from hrunge.regions import Disk
from hrunge.runge import HullFunction, VectorFunction, apply_L, sup_error_L


def scenario(bd, f, eps, m=1):
    K, U, cfg, _ = bd
    return BidiskScenario(K, K, U, U, f, eps, m, cfg)


@pytest.fixture(scope="module")
def quarter(small_bidisk):
    s = scenario(small_bidisk, lambda a, b: 1 / (a + b - 1.3), 1 / 4)
    return approximate_bidisk(s, small_bidisk[3], small_bidisk[3])


def test_denominator_is_product(quarter):
    z1 = np.array([0.1, -0.2j, 0.3])
    z2 = np.array([0.05, 0.35j])
    assert np.array_equal(quarter.b(z1, z2), quarter.b1(z1)[:, None] * quarter.b2(z2)[None, :])
    assert np.array_equal(quarter.b1.zeros, quarter.op1.zeros)
    assert np.isfinite(quarter.log_inf_b())


def test_error_and_holomorphy(quarter):
    err, (w1, w2) = quarter.sup_error()
    assert err < 1 / 4
    assert abs(w1) <= 0.4 + 1e-12 and abs(w2) <= 0.4 + 1e-12
    assert max(quarter.holomorphy_residual()) <= 1e-3


def test_h_is_b_times_q(quarter):
    z = 0.985 * np.exp(1j * np.array([0.3, 2.0]))
    b = quarter.b(z, z)
    assert np.all(np.abs(b) > 1e-250)
    assert np.allclose(quarter.h(z, z)[..., 0], b * quarter.q(z, z)[..., 0], rtol=1e-9, atol=0)


def test_error_decays(small_bidisk, quarter):
    s = scenario(small_bidisk, lambda a, b: 1 / (a + b - 1.3), 1 / 16)
    fine = approximate_bidisk(s, small_bidisk[3], small_bidisk[3])
    assert fine.sup_error()[0] < quarter.sup_error()[0] / 4


def test_constant_function(small_bidisk):
    s = scenario(small_bidisk, lambda a, b: 2.5 + 0 * (a + b), 1 / 8)
    r = approximate_bidisk(s, small_bidisk[3], small_bidisk[3])
    assert r.degenerate
    assert r.sup_error()[0] < 1 / 8


def test_separable_degenerates_to_one_variable(small_bidisk):
    K, U, cfg, base = small_bidisk
    s = scenario(small_bidisk, lambda a, b: 1 / (a - 0.9) + 0 * b, 1 / 4)
    r = approximate_bidisk(s, base, base)
    assert r.degenerate and len(r.b2) == 0
    one = apply_L(r.op1, VectorFunction(lambda z: 1 / (z - 0.9)))[0]
    assert np.isclose(r.sup_error()[0], sup_error_L(one, s.eval_density)[0], rtol=1e-12)
    assert r.step2_correction_sup() <= 1e-12


def test_vector_valued(small_bidisk):
    f = lambda a, b: np.stack([1 / (a + b - 1.3), a * b], axis=-1)
    s = scenario(small_bidisk, f, 1 / 4, m=2)
    r = approximate_bidisk(s, small_bidisk[3], small_bidisk[3])
    z = np.array([0.1, -0.2j])
    assert r.q(z, z).shape == (2, 2, 2)
    assert r.sup_error()[0] < 1 / 4


def test_entire_version(small_bidisk):
    K, U, cfg, _ = small_bidisk
    hull = [HullFunction(lambda z: z / 0.45)]
    errs = []
    for eps in (1 / 2, 1 / 8):
        s = BidiskScenario(K, K, U, U, lambda a, b: 1 / (a + b - 1.3), eps, 1, cfg)
        r = approximate_bidisk_entire(s, hull, hull)
        assert r.b1 is None
        errs.append(r.sup_error()[0])
    assert errs[0] < 1 / 2 and errs[1] < errs[0] / 4
