import pytest

from hrunge.regions import Disk
from hrunge.runge import PlanConfig, plan_base


@pytest.fixture(scope="session")
def radial():
    K, U = Disk(0, 0.3), Disk(0, 0.7, closed=False)
    cfg = PlanConfig(margin=0.13, pitch=1 / 128)
    return K, U, cfg, plan_base(K, U, cfg)


@pytest.fixture(scope="session")
def small_bidisk():
    K, U = Disk(0, 0.4), Disk(0, 0.6, closed=False)
    cfg = PlanConfig(margin=0.065, pitch=1 / 64)
    return K, U, cfg, plan_base(K, U, cfg)
