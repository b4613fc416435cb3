import numpy as np
import pytest

from weylforge import charts


@pytest.fixture(scope="session")
def catalog():
    return charts.build_catalog()


@pytest.fixture(scope="session")
def cp_schwarzschild(catalog):
    return charts.curvature_at(catalog["schwarzschild"], [4.0, 1.2, 0.8, 0.3],
                               depth=2)


@pytest.fixture(scope="session")
def cp_sds(catalog):
    return charts.curvature_at(catalog["schwarzschild-de-sitter"],
                               [5.0, 1.0, 1.1, 0.4], depth=3,
                               laplacians=("dw",))


@pytest.fixture(scope="session")
def cp_cp2(catalog):
    return charts.curvature_at(catalog["cp2-fubini-study"],
                               [0.2, -0.1, 0.15, 0.3], depth=1)


@pytest.fixture(scope="session")
def cp_s2xs2(catalog):
    return charts.curvature_at(catalog["s2xs2-equal"], [0.9, 1.1, 1.3, 0.7],
                               depth=2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
