import pytest

import juliarand as jr

H = 1.00735


@pytest.fixture(scope="session")
def qmap18():
    return jr.QuadraticMap(0.125)


@pytest.fixture(scope="session")
def qmap0():
    return jr.QuadraticMap(0.0)


@pytest.fixture(scope="session")
def z018(qmap18):
    return jr.find_repelling_fixed_point(qmap18)


@pytest.fixture(scope="session")
def cover5(qmap18):
    return jr.borel_centers(qmap18, 5)


@pytest.fixture(scope="session")
def cache5(cover5):
    return jr.density_cache(cover5, H)


@pytest.fixture(scope="session")
def cover8(qmap18):
    return jr.borel_centers(qmap18, 8)


@pytest.fixture(scope="session")
def cache8(cover8):
    return jr.density_cache(cover8, H)
