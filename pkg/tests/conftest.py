import pytest

from kdvcm import manifold, reduced, spectral


@pytest.fixture(scope="session")
def eigen_pair():
    return spectral.build_eigen_pair()


@pytest.fixture(scope="session")
def sources(eigen_pair):
    return manifold.build_sources(eigen_pair)


@pytest.fixture(scope="session")
def basis():
    return manifold.fundamental_basis()


@pytest.fixture(scope="session")
def f_plus(sources, basis):
    return manifold.solve_f_plus(sources, basis)


@pytest.fixture(scope="session")
def f_minus(sources, basis):
    return manifold.solve_f_minus(sources, basis=basis)


@pytest.fixture(scope="session")
def manifold_coeffs(f_plus, f_minus, sources):
    return manifold.assemble(f_plus, f_minus, sources)


@pytest.fixture(scope="session")
def reduced_model(manifold_coeffs, eigen_pair):
    return reduced.build_reduced_model(manifold_coeffs, eigen_pair)


@pytest.fixture(scope="session")
def bvp_solution(eigen_pair):
    return manifold.bvp_oracle(eigen_pair, grid_size=2000)
