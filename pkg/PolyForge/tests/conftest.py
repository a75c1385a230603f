import pytest

from PolyForge.cosetenum import EnumConfig, enumerate_cosets, standardize
from PolyForge.presets import get_case, group_u
from PolyForge.subgrouppres import certify_free_abelian_rank4


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: large enumerations and long certificates")


@pytest.fixture
def u():
    return group_u()


@pytest.fixture(scope="session")
def case1_table():
    u = group_u()
    return standardize(enumerate_cosets(u, get_case(1).basis(u), EnumConfig(strategy="felsch")))


@pytest.fixture(scope="session")
def case1_coordinates(case1_table):
    u = group_u()
    return certify_free_abelian_rank4(u, case1_table, get_case(1).basis(u))


@pytest.fixture
def presentation_file(tmp_path):
    """Write a presentation file and return its path."""
    def _write(text: str) -> str:
        path = tmp_path / "group.txt"
        path.write_text(text)
        return str(path)
    return _write


@pytest.fixture(scope="session")
def case_coordinates(case1_coordinates):
    """Coordinate maps by case id, built on first use and kept for the session."""
    built = {1: case1_coordinates}

    def get(case_id):
        if case_id not in built:
            u = group_u()
            basis = get_case(case_id).basis(u)
            table = standardize(enumerate_cosets(u, basis))
            built[case_id] = certify_free_abelian_rank4(u, table, basis)
        return built[case_id]

    return get
