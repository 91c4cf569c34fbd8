import hypothesis
import pytest

from nikodym.field import build_field
from nikodym.geometry import build_geometry

hypothesis.settings.register_profile(
    "desk", deadline=None, max_examples=60, derandomize=True
)
hypothesis.settings.load_profile("desk")


@pytest.fixture(scope="session")
def ctx3():
    return build_field(3, 1)


@pytest.fixture(scope="session")
def ctx5():
    return build_field(5, 1)


@pytest.fixture(scope="session")
def ctx7():
    return build_field(7, 1)


@pytest.fixture(scope="session")
def ctx9():
    return build_field(3, 2)


@pytest.fixture(scope="session")
def ctx11():
    return build_field(11, 1)


@pytest.fixture(scope="session")
def ctx25():
    return build_field(5, 2)


@pytest.fixture(scope="session")
def ctx27():
    return build_field(3, 3)


@pytest.fixture(scope="session")
def ctx81():
    return build_field(3, 4)


@pytest.fixture(scope="session")
def ctx101():
    return build_field(101, 1)


@pytest.fixture(scope="session")
def geom32(ctx3):
    return build_geometry(ctx3, 2)


@pytest.fixture(scope="session")
def geom33(ctx3):
    return build_geometry(ctx3, 3)


@pytest.fixture(scope="session")
def geom52(ctx5):
    return build_geometry(ctx5, 2)


@pytest.fixture(scope="session")
def geom72(ctx7):
    return build_geometry(ctx7, 2)


@pytest.fixture(scope="session")
def geom113(ctx11):
    return build_geometry(ctx11, 3)


@pytest.fixture(scope="session")
def geom252(ctx25):
    return build_geometry(ctx25, 2)
