import pytest

from constructions import build
from exactalg import Polynomial, prime_field
from morphism import Morphism
from spaces import SpaceDescriptor


@pytest.fixture
def phi1():
    return build("wps_phi1", weights=(1, 6, 10, 15))


@pytest.fixture
def square_map():
    """[x0^2 : x1^2] on P1, the standard non-injective map."""
    space = SpaceDescriptor.product(1)
    x = Polynomial.variables(space.shape)[0]
    return Morphism(space, (x[0] ** 2, x[1] ** 2), label="squares")


@pytest.fixture
def f5():
    return prime_field(5)


@pytest.fixture
def clean_env():
    """An explicit environment so tests never read a developer's .env."""
    return {}
