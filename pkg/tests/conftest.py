import math
import os

import pytest

from affine_flips.builders import (
    build_big_cylinder,
    build_dilation_torus,
    build_hex_torus,
    build_square_torus,
    build_star_sphere,
    build_two_cylinder_fixture,
)
from affine_flips.surface_file import EXTENSION, load_surface

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")
FIXTURE_FILES = sorted(
    os.path.join(FIXTURES, name) for name in os.listdir(FIXTURES) if name.endswith(EXTENSION)
)


@pytest.fixture
def square():
    return build_square_torus()


@pytest.fixture
def hexagonal():
    return build_hex_torus()


@pytest.fixture
def dilation():
    return build_dilation_torus(math.pi / 3, 2.0)


@pytest.fixture
def wide_dilation():
    return build_dilation_torus(0.9 * math.pi, 2.0)


@pytest.fixture
def star():
    return build_star_sphere((0.8 * math.pi,) * 3, (1.0, 2.0, 0.5))


@pytest.fixture
def big():
    return build_big_cylinder(1.2 * math.pi, 2.0, 3)


@pytest.fixture
def two_cylinders():
    return build_two_cylinder_fixture()


@pytest.fixture
def square_file():
    return os.path.join(FIXTURES, "square_torus.surface")


@pytest.fixture
def fixture_surface():
    def load(name):
        return load_surface(os.path.join(FIXTURES, name))

    return load
