import numpy as np
import pytest

from lagrangian_humbilical_library.families import (
    build_extensor, circle_curve, line_curve, pseudo_sphere_curve,
    twisted_curve, unit_sphere_immersion)


@pytest.fixture
def pseudo_sphere():
    '''
    Pseudo-sphere extensor with b = 0.5 in H^3.
    '''
    return build_extensor(pseudo_sphere_curve(0.5), unit_sphere_immersion(3))


@pytest.fixture
def circle_extensor():
    return build_extensor(circle_curve("i"), unit_sphere_immersion(3))


@pytest.fixture
def line_extensor():
    return build_extensor(line_curve(a=0.5), unit_sphere_immersion(3))


@pytest.fixture
def twisted_extensor():
    return build_extensor(twisted_curve(0.5), unit_sphere_immersion(3))


@pytest.fixture
def rng():
    return np.random.default_rng(7)
