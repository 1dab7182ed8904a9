import math
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lampolar.compliance import compliance
from lampolar.laminate import Laminate, stiffness_tensors
from lampolar.material import PlyMaterial, t300_5208

settings.register_profile(
    "default", max_examples=60, deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile(
    "stress", max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

LAMINATES = Path(__file__).resolve().parent.parent / "laminates"

FIRST = [0] * 6 + [90] * 6
SECOND = [0, 90, 90, 0, 0, 90, 0, 0, 90, 90, 90, 0]
TWO_PLY = [0, 90]

# Quasi-homogeneous coupled 0/90 reference sequences (the fourth and fifth coincide).
REFERENCE_SEQUENCES = [
    [0, 0, 0, 0, 0, 0, 90, 90, 90, 90, 90, 90],
    [0, 90, 90, 0, 0, 90, 0, 90, 90, 0, 0, 90],
    [0, 0, 90, 90, 0, 90, 0, 90, 0, 0, 90, 90],
    [0, 90, 90, 0, 0, 0, 90, 0, 90, 90, 90, 0],
    [0, 90, 90, 0, 0, 0, 90, 0, 90, 90, 90, 0],
    [0, 90, 90, 0, 0, 90, 0, 0, 90, 90, 90, 0],
]


def rel_close(got, expected, rel):
    return abs(got - expected) <= rel * abs(expected)


def max_rel(x, y, scale=None):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    s = scale if scale is not None else max(np.max(np.abs(y)), np.max(np.abs(x)), 1e-300)
    return float(np.max(np.abs(x - y)) / s)


@pytest.fixture(scope="session")
def t300():
    return t300_5208()


@pytest.fixture(scope="session")
def glass():
    return PlyMaterial("E-glass/epoxy", 38600, 8270, 4140, 0.26, 8.6e-6, 22.1e-6)


def _bundle(material, angles):
    lam = Laminate.from_angles(material, angles)
    s = stiffness_tensors(lam)
    return lam, s, compliance(s)


@pytest.fixture(scope="session")
def first(t300):
    return _bundle(t300, FIRST)


@pytest.fixture(scope="session")
def second(t300):
    return _bundle(t300, SECOND)


@pytest.fixture(scope="session")
def two_ply(t300):
    return _bundle(t300, TWO_PLY)


def random_material(rng):
    """Orthotropic ply with random but physical constants."""
    E1 = rng.uniform(2e4, 2.5e5)
    E2 = rng.uniform(3e3, 0.6 * E1)
    G12 = rng.uniform(0.15, 0.6) * E2
    nu12 = rng.uniform(0.15, 0.4)
    a1 = rng.uniform(-2e-6, 1e-5)
    a2 = rng.uniform(1e-5, 5e-5)
    return PlyMaterial("random", E1, E2, G12, nu12, a1, a2)


def random_angles(rng, n, discrete=False):
    if discrete:
        return list(rng.choice([0.0, 90.0, 45.0, -45.0, 30.0, -60.0], size=n))
    return list(rng.uniform(-90.0, 90.0, size=n))


def deg(x):
    return math.degrees(x)
