from fractions import Fraction

import pytest

from elliptic.family import FCoeffs, build_family, default_budgets
from geometry.model import flop_pair_model, hilb2_model
from geometry.stab import stab_ell

PROPERTY_A_SLOPES = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


@pytest.fixture(scope="session")
def model():
    return hilb2_model()


@pytest.fixture(scope="session")
def flop_model():
    return flop_pair_model()


@pytest.fixture(scope="session")
def stab(model):
    return stab_ell(model, 2)


@pytest.fixture(scope="session")
def minimal_family(model):
    return build_family(FCoeffs.from_preset("minimal"), 2, default_budgets(PROPERTY_A_SLOPES), model)


@pytest.fixture(scope="session")
def theta_family(model):
    return build_family(FCoeffs.from_preset("theta"), 2, default_budgets(PROPERTY_A_SLOPES), model)
