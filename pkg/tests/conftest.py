import pytest

from sigma_forge.curve_expansions import SYMBOLIC, CurveKit, CurveParams
from sigma_forge.sigma_engine import SigmaKit

# the numeric curve used wherever a symbolic run would be too slow
SAMPLE = CurveParams.numeric([1, 2, 3, 4, 6])
# y^2 + y = x^3, with the rational 3-torsion point (0, 0)
Y2_PLUS_Y = CurveParams.numeric([0, 0, 1, 0, 0])
ZERO_CURVE = CurveParams.numeric([0, 0, 0, 0, 0])


@pytest.fixture(scope="session")
def curve():
    return CurveKit(SYMBOLIC, 16)


@pytest.fixture(scope="session")
def kit():
    return SigmaKit(SYMBOLIC, 14)


@pytest.fixture(scope="session")
def sample_kit():
    return SigmaKit(SAMPLE, 20)
