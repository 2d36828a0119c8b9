import pytest

from phivar import critical, tent, trig


@pytest.fixture
def takagi2():
    """Tent base, b=2, alpha=+1/2 (the classical Takagi function)."""
    return critical(tent(), 2, 1)


@pytest.fixture
def takagi3_plus():
    return critical(tent(), 3, 1)


@pytest.fixture
def takagi3_minus():
    return critical(tent(), 3, -1)


@pytest.fixture
def weier2():
    """Trig(1, 0) base, b=2, alpha=+1/2."""
    return critical(trig(1, 0), 2, 1)
