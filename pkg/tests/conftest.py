import numpy as np
import pytest

from btq.symbols import Symbol, X3


def random_symbol(rng, degree=3, nterms=5, real=True):
    """Random integer-coefficient symbol of total degree <= degree.

    Integer coefficients keep the ring operations exact in floating point,
    so algebraic identities can be asserted coefficient-exactly.
    """
    terms = {}
    for _ in range(nterms):
        while True:
            e = tuple(int(x) for x in rng.randint(0, degree + 1, 3))
            if sum(e) <= degree:
                break
        c = int(rng.randint(-3, 4)) or 1
        if not real:
            c = complex(c, int(rng.randint(-3, 4)))
        terms[e] = terms.get(e, 0) + c
    s = Symbol(terms)
    return s if not s.is_zero else X3


def random_point(rng, radius=2.0):
    """Random finite-chart point with |z| <= radius."""
    from btq.geometry import SpherePoint
    z = complex(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
    return SpherePoint.from_z(z)


@pytest.fixture
def rng():
    return np.random.RandomState(12345)
