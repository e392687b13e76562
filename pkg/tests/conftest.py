from fractions import Fraction

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def burau(n, letters, t=Fraction(2)):
    """Unreduced Burau matrix at a rational t, as a tuple of row tuples.

    A homomorphism built without any braid machinery, so equal braids must
    give equal matrices.
    """
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for x in letters:
        i = abs(x) - 1
        if x > 0:
            block = ((1 - t, t), (1, 0))
        else:
            block = ((0, 1), (1 / t, 1 - 1 / t))
        for row in m:
            a, b = row[i], row[i + 1]
            row[i] = a * block[0][0] + b * block[1][0]
            row[i + 1] = a * block[0][1] + b * block[1][1]
    return tuple(tuple(r) for r in m)


@pytest.fixture
def b4():
    from braidcomm.braid import BraidGroup

    return BraidGroup(4)
