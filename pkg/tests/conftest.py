from fractions import Fraction

import pytest
from hypothesis import strategies as st

from qads.cyclo import make_field

FIELD_MS = (6, 8, 10, 12)


def rationals(max_den=7, bound=9):
    return st.builds(
        Fraction,
        st.integers(-bound, bound),
        st.integers(1, max_den),
    )


@st.composite
def elements(draw, M=None):
    M = draw(st.sampled_from(FIELD_MS)) if M is None else M
    F = make_field(M)
    cs = draw(st.lists(rationals(), min_size=F.degree, max_size=F.degree))
    return F.from_coeffs(cs)


@pytest.fixture(scope="session")
def small_towers():
    from qads.sphere import get_tower

    return {(D, M): get_tower(D, M, 1, 10**12) for D, M in [(2, 6), (2, 8), (3, 6), (3, 8), (4, 10)]}
