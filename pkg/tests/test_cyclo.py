import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import elements
from qads.cyclo import conj, make_field, qnum, sign_of_real
from qads.errors import CertificationError, DomainError


def _totient(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


@pytest.mark.parametrize("M", [2, 3, 5, 6, 8, 9, 10, 12])
def test_degree_is_totient(M):
    assert make_field(M).degree == _totient(2 * M)


@pytest.mark.parametrize("M", [6, 8, 10])
def test_root_of_unity(M):
    F = make_field(M)
    q = F.zeta
    assert q ** (2 * M) == F.one()
    assert q**M == -F.one()
    for k in range(1, 2 * M):
        assert q**k != F.one()


@pytest.mark.parametrize("M", [6, 8, 12])
def test_qnumber_symmetry_and_zeros(M):
    F = make_field(M)
    assert qnum(M, F).is_zero()
    assert qnum(0, F).is_zero()
    assert qnum(1, F) == F.one()
    for n in range(M + 1):
        assert qnum(M - n, F) == qnum(n, F)
    for n in range(1, M):
        assert qnum(n, F).sign() == 1
    for n in range(M + 1, 2 * M):
        assert qnum(n, F).sign() == -1


def test_qnumber_matches_sine_ratio():
    F = make_field(10)
    for n in range(12):
        x = qnum(n, F).approx(30)
        assert abs(x - math.sin(math.pi * n / 10) / math.sin(math.pi / 10)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_field_axioms(data):
    M = data.draw(st.sampled_from([6, 8, 10, 12]))
    a, b, c = (data.draw(elements(M)) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == make_field(M).one()


@settings(max_examples=200, deadline=None)
@given(elements())
def test_conjugation(a):
    assert conj(conj(a)) == a
    assert (a * a.conj()).is_real()
    assert abs(complex(a.conj()) - complex(a).conjugate()) < 1e-6 * (1 + abs(complex(a)))


@settings(max_examples=150, deadline=None)
@given(elements())
def test_sign_agrees_with_high_precision(a):
    r = a + a.conj()
    with mpmath.workdps(200):
        z = mpmath.exp(1j * mpmath.pi / r.field.M)
        v = mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * z**k for k, c in enumerate(r.coeffs()))
    expected = 0 if r.is_zero() else (1 if v.real > 0 else -1)
    assert sign_of_real(r) == expected


def test_sign_rejects_nonreal():
    F = make_field(8)
    with pytest.raises(DomainError):
        sign_of_real(F.zeta)


def test_sign_of_tiny_value_needs_precision():
    # (q + 1/q) - 2 cos(pi/M) rounded to a nearby rational: small but nonzero
    F = make_field(8)
    approx = Fraction(mpmath.nstr(2 * mpmath.cos(mpmath.pi / 8), 40))
    x = F.zeta + F.zeta.inverse() - approx
    assert x.sign() in (1, -1)
    with pytest.raises(CertificationError):
        x.sign(cap=16)


def test_mixed_fields_rejected():
    with pytest.raises(DomainError):
        make_field(6).one() + make_field(8).one()
