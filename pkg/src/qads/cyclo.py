"""Exact arithmetic in the cyclotomic field Q(zeta), zeta = e^{i pi / M}.

Elements are stored as rational polynomials in zeta reduced modulo the
2M-th cyclotomic polynomial, so equality is coefficient equality.  The hot
linear algebra elsewhere in the package works directly on the underlying
``fmpq_poly`` objects; :class:`CycloScalar` is the user-facing wrapper.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache

from flint import arb, ctx, fmpq, fmpq_poly, fmpz_poly

from .errors import CertificationError, DomainError, ParameterError

DEFAULT_INITIAL_BITS = 64
DEFAULT_PRECISION_CAP = int(os.environ.get("QADS_PRECISION_CAP", "4096"))


class CycloField:
    """The field Q(zeta) with the embedding zeta -> exp(i*pi/M)."""

    def __init__(self, M: int):
        if not isinstance(M, int) or M < 2:
            raise ParameterError(f"root order M must be an integer >= 2, got {M!r}")
        self.M = M
        self.conductor = 2 * M
        self.modulus = fmpq_poly(fmpz_poly.cyclotomic(2 * M).coeffs())
        self.degree = self.modulus.degree()
        self.zero_poly = fmpq_poly([])
        self.one_poly = fmpq_poly([1])
        self._powers = [self.reduce(fmpq_poly([0] * k + [1])) for k in range(2 * M)]
        # conj(zeta^k) = zeta^{2M-k}
        self._conj_basis = [self._powers[(-k) % (2 * M)] for k in range(self.degree)]

    def __repr__(self):
        return f"CycloField(M={self.M})"

    def __eq__(self, other):
        return isinstance(other, CycloField) and other.M == self.M

    def __hash__(self):
        return hash(("CycloField", self.M))

    def __reduce__(self):
        return (make_field, (self.M,))

    # raw-polynomial layer ------------------------------------------------

    def reduce(self, p: fmpq_poly) -> fmpq_poly:
        if p.degree() < self.degree:
            return p
        return p % self.modulus

    def mul(self, a: fmpq_poly, b: fmpq_poly) -> fmpq_poly:
        p = a * b
        if p.degree() < self.degree:
            return p
        return p % self.modulus

    def inv(self, a: fmpq_poly) -> fmpq_poly:
        if a.is_zero():
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        g, s, _ = a.xgcd(self.modulus)
        if g != 1:
            raise ZeroDivisionError("element is not invertible (modulus not irreducible?)")
        return s

    def power(self, k: int) -> fmpq_poly:
        """zeta**k as a reduced polynomial (any integer k)."""
        return self._powers[k % (2 * self.M)]

    def conj_poly(self, a: fmpq_poly) -> fmpq_poly:
        out = fmpq_poly([])
        for k, c in enumerate(a.coeffs()):
            if c != 0:
                out += c * self._conj_basis[k]
        return out

    def qnum_poly(self, n: int, base: int = 1) -> fmpq_poly:
        """[n] for the deformation parameter zeta**base."""
        if n == 0:
            return self.zero_poly
        if n < 0:
            return -self.qnum_poly(-n, base)
        # [n]_t = t^{n-1} + t^{n-3} + ... + t^{1-n}
        out = fmpq_poly([])
        for j in range(n):
            out += self.power(base * (n - 1 - 2 * j))
        return out

    def approx_poly(self, a: fmpq_poly) -> complex:
        import cmath

        z = cmath.exp(1j * cmath.pi / self.M)
        return complex(sum((float(c) * z**k for k, c in enumerate(a.coeffs())), 0j))

    def sign_poly(self, a: fmpq_poly, cap: int | None = None) -> int:
        """Certified sign of a real element under the distinguished embedding."""
        if a.is_zero():
            return 0
        if self.conj_poly(a) != a:
            raise DomainError("sign requested for an element outside the real subfield")
        cap = DEFAULT_PRECISION_CAP if cap is None else cap
        coeffs = a.coeffs()
        bits = min(DEFAULT_INITIAL_BITS, cap)
        old = ctx.prec
        try:
            while True:
                ctx.prec = bits
                # imaginary parts cancel for real elements: sum c_k cos(pi k / M)
                val = arb(0)
                for k, c in enumerate(coeffs):
                    if c != 0:
                        val += arb(c) * arb.cos_pi_fmpq(fmpq(k, self.M))
                if val > 0:
                    return 1
                if val < 0:
                    return -1
                if bits >= cap:
                    raise CertificationError(
                        f"could not certify sign within {cap} bits (value {val})"
                    )
                bits = min(2 * bits, cap)
        finally:
            ctx.prec = old

    # scalar layer --------------------------------------------------------

    def __call__(self, value) -> "CycloScalar":
        if isinstance(value, CycloScalar):
            if value.field != self:
                raise DomainError("scalar belongs to a different field")
            return value
        if isinstance(value, fmpq_poly):
            return CycloScalar(self, self.reduce(value))
        if isinstance(value, Fraction):
            value = fmpq(value.numerator, value.denominator)
        return CycloScalar(self, fmpq_poly([value]))

    @property
    def zeta(self) -> "CycloScalar":
        return CycloScalar(self, self.power(1))

    q = zeta

    def zero(self) -> "CycloScalar":
        return CycloScalar(self, self.zero_poly)

    def one(self) -> "CycloScalar":
        return CycloScalar(self, self.one_poly)

    def qpow(self, k: int) -> "CycloScalar":
        return CycloScalar(self, self.power(k))

    def from_coeffs(self, coeffs) -> "CycloScalar":
        vals = [fmpq(Fraction(c).numerator, Fraction(c).denominator) for c in coeffs]
        return CycloScalar(self, self.reduce(fmpq_poly(vals)))


class CycloScalar:
    """Immutable element of a :class:`CycloField`."""

    __slots__ = ("field", "poly")

    def __init__(self, field: CycloField, poly: fmpq_poly):
        self.field = field
        self.poly = poly

    def _coerce(self, other) -> fmpq_poly | None:
        if isinstance(other, CycloScalar):
            if other.field != self.field:
                raise DomainError("mixing scalars from different cyclotomic fields")
            return other.poly
        if isinstance(other, (int, fmpq)):
            return fmpq_poly([other])
        if isinstance(other, Fraction):
            return fmpq_poly([fmpq(other.numerator, other.denominator)])
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloScalar(self.field, self.poly + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloScalar(self.field, self.poly - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloScalar(self.field, o - self.poly)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloScalar(self.field, self.field.mul(self.poly, o))

    __rmul__ = __mul__

    def __neg__(self):
        return CycloScalar(self.field, -self.poly)

    def inverse(self) -> "CycloScalar":
        return CycloScalar(self.field, self.field.inv(self.poly))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloScalar(self.field, self.field.mul(self.poly, self.field.inv(o)))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloScalar(self.field, self.field.mul(o, self.field.inv(self.poly)))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one_poly
        base = self.poly
        while k:
            if k & 1:
                out = self.field.mul(out, base)
            base = self.field.mul(base, base)
            k >>= 1
        return CycloScalar(self.field, out)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.poly == o

    def __hash__(self):
        return hash((self.field.M, tuple(str(c) for c in self.poly.coeffs())))

    def __bool__(self):
        return not self.poly.is_zero()

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def conj(self) -> "CycloScalar":
        return CycloScalar(self.field, self.field.conj_poly(self.poly))

    def is_real(self) -> bool:
        return self.field.conj_poly(self.poly) == self.poly

    def sign(self, cap: int | None = None) -> int:
        return self.field.sign_poly(self.poly, cap)

    def coeffs(self) -> list[Fraction]:
        """Rational coefficients in the power basis 1, zeta, ..., zeta^{d-1}."""
        cs = [Fraction(int(c.p), int(c.q)) for c in self.poly.coeffs()]
        return cs + [Fraction(0)] * (self.field.degree - len(cs))

    def __complex__(self):
        return self.field.approx_poly(self.poly)

    def approx(self, digits: int = 20) -> complex:
        import mpmath

        with mpmath.workdps(digits + 10):
            z = mpmath.exp(1j * mpmath.pi / self.field.M)
            val = mpmath.fsum(mpmath.mpf(int(c.p)) / int(c.q) * z**k for k, c in enumerate(self.poly.coeffs()))
            return complex(val)

    def __repr__(self):
        return f"CycloScalar(M={self.field.M}, {self.poly.str(var='q')})"


@lru_cache(maxsize=None)
def make_field(M: int) -> CycloField:
    return CycloField(M)


def qnum(n: int, field: CycloField, base: int = 1) -> CycloScalar:
    """The q-number [n] = (t^n - t^-n)/(t - t^-1) with t = zeta**base."""
    return CycloScalar(field, field.qnum_poly(n, base))


def conj(x: CycloScalar) -> CycloScalar:
    return x.conj()


def sign_of_real(x: CycloScalar, cap: int | None = None) -> int:
    return x.sign(cap)
