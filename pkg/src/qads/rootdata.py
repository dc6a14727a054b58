"""Model parameters and so(D+1) root data.

Inner products use (eps_a, eps_b) = d_S * delta_ab.  In type B this makes
the short roots have length^2 2 and the long roots length^2 4, so q = e^{i pi/M}
is the short-root parameter and q^2 = e^{i pi/M_S} the long-root one; in
type D (simply laced) every root has length^2 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


from .errors import ParameterError


@dataclass(frozen=True)
class ModelParams:
    D: int
    M: int
    R_sq: Fraction = Fraction(1)
    N: int = field(init=False)
    d_S: int = field(init=False)
    M_S: int = field(init=False)
    k_S: Fraction = field(init=False)
    compact_window: tuple = field(init=False)
    ads_window: tuple = field(init=False)

    def __post_init__(self):
        D, M = self.D, self.M
        d_S = 2 if D % 2 == 0 else 1
        M_S = M // d_S
        k_S = Fraction(M_S) - Fraction(D - 2, 2)
        object.__setattr__(self, "N", D + 1)
        object.__setattr__(self, "d_S", d_S)
        object.__setattr__(self, "M_S", M_S)
        object.__setattr__(self, "k_S", k_S)
        # n < k_S for integer n  <=>  n <= ceil(k_S) - 1
        top = math.ceil(k_S)
        object.__setattr__(self, "compact_window", tuple(range(0, max(top, 0))))
        object.__setattr__(self, "ads_window", tuple(n for n in range(M_S, M_S + max(top, 0))))

    @property
    def L_min_sq(self) -> Fraction:
        """(R / M_S)^2, the squared intrinsic length scale."""
        return self.R_sq / (self.M_S * self.M_S)

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "N": self.N,
            "M": self.M,
            "d_S": self.d_S,
            "M_S": self.M_S,
            "k_S": str(self.k_S),
            "R_sq": str(self.R_sq),
            "L_min_sq": str(self.L_min_sq),
            "compact_window": list(self.compact_window),
            "ads_window": list(self.ads_window),
        }


def build_params(D: int, M: int, R_sq=1) -> ModelParams:
    if not isinstance(D, int) or D < 2:
        raise ParameterError(f"D must be an integer >= 2, got {D!r}")
    if not isinstance(M, int) or M < 2:
        raise ParameterError(f"M must be an integer >= 2, got {M!r}")
    if D % 2 == 0 and M % 2 == 1:
        raise ParameterError("D even requires M even (M_S = M/2 must be an integer)")
    R_sq = Fraction(R_sq)
    if R_sq <= 0:
        raise ParameterError("R_sq must be a positive rational")
    if M < D + 1:
        raise ParameterError(
            f"M={M} < N={D + 1}: the braid eigenvalues q, -1/q, q^(1-N) may collide; require M >= N"
        )
    return ModelParams(D, M, R_sq)


@dataclass(frozen=True)
class RootSystem:
    D: int
    N: int
    rank: int
    type_tag: str
    simple_roots: tuple  # rows: eps-coordinates of alpha_i
    inner: int  # (eps_a, eps_b) = inner * delta_ab
    cartan_matrix: tuple
    symmetrizers: tuple  # d_i = (alpha_i, alpha_i) / 2
    rho_exponents: tuple  # rho_i for the vector basis, as Fractions
    signs: tuple

    def form(self, u, v) -> int:
        return self.inner * sum(a * b for a, b in zip(u, v))

    def energy(self, weight) -> int:
        """eps_1-coefficient of a weight given in eps-coordinates."""
        return weight[0]


def _simple_roots(N: int):
    r = N // 2
    roots = []
    for i in range(r - 1):
        a = [0] * r
        a[i], a[i + 1] = 1, -1
        roots.append(tuple(a))
    if N % 2 == 1:
        a = [0] * r
        a[r - 1] = 1
        roots.append(tuple(a))
    else:
        a = [0] * r
        if r >= 2:
            a[r - 2] = 1
        a[r - 1] = 1
        roots.append(tuple(a))
    return roots


def build_root_system(D: int) -> RootSystem:
    if D < 2:
        raise ParameterError("D must be >= 2")
    N = D + 1
    if N == 2:
        raise ParameterError("so(2) has no roots")
    r = N // 2
    type_tag = "B" if N % 2 == 1 else "D"
    inner = 2 if D % 2 == 0 else 1
    roots = _simple_roots(N)
    ip = lambda u, v: inner * sum(a * b for a, b in zip(u, v))
    cartan = tuple(tuple(2 * ip(a, b) // ip(a, a) for b in roots) for a in roots)
    sym = tuple(ip(a, a) // 2 for a in roots)
    if N % 2 == 1:
        rho = [Fraction(N, 2) - i for i in range(1, r + 1)] + [Fraction(0)]
    else:
        rho = [Fraction(N, 2) - i for i in range(1, r + 1)]
    rho = rho + [-x for x in reversed(rho[:r])]
    rs = RootSystem(
        D=D,
        N=N,
        rank=r,
        type_tag=type_tag,
        simple_roots=tuple(roots),
        inner=inner,
        cartan_matrix=cartan,
        symmetrizers=sym,
        rho_exponents=tuple(rho),
        signs=(),
    )
    return _with_signs(rs)


def _with_signs(rs: RootSystem) -> RootSystem:
    object.__setattr__(rs, "signs", compute_signs(rs))
    return rs


def compute_signs(rs: RootSystem) -> tuple:
    """s_i = (-1)^{<alpha_i, energy>}, the energy being the eps_1-coefficient."""
    return tuple(-1 if a[0] % 2 else 1 for a in rs.simple_roots)
