from fractions import Fraction

import pytest

from qads.errors import ParameterError
from qads.rootdata import build_params, build_root_system, compute_signs


def _det(A):
    A = [[Fraction(x) for x in r] for r in A]
    n, d = len(A), Fraction(1)
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return d


@pytest.mark.parametrize(
    "D,M,M_S,k_S,compact,ads",
    [
        (3, 6, 6, Fraction(11, 2), range(0, 6), range(6, 12)),
        (2, 8, 4, Fraction(4), range(0, 4), range(4, 8)),
        (4, 10, 5, Fraction(4), range(0, 4), range(5, 9)),
        (5, 8, 8, Fraction(13, 2), range(0, 7), range(8, 15)),
    ],
)
def test_params_and_windows(D, M, M_S, k_S, compact, ads):
    p = build_params(D, M)
    assert (p.N, p.M_S, p.k_S) == (D + 1, M_S, k_S)
    assert p.compact_window == tuple(compact)
    assert p.ads_window == tuple(ads)
    assert p.L_min_sq == Fraction(1, M_S * M_S)


@pytest.mark.parametrize(
    "args,msg",
    [((4, 9), "D even requires M even"), ((1, 8), "D must"), ((3, 3), "M=3"), ((3, 8, 0), "R_sq")],
)
def test_parameter_errors(args, msg):
    with pytest.raises(ParameterError, match=msg):
        build_params(*args)


# standard Cartan types: so(3)=B1, so(4)=A1xA1, so(5)=B2, so(6)=D3=A3, so(7)=B3
EXPECTED_DET = {2: 2, 3: 4, 4: 2, 5: 4, 6: 2}


@pytest.mark.parametrize("D", [2, 3, 4, 5, 6])
def test_cartan_matrix(D):
    rs = build_root_system(D)
    A = rs.cartan_matrix
    assert rs.rank == (D + 1) // 2
    assert all(A[i][i] == 2 for i in range(rs.rank))
    assert all(A[i][j] <= 0 for i in range(rs.rank) for j in range(rs.rank) if i != j)
    assert _det(A) == EXPECTED_DET[D]
    # symmetrizability: d_i a_ij = d_j a_ji
    d = rs.symmetrizers
    assert all(d[i] * A[i][j] == d[j] * A[j][i] for i in range(rs.rank) for j in range(rs.rank))


@pytest.mark.parametrize("D", [2, 4, 6])
def test_type_B_root_lengths(D):
    rs = build_root_system(D)
    lengths = sorted({rs.form(a, a) for a in rs.simple_roots})
    assert lengths == ([2] if D == 2 else [2, 4])


@pytest.mark.parametrize("D", [3, 5])
def test_type_D_simply_laced(D):
    rs = build_root_system(D)
    assert {rs.form(a, a) for a in rs.simple_roots} == {2}


@pytest.mark.parametrize("D,expected", [(2, (-1,)), (3, (-1, -1)), (4, (-1, 1)), (5, (-1, 1, 1)), (6, (-1, 1, 1))])
def test_signs_follow_root_energy(D, expected):
    # a simple root is noncompact when it shifts the energy by an odd amount;
    # for so(4) the last root eps_1 + eps_2 also touches eps_1
    assert compute_signs(build_root_system(D)) == expected
