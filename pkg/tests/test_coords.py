from fractions import Fraction

import pytest

from qads.coords import coordinate_operators, projection_raising, quotient_level
from qads.linalg import SparseMatrix
from qads.rootdata import build_params
from qads.sphere import get_tower


@pytest.mark.parametrize("D,M,n_max", [(2, 6, 4), (2, 8, 5), (3, 8, 4), (3, 6, 3), (4, 10, 3)])
def test_both_relation_families_exact(D, M, n_max):
    co = coordinate_operators(build_params(D, M), n_max)
    assert co.failures == []
    assert co.undetermined == []
    assert co.relation_residuals() == []
    assert co.energy_shift_residuals() == []


def test_relations_with_other_radius():
    co = coordinate_operators(build_params(3, 8, Fraction(5, 2)), 3)
    assert co.relation_residuals() == []
    # the lowering scalars scale linearly with R^2
    co1 = coordinate_operators(build_params(3, 8), 3)
    Fd = co.field
    for a, b in zip(co.lambdas[1:], co1.lambdas[1:]):
        assert a == Fd.mul(b, Fd(Fraction(5, 2)).poly)


def test_residuals_detect_a_perturbation():
    co = coordinate_operators(build_params(2, 8), 3)
    B = co.raising[(0, 1)]
    r, c = next((r, c) for r, row in B.rows.items() for c in row)
    B.set(r, c, B.get(r, c) + 1)
    assert co.relation_residuals() != []


@pytest.mark.parametrize("D,M", [(2, 8), (3, 8)])
def test_quotient_dimensions_match_levels(D, M):
    t = get_tower(D, M)
    for n in range(4):
        assert quotient_level(t, n).dimension == t.level(n).dimension


@pytest.mark.parametrize("D,M,n", [(3, 8, 0), (3, 8, 1), (3, 8, 2), (2, 8, 2), (4, 10, 1)])
def test_raising_agrees_with_projection_oracle(D, M, n):
    """Projecting e_i (x) x back into the joint kernel gives the same class."""
    t = get_tower(D, M)
    Fd = t.field
    P = projection_raising(t, n)
    assert P is not None
    co = coordinate_operators(build_params(D, M), n + 1)

    def frame(m):
        L, Q = t.level(m), co.levels[m]
        C = SparseMatrix(Fd, (Q.dimension, L.dimension))
        for b in range(L.dimension):
            for r, v in Q.coords(L.expand(b)).items():
                C.set(r, b, v)
        return C

    C0, C1 = frame(n), frame(n + 1)
    for i in range(t.rep.dimension):
        assert co.raising[(i, n)] @ C0 == C1 @ P[i]


def test_projection_oracle_fails_where_level_meets_relations():
    t = get_tower(2, 8)
    assert projection_raising(t, 3) is None


def test_operator_assembly_shape():
    co = coordinate_operators(build_params(2, 8), 3)
    T = co.operator(0)
    assert T.shape == (sum(co.dims), sum(co.dims))
    assert co.dims == [1, 3, 5, 7]
