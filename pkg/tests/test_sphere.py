from math import comb

import pytest

from qads.errors import ResourceError
from qads.linalg import SparseMatrix, Subspace, nullspace
from qads.sphere import energy_spectrum, get_tower
from qads.vecrep import tensor_action


def generic_dim(N, n):
    return comb(N + n - 1, n) - (comb(N + n - 3, n - 2) if n >= 2 else 0)


def _pair_op(P, N, n, k):
    """P acting on slots k, k+1 of V^{(x) n}."""
    Fd = P.field
    left = SparseMatrix.identity(Fd, N**k)
    right = SparseMatrix.identity(Fd, N ** (n - k - 2))
    return left.kron(P).kron(right)


@pytest.mark.parametrize("D,M", [(2, 8), (3, 8), (4, 10)])
def test_dimensions_in_compact_window(small_towers, D, M):
    t = small_towers[(D, M)]
    for n in t.params.compact_window:
        if t.rep.dimension**n > 10**6:
            break
        assert t.level(n).dimension == generic_dim(D + 1, n)


@pytest.mark.parametrize("D,M,n", [(2, 8, 4), (3, 6, 3), (4, 10, 2)])
def test_level_is_joint_kernel(small_towers, D, M, n):
    """Independent oracle: the joint kernel computed directly in V^{(x) n}."""
    t = small_towers[(D, M)]
    N, Fd = t.rep.dimension, t.field
    L = t.level(n)
    Q = t.proj.P_minus + t.proj.P_zero
    rows = []
    for k in range(n - 1):
        rows += list(_pair_op(Q, N, n, k).rows.values())
    ker = nullspace(rows, N**n, Fd)
    assert len(ker) == L.dimension
    span = Subspace(Fd)
    for v in ker:
        span.add(v)
    for b in range(L.dimension):
        x = L.expand(b)
        assert span.contains(x)
        for k in range(n - 1):
            assert not _pair_op(Q, N, n, k).apply(x)


@pytest.mark.parametrize("D,M,n", [(2, 8, 3), (3, 8, 3), (4, 10, 2)])
def test_generators_match_ambient_action(small_towers, D, M, n):
    t = small_towers[(D, M)]
    Fd = t.field
    L = t.level(n)
    tm = tensor_action(t.rep, n)
    sp = Subspace(Fd)
    basis = [L.expand(b) for b in range(L.dimension)]
    for v in basis:
        assert sp.add(v)
    for i in range(len(L.E)):
        for X_amb, X in ((tm.E[i], L.E[i]), (tm.F[i], L.F[i])):
            for b, v in enumerate(basis):
                coords = sp.coordinates(X_amb.apply(v))
                col = {r: X.get(r, b) for r in range(L.dimension) if not X.get(r, b).is_zero()}
                assert coords == col


@pytest.mark.parametrize("D,M,n", [(2, 8, 3), (3, 6, 4), (4, 10, 3)])
def test_hw_vector(small_towers, D, M, n):
    t = small_towers[(D, M)]
    L = t.level(n)
    x = L.expand(L.hw_index)
    assert list(x) == [0]
    assert L.weights[L.hw_index] == tuple([n] + [0] * (t.rs.rank - 1))
    for E in L.E:
        assert not E.apply({L.hw_index: t.field.one_poly})


def test_cyclic_module_fills_generic_levels(small_towers):
    t = small_towers[(3, 8)]
    for n in range(0, 6):
        assert t.cyclic(n).dimension == t.level(n).dimension


def test_cyclic_module_shrinks_at_root_of_unity(small_towers):
    t = small_towers[(2, 8)]
    # n = M_S: the module generated by e_1^{(x) n} is a proper submodule
    assert t.level(4).dimension == 9
    assert t.cyclic(4).dimension == 8


def test_energy_spectrum(small_towers):
    mod = small_towers[(3, 6)].cyclic(2)
    E_min, spec = energy_spectrum(mod)
    assert E_min == -2
    assert sum(spec.values()) == 9
    assert spec == {e: spec[-e] for e in spec}


def test_budget_guard():
    t = get_tower(3, 8, 1, 1000)
    with pytest.raises(ResourceError) as info:
        t.level(6)
    assert info.value.needed == 4**6
