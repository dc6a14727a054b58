import pytest

from qads.errors import ResourceError
from qads.rootdata import build_params, build_root_system
from qads.vecrep import build_vector_rep, dj_residuals, parity_residuals, tensor_action, vector_weights


def _rep(D, M):
    p = build_params(D, M)
    return build_vector_rep(p, build_root_system(D))


@pytest.mark.parametrize("D,M", [(2, 6), (3, 8), (4, 10), (5, 8)])
def test_vector_rep_relations(D, M):
    rep = _rep(D, M)
    assert rep.dimension == D + 1
    assert dj_residuals(rep.E, rep.F, rep.K, rep.Kinv, rep.rs, rep.field) == []
    assert rep.energies[0] == 1 and rep.energies[-1] == -1


@pytest.mark.parametrize("D", [2, 3, 4, 5])
def test_weights_are_symmetric(D):
    ws = vector_weights(build_root_system(D))
    assert len(ws) == D + 1
    assert sorted(ws) == sorted(tuple(-x for x in w) for w in ws)


@pytest.mark.parametrize("D,M,n", [(2, 8, 3), (3, 6, 2), (4, 10, 2)])
def test_tensor_module_relations(D, M, n):
    tm = tensor_action(_rep(D, M), n)
    assert tm.dimension == (D + 1) ** n
    assert dj_residuals(tm.E, tm.F, tm.K, tm.Kinv, tm.rep.rs, tm.rep.field) == []


@pytest.mark.parametrize("D,M,n", [(2, 8, 3), (3, 8, 3), (4, 10, 2), (5, 12, 2)])
def test_parity_conjugation(D, M, n):
    rep = _rep(D, M)
    assert parity_residuals(tensor_action(rep, n), rep.rs.signs) == []


def test_wrong_signs_detected():
    rep = _rep(3, 8)
    assert parity_residuals(tensor_action(rep, 2), (1, 1)) != []


def test_tensor_budget():
    with pytest.raises(ResourceError):
        tensor_action(_rep(3, 8), 6, budget=1000)
