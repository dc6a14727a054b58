import pytest

from qads.errors import DegenerateParameterError
from qads.frt import (
    braid_residuals,
    build_metric,
    build_projectors,
    build_rmatrix,
    metric_residuals,
    projector_residuals,
    sphere_relations,
)
from qads.linalg import SparseMatrix
from qads.rootdata import build_params, build_root_system
from qads.vecrep import build_vector_rep


def _objects(D, M):
    p = build_params(D, M)
    rep = build_vector_rep(p, build_root_system(D))
    b = build_rmatrix(p, rep)
    proj = build_projectors(b)
    return p, rep, b, proj, build_metric(p, proj)


@pytest.mark.parametrize("D,M", [(2, 6), (3, 8), (4, 10), (5, 6)])
def test_braid_projectors_metric(D, M):
    p, rep, b, proj, met = _objects(D, M)
    N = p.N
    assert braid_residuals(b) == []
    assert projector_residuals(proj) == []
    assert metric_residuals(met, proj) == []
    assert proj.ranks == (N * (N + 1) // 2 - 1, N * (N - 1) // 2, 1)
    Fd = rep.field
    qR = Fd.power(p.d_S)
    assert b.eigenvalues[0] == qR
    assert b.eigenvalues[1] == -Fd.inv(qR)
    assert b.eigenvalues[2] == Fd.power(p.d_S * (1 - N))


def test_spectral_reconstruction_explicit():
    p, rep, b, proj, met = _objects(3, 6)
    lam = b.eigenvalues
    R = proj.P_plus.scaled(lam[0]) + proj.P_minus.scaled(lam[1]) + proj.P_zero.scaled(lam[2])
    assert R == b.matrix


def test_quantum_dimension_is_real():
    # contraction of g with its inverse gives q-dim = 1 + [N-1]_{q_R} type value; real by symmetry
    for D, M in [(2, 8), (3, 8), (4, 10)]:
        _, _, _, _, met = _objects(D, M)
        assert met.qdim.is_real()
        assert not met.qdim.is_zero()


def test_metric_antidiagonal():
    p, rep, b, proj, met = _objects(4, 10)
    N = p.N
    for i, r in met.g_upper.rows.items():
        assert set(r) == {N - 1 - i}
    assert met.g_upper @ met.g_lower == SparseMatrix.identity(rep.field, N)


def test_degenerate_eigenvalues():
    p = build_params(4, 6)
    rep = build_vector_rep(p, build_root_system(4))
    with pytest.raises(DegenerateParameterError):
        build_rmatrix(p, rep)


def test_relation_count():
    p, rep, b, proj, met = _objects(3, 8)
    rel = sphere_relations(proj, met, p.R_sq)
    assert rel.count == p.N * (p.N - 1) // 2 + 1
