"""Braid operator, spectral projectors and quantum metric on V (x) V.

The braid operator is R_hat = R . flip where R is the orthogonal-series
FRT matrix at the long-root parameter q_R = q^{d_S}.  With the coproduct
of :mod:`qads.vecrep` this R_hat commutes with the quantum algebra and has
eigenvalues q_R (symmetric traceless part), -1/q_R (antisymmetric part)
and q_R^{1-N} (trace part).  Every identity is checked exactly when the
objects are built.
"""

from __future__ import annotations

from dataclasses import dataclass

from flint import fmpq_poly

from .cyclo import CycloField, CycloScalar
from .errors import ConstructionError, DegenerateParameterError
from .linalg import SparseMatrix, rref
from .rootdata import ModelParams
from .vecrep import VectorRep


@dataclass
class BraidOperator:
    params: ModelParams
    rep: VectorRep
    matrix: SparseMatrix
    eigenvalues: tuple  # raw polys (q_R, -1/q_R, q_R^{1-N})

    @property
    def field(self) -> CycloField:
        return self.rep.field

    def eigenvalue_scalars(self) -> tuple:
        return tuple(CycloScalar(self.field, e) for e in self.eigenvalues)


@dataclass
class ProjectorTriple:
    braid: BraidOperator
    P_plus: SparseMatrix
    P_minus: SparseMatrix
    P_zero: SparseMatrix
    ranks: tuple


@dataclass
class Metric:
    g_upper: SparseMatrix
    g_lower: SparseMatrix
    C: SparseMatrix
    qdim: CycloScalar

    def contraction_vector(self) -> dict:
        """sum_ij g^{ij} e_i (x) e_j as a vector on V (x) V."""
        N = self.g_upper.shape[0]
        return {i * N + j: v for i, r in self.g_upper.rows.items() for j, v in r.items()}

    def contraction_functional(self) -> dict:
        """x -> sum_kl g_{kl} x^{kl}."""
        N = self.g_lower.shape[0]
        return {k * N + l: v for k, r in self.g_lower.rows.items() for l, v in r.items()}


@dataclass
class RelationSet:
    quadratic_span: list  # basis of Im(P^-) in V (x) V
    inhomogeneous: tuple  # (g-contraction vector, R_sq)
    functionals: list  # independent rows of P^- + P^0, weight homogeneous

    @property
    def count(self) -> int:
        return len(self.quadratic_span) + 1


def _flip(Fd: CycloField, N: int) -> SparseMatrix:
    one = Fd.one_poly
    return SparseMatrix(Fd, (N * N, N * N), {j * N + i: {i * N + j: one} for i in range(N) for j in range(N)})


def frt_matrix(params: ModelParams, rep: VectorRep) -> SparseMatrix:
    """The FRT R-matrix (before composing with the flip)."""
    Fd = rep.field
    N = rep.dimension
    dS = params.d_S
    rho = rep.rs.rho_exponents
    qR = Fd.power(dS)
    qRi = Fd.power(-dS)
    diff = qR - qRi
    R = SparseMatrix(Fd, (N * N, N * N))
    pr = lambda i: N - 1 - i
    # kron(E_ab, E_cd) sends e_b (x) e_d to e_a (x) e_c
    for i in range(N):
        for j in range(N):
            x = i * N + j
            if i == j:
                R.set(x, x, qR if i != pr(i) else 1)
            elif j != pr(i):
                R.set(x, x, 1)
            else:
                R.set(x, x, qRi)
    for i in range(N):
        for j in range(i):
            # (q - 1/q) E_ij (x) E_ji
            a = i * N + j
            b = j * N + i
            R.set(a, b, R.get(a, b) + diff)
            # -(q - 1/q) q^{rho_i - rho_j} E_ij (x) E_i'j'
            e = dS * (rho[i] - rho[j])
            if e.denominator != 1:
                raise ConstructionError("non-integral exponent in FRT matrix")
            a = i * N + pr(i)
            b = j * N + pr(j)
            R.set(a, b, R.get(a, b) - Fd.mul(diff, Fd.power(int(e))))
    return R


def _coproduct2(rep: VectorRep):
    Fd = rep.field
    N = rep.dimension
    one = SparseMatrix.identity(Fd, N)
    ops = []
    for i in range(len(rep.E)):
        ops.append((f"E{i}", rep.E[i].kron(rep.K[i]) + one.kron(rep.E[i])))
        ops.append((f"F{i}", rep.F[i].kron(one) + rep.Kinv[i].kron(rep.F[i])))
        ops.append((f"K{i}", rep.K[i].kron(rep.K[i])))
    return ops


def build_rmatrix(params: ModelParams, rep: VectorRep, check_braid: bool = True) -> BraidOperator:
    Fd = rep.field
    N = rep.dimension
    dS = params.d_S
    lam = (Fd.power(dS), -Fd.power(-dS), Fd.power(dS * (1 - N)))
    names = ("q", "-1/q", "q^(1-N)")
    for a in range(3):
        for b in range(a + 1, 3):
            if lam[a] == lam[b]:
                raise DegenerateParameterError(
                    f"braid eigenvalues {names[a]} and {names[b]} coincide for D={params.D}, M={params.M}"
                )
    Rh = frt_matrix(params, rep) @ _flip(Fd, N)
    bo = BraidOperator(params, rep, Rh, lam)
    bad = braid_residuals(bo, check_braid=check_braid)
    if bad:
        raise ConstructionError(f"braid operator identities failed: {bad}")
    return bo


def braid_residuals(bo: BraidOperator, check_braid: bool = True) -> list[str]:
    Fd = bo.field
    N = bo.rep.dimension
    Rh = bo.matrix
    bad = []
    for name, X in _coproduct2(bo.rep):
        if not (Rh @ X == X @ Rh):
            bad.append(f"[R,{name}]")
    I = SparseMatrix.identity(Fd, N * N)
    prod = None
    for lam in bo.eigenvalues:
        term = Rh - I.scaled(lam)
        prod = term if prod is None else prod @ term
    if not prod.is_zero():
        bad.append("minimal polynomial")
    if check_braid:
        one = SparseMatrix.identity(Fd, N)
        R12 = Rh.kron(one)
        R23 = one.kron(Rh)
        if not (R12 @ R23 @ R12 == R23 @ R12 @ R23):
            bad.append("braid relation")
    return bad


def build_projectors(b: BraidOperator) -> ProjectorTriple:
    Fd = b.field
    N = b.rep.dimension
    I = SparseMatrix.identity(Fd, N * N)
    Rh = b.matrix
    lam = b.eigenvalues
    Ps = []
    for a in range(3):
        P = I
        for c in range(3):
            if c == a:
                continue
            denom = Fd.inv(lam[a] - lam[c])
            P = P @ (Rh - I.scaled(lam[c])).scaled(denom)
        Ps.append(P)
    ranks = tuple(P.rank() for P in Ps)
    pt = ProjectorTriple(b, Ps[0], Ps[1], Ps[2], ranks)
    bad = projector_residuals(pt)
    if bad:
        raise ConstructionError(f"projector identities failed: {bad}")
    return pt


def projector_residuals(pt: ProjectorTriple) -> list[str]:
    Fd = pt.braid.field
    N = pt.braid.rep.dimension
    I = SparseMatrix.identity(Fd, N * N)
    Ps = (pt.P_plus, pt.P_minus, pt.P_zero)
    bad = []
    for a, P in enumerate(Ps):
        if not (P @ P == P):
            bad.append(f"idempotent {a}")
        for c, Q in enumerate(Ps):
            if c != a and not (P @ Q).is_zero():
                bad.append(f"orthogonal {a}{c}")
        for name, X in _coproduct2(pt.braid.rep):
            if not (P @ X == X @ P):
                bad.append(f"[P{a},{name}]")
    if not (Ps[0] + Ps[1] + Ps[2] == I):
        bad.append("partition of unity")
    lam = pt.braid.eigenvalues
    recon = Ps[0].scaled(lam[0]) + Ps[1].scaled(lam[1]) + Ps[2].scaled(lam[2])
    if not (recon == pt.braid.matrix):
        bad.append("spectral reconstruction")
    exp = (N * (N + 1) // 2 - 1, N * (N - 1) // 2, 1)
    if pt.ranks != exp:
        bad.append(f"ranks {pt.ranks} != {exp}")
    return bad


def build_metric(params: ModelParams, proj: ProjectorTriple) -> Metric:
    Fd = proj.braid.field
    N = proj.braid.rep.dimension
    P0 = proj.P_zero
    if proj.ranks[2] != 1:
        raise ConstructionError("trace projector does not have rank one")
    cols = P0.columns()
    u = None
    corner = 0 * N + (N - 1)
    for c in sorted(cols):
        if corner in cols[c]:
            u = cols[c]
            break
    if u is None:
        raise ConstructionError("trace projector image misses the e_1 (x) e_N corner")
    s = Fd.inv(u[corner])
    g_up = SparseMatrix(Fd, (N, N))
    for x, v in u.items():
        g_up.set(x // N, x % N, Fd.mul(s, v))
    # g_lower = inverse of g_upper (antidiagonal)
    g_low = SparseMatrix(Fd, (N, N))
    for i, r in g_up.rows.items():
        for j, v in r.items():
            if i != N - 1 - j:
                raise ConstructionError("metric is not antidiagonal")
            g_low.set(j, i, Fd.inv(v))
    qdim = fmpq_poly([])
    for i, r in g_up.rows.items():
        for j, v in r.items():
            qdim += Fd.mul(v, g_low.get(i, j))
    qdim = Fd.reduce(qdim)
    met = Metric(g_up, g_low, g_up, CycloScalar(Fd, qdim))
    bad = metric_residuals(met, proj)
    if bad:
        raise ConstructionError(f"metric identities failed: {bad}")
    return met


def metric_residuals(met: Metric, proj: ProjectorTriple) -> list[str]:
    Fd = proj.braid.field
    N = proj.braid.rep.dimension
    bad = []
    if not (met.g_upper @ met.g_lower == SparseMatrix.identity(Fd, N)):
        bad.append("g^ g_ != 1")
    vec = met.contraction_vector()
    fun = met.contraction_functional()
    inv_qdim = Fd.inv(met.qdim.poly)
    P0 = SparseMatrix(Fd, (N * N, N * N))
    for x, a in vec.items():
        for y, b in fun.items():
            P0.set(x, y, Fd.mul(Fd.mul(a, b), inv_qdim))
    if not (P0 == proj.P_zero):
        bad.append("P0 != g g / qdim")
    # the contraction is an intertwiner V (x) V -> trivial and its vector is invariant
    for name, X in _coproduct2(proj.braid.rep):
        out = X.apply(vec)
        if name.startswith("K"):
            if out != vec:
                bad.append(f"{name} g-vector")
        elif out:
            bad.append(f"{name} g-vector")
        row = SparseMatrix(Fd, (1, N * N), {0: dict(fun)}) @ X
        target = {0: dict(fun)} if name.startswith("K") else {}
        if row.rows != target:
            bad.append(f"{name} g-functional")
    return bad


def sphere_relations(proj: ProjectorTriple, met: Metric, R_sq) -> RelationSet:
    Fd = proj.braid.field
    N = proj.braid.rep.dimension
    _, span = rref(list(proj.P_minus.transpose().rows.values()), Fd)
    Q = proj.P_minus + proj.P_zero
    _, funcs = rref(list(Q.rows.values()), Fd)
    if len(span) != N * (N - 1) // 2:
        raise ConstructionError("antisymmetrizer image has the wrong dimension")
    return RelationSet(span, (met.contraction_vector(), R_sq), funcs)
