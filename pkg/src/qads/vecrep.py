"""Vector representation of U_q(so(N)) and its tensor powers.

Coproduct convention (fixed everywhere in the package):

    Delta(E) = E (x) K + 1 (x) E
    Delta(F) = F (x) 1 + K^-1 (x) F
    Delta(K) = K (x) K
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .cyclo import CycloField, make_field
from .errors import ConstructionError, ResourceError
from .linalg import SparseMatrix, commutator
from .rootdata import ModelParams, RootSystem

DEFAULT_BUDGET = int(os.environ.get("QADS_BUDGET", str(10**6)))


def vector_weights(rs: RootSystem) -> list[tuple]:
    r = rs.rank
    ws = []
    for a in range(r):
        w = [0] * r
        w[a] = 1
        ws.append(tuple(w))
    if rs.N % 2 == 1:
        ws.append(tuple([0] * r))
    for a in reversed(range(r)):
        w = [0] * r
        w[a] = -1
        ws.append(tuple(w))
    return ws


@dataclass
class VectorRep:
    params: ModelParams
    rs: RootSystem
    field: CycloField
    weights: list
    E: list
    F: list
    K: list
    Kinv: list

    @property
    def dimension(self) -> int:
        return len(self.weights)

    @property
    def energies(self) -> list[int]:
        return [w[0] for w in self.weights]


def build_vector_rep(params: ModelParams, rs: RootSystem) -> VectorRep:
    Fd = make_field(params.M)
    N = rs.N
    r = rs.rank
    ws = vector_weights(rs)
    index = {w: k for k, w in enumerate(ws)}
    Es, Fs, Ks, Kis = [], [], [], []
    for i, a in enumerate(rs.simple_roots):
        K = SparseMatrix.diag(Fd, [Fd.power(rs.form(a, w)) for w in ws])
        Ki = SparseMatrix.diag(Fd, [Fd.power(-rs.form(a, w)) for w in ws])
        E = SparseMatrix(Fd, (N, N))
        Fm = SparseMatrix(Fd, (N, N))
        if rs.type_tag == "B" and i == r - 1:
            # spin-1 triplet e_r, e_0, e_{-r} of the short root
            two = Fd.qnum_poly(2)
            top, mid, bot = r - 1, r, r + 1
            E.set(top, mid, 1)
            E.set(mid, bot, -Fd.power(-1))
            Fm.set(mid, top, two)
            Fm.set(bot, mid, Fd.mul(-Fd.power(1), two))
        else:
            moves = []
            for k, w in enumerate(ws):
                t = tuple(x + y for x, y in zip(w, a))
                if t in index:
                    moves.append((index[t], k))
            moves.sort()
            for sgn, (j, k) in zip((1, -1), moves):
                E.set(j, k, sgn)
                Fm.set(k, j, sgn)
        Es.append(E)
        Fs.append(Fm)
        Ks.append(K)
        Kis.append(Ki)
    rep = VectorRep(params, rs, Fd, ws, Es, Fs, Ks, Kis)
    failures = dj_residuals(rep.E, rep.F, rep.K, rep.Kinv, rs, Fd)
    if failures:
        raise ConstructionError(f"vector representation violates DJ relations: {failures}")
    for i in range(r):
        if rep.E[i].apply({0: Fd.one_poly}):
            raise ConstructionError("e_1 is not a highest weight vector")
    return rep


def _qbinom(n: int, k: int, Fd: CycloField, base: int):
    num = Fd.one_poly
    den = Fd.one_poly
    for j in range(k):
        num = Fd.mul(num, Fd.qnum_poly(n - j, base))
        den = Fd.mul(den, Fd.qnum_poly(j + 1, base))
    return Fd.mul(num, Fd.inv(den))


def _mpow(A: SparseMatrix, k: int) -> SparseMatrix:
    out = SparseMatrix.identity(A.field, A.shape[0])
    for _ in range(k):
        out = out @ A
    return out


def dj_residuals(E, F, K, Kinv, rs: RootSystem, Fd: CycloField) -> list[str]:
    """Names of the Drinfeld-Jimbo relations that fail (empty when all hold)."""
    bad = []
    r = len(E)
    n = E[0].shape[0]
    one = SparseMatrix.identity(Fd, n)
    for i in range(r):
        if not (K[i] @ Kinv[i] == one):
            bad.append(f"K{i} Kinv{i}")
        di = rs.symmetrizers[i]
        denom = Fd.inv(Fd.power(di) - Fd.power(-di))
        for j in range(r):
            e = rs.form(rs.simple_roots[i], rs.simple_roots[j])
            if not (K[i] @ E[j] @ Kinv[i] == E[j].scaled(Fd.power(e))):
                bad.append(f"K{i}E{j}")
            if not (K[i] @ F[j] @ Kinv[i] == F[j].scaled(Fd.power(-e))):
                bad.append(f"K{i}F{j}")
            c = commutator(E[i], F[j])
            target = (K[i] - Kinv[i]).scaled(denom) if i == j else SparseMatrix(Fd, (n, n))
            if not (c == target):
                bad.append(f"[E{i},F{j}]")
            if i != j:
                m = 1 - rs.cartan_matrix[i][j]
                for X, name in ((E, "E"), (F, "F")):
                    acc = SparseMatrix(Fd, (n, n))
                    for k in range(m + 1):
                        coef = _qbinom(m, k, Fd, di)
                        if k % 2:
                            coef = -coef
                        term = _mpow(X[i], m - k) @ X[j] @ _mpow(X[i], k)
                        acc = acc + term.scaled(coef)
                    if not acc.is_zero():
                        bad.append(f"Serre {name}{i}{j}")
    return bad


@dataclass
class TensorModule:
    rep: VectorRep
    level: int
    E: list
    F: list
    K: list
    Kinv: list
    weights: list
    energy_diag: list = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.weights)

    def weight_matrix(self) -> SparseMatrix:
        Fd = self.rep.field
        return SparseMatrix.diag(Fd, [Fd(e).poly for e in self.energy_diag])


def tensor_action(rep: VectorRep, n: int, budget: int | None = None) -> TensorModule:
    """Generators on V^{(x) n} through the iterated coproduct."""
    budget = DEFAULT_BUDGET if budget is None else budget
    N = rep.dimension
    if N**n > budget:
        raise ResourceError(f"tensor power dimension {N}^{n} exceeds budget {budget}", bound=budget, needed=N**n)
    Fd = rep.field
    r = len(rep.E)
    one_V = SparseMatrix.identity(Fd, N)
    E = [SparseMatrix(Fd, (1, 1)) for _ in range(r)]
    Fm = [SparseMatrix(Fd, (1, 1)) for _ in range(r)]
    K = [SparseMatrix.identity(Fd, 1) for _ in range(r)]
    Ki = [SparseMatrix.identity(Fd, 1) for _ in range(r)]
    weights = [tuple([0] * rep.rs.rank)]
    for _ in range(n):
        d = len(weights)
        one_prev = SparseMatrix.identity(Fd, d)
        E = [E[i].kron(rep.K[i]) + one_prev.kron(rep.E[i]) for i in range(r)]
        Fm = [Fm[i].kron(one_V) + Ki[i].kron(rep.F[i]) for i in range(r)]
        K = [K[i].kron(rep.K[i]) for i in range(r)]
        Ki = [Ki[i].kron(rep.Kinv[i]) for i in range(r)]
        weights = [tuple(a + b for a, b in zip(w, v)) for w in weights for v in rep.weights]
    return TensorModule(rep, n, E, Fm, K, Ki, weights, [w[0] for w in weights])


def parity_operator(tm: TensorModule) -> SparseMatrix:
    """(-1)^E as a diagonal +-1 matrix."""
    Fd = tm.rep.field
    return SparseMatrix.diag(Fd, [Fd(-1 if e % 2 else 1).poly for e in tm.energy_diag])


def parity_residuals(tm: TensorModule, signs) -> list[str]:
    P = parity_operator(tm)
    bad = []
    for i, s in enumerate(signs):
        if not (P @ tm.E[i] @ P == tm.E[i].scaled(s)):
            bad.append(f"E{i}")
        if not (P @ tm.F[i] @ P == tm.F[i].scaled(s)):
            bad.append(f"F{i}")
    return bad
