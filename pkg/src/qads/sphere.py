"""Polynomial levels F(n) of the quantum sphere inside V^{(x) n}.

F(n) is the joint kernel of P^- and P^0 on every adjacent slot pair, i.e.
the q_R-eigenspace of every R_hat_{k,k+1}.  Since the conditions on the
first n-1 slots define F(n-1), we have F(n) = (F(n-1) (x) V) cap
ker(1 - P^+)_{n-1,n}, and each level is stored in *nested coordinates*:
basis vectors are combinations of f_c (x) e_j with f_c a basis vector of
F(n-1).  Generator actions are then Kronecker sums of small matrices and
the ambient space V^{(x) n} is never materialised.  :meth:`SphereLevel.expand`
recovers the tensor-basis form when needed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

from .cyclo import CycloField
from .errors import ConstructionError, ResourceError, StructuralError
from .frt import (
    BraidOperator,
    Metric,
    ProjectorTriple,
    RelationSet,
    build_metric,
    build_projectors,
    build_rmatrix,
    sphere_relations,
)
from .linalg import SparseMatrix, Subspace, axpy, kernel_basis
from .rootdata import ModelParams, RootSystem, build_params, build_root_system
from .vecrep import DEFAULT_BUDGET, VectorRep, build_vector_rep

log = logging.getLogger(__name__)


def _wadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _wsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


@dataclass
class SphereLevel:
    n: int
    params: ModelParams
    rep: VectorRep
    weights: list  # weight of each basis vector
    nested: list  # basis vector -> {c*N + j: coeff} over F(n-1) (x) V
    E: list  # SparseMatrix per simple root, in this basis
    F: list
    hw_index: int
    prev: "SphereLevel | None" = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.weights)

    @property
    def field(self) -> CycloField:
        return self.rep.field

    @property
    def ambient_dimension(self) -> int:
        return self.rep.dimension**self.n

    def K_power(self, i: int, b: int, sign: int = 1):
        rs = self.rep.rs
        return self.field.power(sign * rs.form(rs.simple_roots[i], self.weights[b]))

    def K(self, i: int) -> SparseMatrix:
        return SparseMatrix.diag(self.field, [self.K_power(i, b) for b in range(self.dimension)])

    def Kinv(self, i: int) -> SparseMatrix:
        return SparseMatrix.diag(self.field, [self.K_power(i, b, -1) for b in range(self.dimension)])

    def energies(self) -> list[int]:
        return [w[0] for w in self.weights]

    def weight_blocks(self) -> dict:
        out: dict = {}
        for b, w in enumerate(self.weights):
            out.setdefault(w, []).append(b)
        return out

    def expand(self, b: int) -> dict:
        """Basis vector b in the tensor basis of V^{(x) n} (index = base-N digits)."""
        return self.expand_vector({b: self.field.one_poly})

    def expand_vector(self, x: dict) -> dict:
        Fd = self.field
        N = self.rep.dimension
        if self.n == 0:
            return {0: x[0]} if 0 in x else {}
        inner: dict = {}
        for b, v in x.items():
            for cj, w in self.nested[b].items():
                c, j = divmod(cj, N)
                inner.setdefault(j, {})
                t = Fd.mul(v, w)
                s = inner[j].get(c)
                inner[j][c] = t if s is None else s + t
        out = {}
        for j, coeffs in inner.items():
            coeffs = {c: v for c, v in coeffs.items() if not v.is_zero()}
            for idx, v in self.prev.expand_vector(coeffs).items():
                out[idx * N + j] = v
        return out


class SphereTower:
    """All data for one (D, M): braid operator, metric and the level chain."""

    def __init__(self, params: ModelParams, budget: int | None = None):
        self.params = params
        self.budget = DEFAULT_BUDGET if budget is None else budget
        self.rs: RootSystem = build_root_system(params.D)
        self.rep: VectorRep = build_vector_rep(params, self.rs)
        self.braid: BraidOperator = build_rmatrix(params, self.rep)
        self.proj: ProjectorTriple = build_projectors(self.braid)
        self.metric: Metric = build_metric(params, self.proj)
        self.relations: RelationSet = sphere_relations(self.proj, self.metric, params.R_sq)
        self.levels: list[SphereLevel] = []
        self._cyclic: dict = {}

    @property
    def field(self) -> CycloField:
        return self.rep.field

    def check_budget(self, n: int) -> None:
        need = self.rep.dimension**n
        if need > self.budget:
            raise ResourceError(
                f"level n={n} has ambient dimension {self.rep.dimension}^{n} = {need} > budget {self.budget}",
                bound=self.budget,
                needed=need,
            )

    def level(self, n: int) -> SphereLevel:
        if n < 0:
            raise ValueError("level index must be >= 0")
        self.check_budget(n)
        while len(self.levels) <= n:
            m = len(self.levels)
            log.debug("building level %d for D=%d M=%d", m, self.params.D, self.params.M)
            self.levels.append(self._build(m))
        return self.levels[n]

    def cyclic(self, n: int) -> "CyclicModule":
        if n not in self._cyclic:
            self._cyclic[n] = cyclic_submodule(self.level(n))
        return self._cyclic[n]

    # construction ---------------------------------------------------------

    def _build(self, n: int) -> SphereLevel:
        rep, Fd = self.rep, self.field
        r = len(rep.E)
        if n == 0:
            z = tuple([0] * self.rs.rank)
            zero = [SparseMatrix(Fd, (1, 1)) for _ in range(r)]
            return SphereLevel(0, self.params, rep, [z], [{0: Fd.one_poly}], zero, list(zero), 0)
        prev = self.levels[n - 1]
        N = rep.dimension
        colw = [_wadd(prev.weights[c], rep.weights[j]) for c in range(prev.dimension) for j in range(N)]
        rows: list[dict] = []
        if n >= 2:
            # functional t restricted by first V index k: list of (j, gamma)
            fsplit = []
            for rho in self.relations.functionals:
                d: dict = {}
                for kj, g in rho.items():
                    k, j = divmod(kj, N)
                    d.setdefault(k, []).append((j, g))
                fsplit.append(d)
            acc: dict = {}
            for c in range(prev.dimension):
                for dk, beta in prev.nested[c].items():
                    dd, k = divmod(dk, N)
                    for t, fs in enumerate(fsplit):
                        lst = fs.get(k)
                        if not lst:
                            continue
                        row = acc.setdefault((dd, t), {})
                        for j, g in lst:
                            col = c * N + j
                            v = Fd.mul(beta, g)
                            s = row.get(col)
                            row[col] = v if s is None else s + v
            for key in sorted(acc):
                row = {k: v for k, v in acc[key].items() if not v.is_zero()}
                if row:
                    rows.append(row)
        # split into weight blocks (rows only touch columns of one weight)
        blocks: dict = {}
        for col, w in enumerate(colw):
            blocks.setdefault(w, []).append(col)
        block_rows: dict = {w: [] for w in blocks}
        for row in rows:
            w = colw[next(iter(row))]
            block_rows[w].append(row)
        weights: list = []
        nested: list = []
        free_of: dict = {}
        for w in sorted(blocks, reverse=True):
            cols = blocks[w]
            loc = {c: a for a, c in enumerate(cols)}
            lrows = [{loc[c]: v for c, v in row.items()} for row in block_rows[w]]
            for fa, vec in kernel_basis(lrows, len(cols), Fd):
                g = {cols[a]: v for a, v in vec.items()}
                free_of[cols[fa]] = len(nested)
                weights.append(w)
                nested.append(g)
        hw = tuple([n] + [0] * (self.rs.rank - 1))
        hw_idx = [b for b, w in enumerate(weights) if w == hw]
        if len(hw_idx) != 1:
            raise ConstructionError(f"highest weight space of level {n} has dimension {len(hw_idx)}")
        level = SphereLevel(n, self.params, rep, weights, nested, [], [], hw_idx[0], prev)
        level._free_of = free_of  # type: ignore[attr-defined]
        self._attach_action(level, prev)
        return level

    def _attach_action(self, level: SphereLevel, prev: SphereLevel) -> None:
        rep, Fd = self.rep, self.field
        N = rep.dimension
        rs = self.rs
        free_of = level._free_of  # type: ignore[attr-defined]
        pE = [A.columns() for A in prev.E]
        pF = [A.columns() for A in prev.F]
        vE = [A.columns() for A in rep.E]
        vF = [A.columns() for A in rep.F]
        Es, Fs = [], []
        for i in range(len(rep.E)):
            a = rs.simple_roots[i]
            KV = [Fd.power(rs.form(a, w)) for w in rep.weights]
            Kprev_inv = [Fd.power(-rs.form(a, w)) for w in prev.weights]
            Emat = SparseMatrix(Fd, (level.dimension, level.dimension))
            Fmat = SparseMatrix(Fd, (level.dimension, level.dimension))
            for b, x in enumerate(level.nested):
                ye: dict = {}
                yf: dict = {}
                for cj, v in x.items():
                    c, j = divmod(cj, N)
                    # Delta(E) = E (x) K + 1 (x) E
                    for c2, a_ in pE[i].get(c, {}).items():
                        axpy(ye, Fd.mul(v, KV[j]), {c2 * N + j: a_}, Fd)
                    for j2, a_ in vE[i].get(j, {}).items():
                        axpy(ye, v, {c * N + j2: a_}, Fd)
                    # Delta(F) = F (x) 1 + K^-1 (x) F
                    for c2, a_ in pF[i].get(c, {}).items():
                        axpy(yf, v, {c2 * N + j: a_}, Fd)
                    for j2, a_ in vF[i].get(j, {}).items():
                        axpy(yf, Fd.mul(v, Kprev_inv[c]), {c * N + j2: a_}, Fd)
                for y, mat, name in ((ye, Emat, "E"), (yf, Fmat, "F")):
                    coords = {free_of[c]: v for c, v in y.items() if c in free_of}
                    # invariance check: y must equal the combination read off the free columns
                    recon: dict = {}
                    for bb, v in coords.items():
                        axpy(recon, v, level.nested[bb], Fd)
                    if recon != y:
                        raise ConstructionError(f"level {level.n} is not invariant under {name}{i}")
                    for bb, v in coords.items():
                        mat.set(bb, b, v)
            Es.append(Emat)
            Fs.append(Fmat)
        level.E = Es
        level.F = Fs


@lru_cache(maxsize=16)
def get_tower(D: int, M: int, R_sq=1, budget: int | None = None) -> SphereTower:
    return SphereTower(build_params(D, M, R_sq), budget)


def build_level(params: ModelParams, rep=None, proj=None, n: int = 0, budget: int | None = None) -> SphereLevel:
    """Level F(n) for the given parameters (cached per (D, M, R_sq, budget))."""
    return get_tower(params.D, params.M, params.R_sq, budget).level(n)


# cyclic submodules ----------------------------------------------------------


@dataclass
class CyclicModule:
    parent: SphereLevel
    weights: list  # weight of each module basis vector
    vectors: list  # module basis vectors as coordinate dicts in the level basis
    origin: list  # (i, u): vector = F_i applied to module vector u; None for hw
    blocks: dict  # weight -> list of module indices

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    def energies(self) -> list[int]:
        return [w[0] for w in self.weights]


def cyclic_submodule(level: SphereLevel) -> CyclicModule:
    """Closure of e_1^{(x) n} under the quantum algebra.

    Built by descending weight layers with the lowering generators; the
    result is then checked to be stable under the raising generators.
    """
    Fd = level.field
    r = len(level.E)
    Fcols = [A.columns() for A in level.F]
    Ecols = [A.columns() for A in level.E]
    roots = level.rep.rs.simple_roots
    hw = level.weights[level.hw_index]
    weights = [hw]
    vectors = [{level.hw_index: Fd.one_poly}]
    origin: list = [None]
    blocks = {hw: [0]}
    spaces = {hw: Subspace(Fd)}
    spaces[hw].add(vectors[0])
    layer = [hw]
    while layer:
        nxt: list = []
        for mu in layer:
            for i in range(r):
                nu = _wsub(mu, roots[i])
                for u in blocks[mu]:
                    y = _apply_cols(Fcols[i], vectors[u], Fd)
                    if not y:
                        continue
                    sp = spaces.get(nu)
                    if sp is None:
                        sp = spaces[nu] = Subspace(Fd)
                        blocks[nu] = []
                        nxt.append(nu)
                    if sp.add(y):
                        blocks[nu].append(len(vectors))
                        weights.append(nu)
                        vectors.append(y)
                        origin.append((i, u))
        layer = nxt
    for mu, idxs in blocks.items():
        for i in range(r):
            nu = _wadd(mu, roots[i])
            for u in idxs:
                y = _apply_cols(Ecols[i], vectors[u], Fd)
                if y and (nu not in spaces or not spaces[nu].contains(y)):
                    raise StructuralError(f"cyclic module of level {level.n} is not stable under E{i}")
    mod = CyclicModule(level, weights, vectors, origin, blocks)
    mod._spaces = spaces  # type: ignore[attr-defined]
    return mod


def _apply_cols(cols: dict, x: dict, Fd) -> dict:
    y: dict = {}
    for b, v in x.items():
        col = cols.get(b)
        if col:
            axpy(y, v, col, Fd)
    return y


def energy_spectrum(mod: CyclicModule) -> tuple[int, dict]:
    """(E_min, {energy: multiplicity}) of a cyclic module."""
    spec: dict = {}
    for e in mod.energies():
        spec[e] = spec.get(e, 0) + 1
    return min(spec), dict(sorted(spec.items()))
