"""Coordinate operators t_i on a truncated tower of polynomial levels.

Degree-n polynomials modulo the relations are modelled as the quotient

    Q(n) = V^{(x) n} / W(n),

where W(n) is spanned by the images of P^- and P^0 on every adjacent slot
pair.  Multiplication by t_i is then e_i (x) x taken modulo W(n+1); it is a
module map by construction and the quadratic relations hold in top degree
automatically.  The part of t_i that lowers the degree is a multiple
lambda_n of the unique module map V (x) Q(n) -> Q(n-1) that agrees with the
metric contraction on the highest weight vector; the lambda_n are fixed
level by level by g^{ij} t_i t_j = R^2.  Both relation families are then
checked exactly, the antisymmetric ones included.

Whenever the joint-kernel level F(n) of :mod:`qads.sphere` is complementary
to W(n), Q(n) and F(n) are identified by projection and the operators agree
(:func:`projection_raising` gives the projected blocks as an oracle).  At
roots of unity that identification can fail; the quotient model does not
need it.

Everything here works in the ambient tensor basis and is meant for small
truncations; the ambient size is checked against the budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cyclo import CycloField, CycloScalar
from .errors import ConstructionError, ParameterError
from .linalg import SparseMatrix, inverse, kernel_basis, rref
from .sphere import SphereTower, get_tower
from .vecrep import VectorRep, tensor_action


def _ambient_weights(rep: VectorRep, n: int) -> list:
    out = [tuple([0] * rep.rs.rank)]
    for _ in range(n):
        out = [tuple(a + b for a, b in zip(w, v)) for w in out for v in rep.weights]
    return out


def relation_span(tower: SphereTower, n: int) -> dict:
    """Generators of W(n) grouped by weight, as ambient vectors."""
    N = tower.rep.dimension
    amb_w = _ambient_weights(tower.rep, n)
    gens = [dict(c) for c in tower.relations.quadratic_span] + [tower.metric.contraction_vector()]
    out: dict = {}
    for k in range(n - 1):
        left = N**k
        right = N ** (n - k - 2)
        for c in gens:
            for p in range(left):
                for s in range(right):
                    v = {(p * N * N + ij) * right + s: val for ij, val in c.items()}
                    out.setdefault(amb_w[next(iter(v))], []).append(v)
    return out


def annihilator(tower: SphereTower, n: int) -> tuple[list, list, list]:
    """Functionals vanishing on W(n), as (free columns, functionals, weights).

    Each functional is 1 at its own free column and 0 at the free columns of
    the others, so the classes of the free basis vectors form a basis of
    Q(n) dual to these functionals.
    """
    Fd = tower.field
    amb_w = _ambient_weights(tower.rep, n)
    wrows = relation_span(tower, n)
    by_w: dict = {}
    for x, w in enumerate(amb_w):
        by_w.setdefault(w, []).append(x)
    free, funcs, weights = [], [], []
    for w in sorted(by_w, reverse=True):
        cols = by_w[w]
        loc = {x: a for a, x in enumerate(cols)}
        rows = [{loc[x]: v for x, v in r.items()} for r in wrows.get(w, [])]
        for fa, vec in kernel_basis(rows, len(cols), Fd):
            free.append(cols[fa])
            funcs.append({cols[a]: v for a, v in vec.items()})
            weights.append(w)
    return free, funcs, weights


def _pair(phi: dict, y: dict, Fd: CycloField):
    acc = Fd.zero_poly
    for x, v in y.items():
        c = phi.get(x)
        if c is not None:
            acc += c * v
    return Fd.reduce(acc)


@dataclass
class QuotientLevel:
    """Q(n) with basis the classes of the free tensor basis vectors."""

    n: int
    rep: VectorRep
    free: list  # ambient index of each basis class
    funcs: list  # dual functionals on V^{(x) n}
    weights: list
    E: list
    F: list
    hw_index: int
    hw_scale: object  # class of e_1^{(x) n} = hw_scale * (basis vector hw_index)

    @property
    def dimension(self) -> int:
        return len(self.weights)

    @property
    def field(self) -> CycloField:
        return self.rep.field

    def K_power(self, i: int, b: int, sign: int = 1):
        rs = self.rep.rs
        return self.field.power(sign * rs.form(rs.simple_roots[i], self.weights[b]))

    def K(self, i: int) -> SparseMatrix:
        return SparseMatrix.diag(self.field, [self.K_power(i, b) for b in range(self.dimension)])

    def energies(self) -> list[int]:
        return [w[0] for w in self.weights]

    def coords(self, y: dict) -> dict:
        """Coordinates of the class of an ambient vector."""
        Fd = self.field
        out = {}
        for a, phi in enumerate(self.funcs):
            v = _pair(phi, y, Fd)
            if not v.is_zero():
                out[a] = v
        return out


def quotient_level(tower: SphereTower, n: int) -> QuotientLevel:
    tower.check_budget(n)
    rep, Fd = tower.rep, tower.field
    free, funcs, weights = annihilator(tower, n)
    amb = tensor_action(rep, n, budget=tower.budget)
    Es, Fs = [], []
    for mats, out in ((amb.E, Es), (amb.F, Fs)):
        for A in mats:
            cols = A.columns()
            B = SparseMatrix(Fd, (len(free), len(free)))
            for a, f in enumerate(free):
                y = cols.get(f, {})
                if not y:
                    continue
                for b, phi in enumerate(funcs):
                    v = _pair(phi, y, Fd)
                    if not v.is_zero():
                        B.set(b, a, v)
            out.append(B)
    hw = tuple([n] + [0] * (rep.rs.rank - 1))
    idx = [a for a, w in enumerate(weights) if w == hw]
    if len(idx) != 1:
        raise ConstructionError(f"quotient level {n} has a highest weight space of dimension {len(idx)}")
    scale = _pair(funcs[idx[0]], {0: Fd.one_poly}, Fd)
    if scale.is_zero():
        raise ConstructionError(f"e_1^{n} vanishes in the quotient level {n}")
    return QuotientLevel(n, rep, free, funcs, weights, Es, Fs, idx[0], scale)


# module maps ------------------------------------------------------------------


def _source_actions(rep: VectorRep, level) -> list:
    """(kind, i, matrix) for E_i, F_i on V (x) level; column index v * dim + b."""
    Fd = rep.field
    one = SparseMatrix.identity(Fd, level.dimension)
    oneV = SparseMatrix.identity(Fd, rep.dimension)
    out = []
    for i in range(len(rep.E)):
        out.append(("E", i, rep.E[i].kron(level.K(i)) + oneV.kron(level.E[i])))
        out.append(("F", i, rep.F[i].kron(one) + rep.Kinv[i].kron(level.F[i])))
    return out


def intertwiners(rep: VectorRep, src, dst) -> list[dict]:
    """Basis of module maps V (x) src -> dst, each as {(row, col): value}."""
    Fd = rep.field
    sw = [tuple(a + b for a, b in zip(v, w)) for v in rep.weights for w in src.weights]
    by_w: dict = {}
    for c, w in enumerate(sw):
        by_w.setdefault(w, []).append(c)
    unk: dict = {}
    for r, w in enumerate(dst.weights):
        for c in by_w.get(w, ()):
            unk[(r, c)] = len(unk)
    rows = []
    for kind, i, A in _source_actions(rep, src):
        At = (dst.E if kind == "E" else dst.F)[i].columns()
        eqs: dict = {}
        # (A_dst X - X A_src)[r, c] = 0
        for (k, c), u in unk.items():
            for r, v in At.get(k, {}).items():
                e = eqs.setdefault((r, c), {})
                e[u] = e[u] + v if u in e else v
        for (r, k), u in unk.items():
            for c, v in A.rows.get(k, {}).items():
                e = eqs.setdefault((r, c), {})
                e[u] = e[u] - v if u in e else -v
        for key in sorted(eqs):
            e = {a: Fd.reduce(b) for a, b in eqs[key].items()}
            e = {a: b for a, b in e.items() if not b.is_zero()}
            if e:
                rows.append(e)
    keys = sorted(unk, key=unk.get)
    return [{keys[u]: v for u, v in vec.items()} for _, vec in kernel_basis(rows, len(unk), Fd)]


def _split(X: dict, N: int, d_src: int, d_dst: int, Fd) -> list[SparseMatrix]:
    out = [SparseMatrix(Fd, (d_dst, d_src)) for _ in range(N)]
    for (r, c), v in X.items():
        i, b = divmod(c, d_src)
        out[i].set(r, b, v)
    return out


def _scalar_of(A: SparseMatrix, d: int, Fd):
    """The scalar c with A = c * identity, or None."""
    if d == 0:
        return Fd.zero_poly
    c = A.get(0, 0)
    if A == SparseMatrix.identity(Fd, d).scaled(c):
        return c
    return None


# the operators -----------------------------------------------------------------


@dataclass
class CoordinateOperators:
    tower: SphereTower
    n_max: int
    R_sq: object
    levels: list  # QuotientLevel for n = 0..n_max
    raising: dict  # (i, n) -> SparseMatrix Q(n) -> Q(n+1), n < n_max
    lowering: dict  # (i, n) -> SparseMatrix Q(n) -> Q(n-1), 1 <= n <= n_max
    lambdas: list  # lambda_n as raw polys (lambda_0 unused)
    failures: list = field(default_factory=list)
    undetermined: list = field(default_factory=list)  # lambda_n left free by the relations

    @property
    def field(self) -> CycloField:
        return self.tower.field

    @property
    def dims(self) -> list[int]:
        return [L.dimension for L in self.levels]

    @property
    def interior(self) -> range:
        return range(1, self.n_max)

    def offsets(self) -> list[int]:
        out, s = [], 0
        for d in self.dims:
            out.append(s)
            s += d
        return out

    def operator(self, i: int) -> SparseMatrix:
        """t_i on Q(0) (+) ... (+) Q(n_max); the raising part out of the top level is dropped."""
        off = self.offsets()
        tot = sum(self.dims)
        T = SparseMatrix(self.field, (tot, tot))
        blocks = [(n, n + 1, B) for (j, n), B in self.raising.items() if j == i]
        blocks += [(n, n - 1, B) for (j, n), B in self.lowering.items() if j == i]
        for n, target, B in blocks:
            for r, row in B.rows.items():
                for c, v in row.items():
                    T.set(off[target] + r, off[n] + c, v)
        return T

    def block(self, i: int, n: int, target: int) -> SparseMatrix:
        if target == n + 1:
            return self.raising[(i, n)]
        if target == n - 1:
            return self.lowering[(i, n)]
        raise ValueError("coordinate operators change the degree by one")

    def _paths(self, i: int, j: int, n: int):
        # t_i t_j on Q(n): t_j acts first
        out = []
        for Bj, mid in ((self.raising.get((j, n)), n + 1), (self.lowering.get((j, n)), n - 1)):
            if Bj is None:
                continue
            for Bi, tgt in ((self.raising.get((i, mid)), mid + 1), (self.lowering.get((i, mid)), mid - 1)):
                if Bi is not None:
                    out.append((Bj, Bi, tgt))
        return out

    def relation_residuals(self, levels=None) -> list[dict]:
        """Nonzero residuals of both relation families; empty means all exact.

        Defaults to every level below the top one (level 0 included).
        """
        Fd = self.field
        N = self.tower.rep.dimension
        levels = range(0, self.n_max) if levels is None else levels
        fam = [("antisymmetric", k, dict(c), Fd.zero_poly) for k, c in enumerate(self.tower.relations.quadratic_span)]
        fam.append(("metric", 0, self.tower.metric.contraction_vector(), Fd(self.R_sq).poly))
        bad = []
        for n in levels:
            d = self.dims[n]
            for name, k, c, rhs in fam:
                pieces: dict = {}
                for ij, coef in c.items():
                    i, j = divmod(ij, N)
                    for first, second, tgt in self._paths(i, j, n):
                        prod = (second @ first).scaled(coef)
                        pieces[tgt] = pieces[tgt] + prod if tgt in pieces else prod
                if n not in pieces:
                    pieces[n] = SparseMatrix(Fd, (d, d))
                for tgt, P in sorted(pieces.items()):
                    if tgt == n:
                        P = P - SparseMatrix.identity(Fd, d).scaled(rhs)
                    if not P.is_zero():
                        bad.append({"level": n, "family": name, "index": k, "target_level": tgt, "nnz": P.nnz})
        return bad

    def energy_shift_residuals(self) -> list[str]:
        """Blocks of t_i that do not shift the energy by the energy of e_i."""
        bad = []
        ws = self.tower.rep.weights
        for kind, blocks, step in (("raise", self.raising, 1), ("lower", self.lowering, -1)):
            for (i, n), B in sorted(blocks.items()):
                src = self.levels[n].energies()
                dst = self.levels[n + step].energies()
                if any(dst[r] - src[c] != ws[i][0] for r, row in B.rows.items() for c in row):
                    bad.append(f"{kind} t{i} level {n}")
        return bad

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "R_sq": str(self.R_sq),
            "dims": self.dims,
            "lambdas": [None] + [CycloScalar(self.field, x) for x in self.lambdas[1:]],
            "failures": self.failures,
            "undetermined": self.undetermined,
        }


def coordinate_operators(params, n_max: int, budget: int | None = None) -> CoordinateOperators:
    """Raising and lowering blocks of every t_i on Q(0), ..., Q(n_max).

    Intertwiner spaces of dimension other than one and an inconsistent
    system for the lowering scalars are recorded in ``failures`` rather
    than raised.
    """
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    tower = get_tower(params.D, params.M, params.R_sq, budget)
    tower.check_budget(n_max)
    Fd = tower.field
    rep = tower.rep
    N = rep.dimension
    levels = [quotient_level(tower, n) for n in range(n_max + 1)]
    dims = [L.dimension for L in levels]
    failures: list = []
    raising: dict = {}
    for n in range(n_max):
        lo, up = levels[n], levels[n + 1]
        for i in range(N):
            B = SparseMatrix(Fd, (dims[n + 1], dims[n]))
            for a, f in enumerate(lo.free):
                for r, v in up.coords({i * N**n + f: Fd.one_poly}).items():
                    B.set(r, a, v)
            raising[(i, n)] = B
    contraction: dict = {}
    g_corner = tower.metric.g_lower.get(N - 1, 0)
    for n in range(1, n_max + 1):
        L, lo = levels[n], levels[n - 1]
        basis = intertwiners(rep, L, lo)
        if len(basis) != 1:
            failures.append({"level": n, "family": "lowering", "reason": f"intertwiner space has dimension {len(basis)}"})
            continue
        X = basis[0]
        a = X.get((lo.hw_index, (N - 1) * dims[n] + L.hw_index))
        if a is not None:
            # agree with e_N (x) e_1^n -> g_{N1} e_1^{n-1} in the scaled quotient bases
            target = Fd.mul(Fd.mul(g_corner, lo.hw_scale), Fd.inv(L.hw_scale))
        else:
            # the map kills the highest weight vector (root of unity): unit leading entry
            a = X[min(X)]
            target = Fd.one_poly
        s = Fd.mul(target, Fd.inv(a))
        for i, B in enumerate(_split({k: Fd.mul(s, v) for k, v in X.items()}, N, dims[n], dims[n - 1], Fd)):
            contraction[(i, n)] = B
    lambdas, undetermined = _solve_lambdas(tower, params.R_sq, n_max, dims, raising, contraction, failures)
    lowering = {k: B.scaled(lambdas[k[1]]) for k, B in contraction.items()}
    return CoordinateOperators(tower, n_max, params.R_sq, levels, raising, lowering, lambdas, failures, undetermined)


def _solve_lambdas(tower, R_sq, n_max, dims, raising, contraction, failures):
    """Scalars lambda_1..lambda_{n_max} from the degree-preserving parts of both relation families.

    On Q(n) the part of c^{ij} t_i t_j that preserves the degree is
    lambda_n c^{ij} R_i C_j + lambda_{n+1} c^{ij} C_i R_j, so every matrix
    entry gives one affine equation.  Unconstrained scalars are set to zero
    and listed as undetermined.
    """
    Fd = tower.field
    N = tower.rep.dimension
    fam = [(dict(c), Fd.zero_poly) for c in tower.relations.quadratic_span]
    fam.append((tower.metric.contraction_vector(), Fd(R_sq).poly))
    rhs_col = n_max  # unknown lambda_k sits in column k - 1
    rows = []
    for n in range(n_max):
        d = dims[n]
        for c, rhs in fam:
            A = SparseMatrix(Fd, (d, d))
            B = SparseMatrix(Fd, (d, d))
            for ij, coef in c.items():
                i, j = divmod(ij, N)
                if n >= 1 and (j, n) in contraction:
                    A = A + (raising[(i, n - 1)] @ contraction[(j, n)]).scaled(coef)
                if (i, n + 1) in contraction:
                    B = B + (contraction[(i, n + 1)] @ raising[(j, n)]).scaled(coef)
            for r in range(d):
                for col in range(d):
                    e = {}
                    a, b = A.get(r, col), B.get(r, col)
                    if n >= 1 and not a.is_zero():
                        e[n - 1] = a
                    if not b.is_zero():
                        e[n] = b
                    t = rhs if r == col else Fd.zero_poly
                    if not t.is_zero():
                        e[rhs_col] = -t
                    if e:
                        rows.append(e)
    pivots, red = rref(rows, Fd)
    lambdas = [Fd.zero_poly] * (n_max + 1)
    if rhs_col in pivots:
        failures.append({"level": None, "family": "metric", "reason": "relation system for the lowering scalars is inconsistent"})
        return lambdas, []
    # reduced rows: lambda_p + (free terms) = -r[rhs]; free scalars are taken to be zero
    for p, r in zip(pivots, red):
        lambdas[p + 1] = -r.get(rhs_col, Fd.zero_poly)
    undetermined = [k + 1 for k in range(n_max) if k not in pivots]
    return lambdas, undetermined


# the joint-kernel picture, kept as an oracle ---------------------------------


def projection_raising(tower: SphereTower, n: int) -> list[SparseMatrix] | None:
    """Raising blocks on the joint-kernel levels by projecting along W.

    Returns None where F(n) or F(n+1) meets W, so that no such projection
    exists.  Columns are indexed by the basis of F(n), rows by F(n+1).
    """
    Fd = tower.field
    N = tower.rep.dimension
    frames = []
    for m in (n, n + 1):
        L = tower.level(m)
        _, funcs, _ = annihilator(tower, m)
        basis = [L.expand(b) for b in range(L.dimension)]
        if len(funcs) != len(basis):
            return None
        pinv = inverse([[_pair(phi, x, Fd) for x in basis] for phi in funcs], Fd)
        if pinv is None:
            return None
        frames.append((L, basis, funcs, pinv))
    (L0, basis0, _, _), (L1, _, funcs1, pinv1) = frames
    out = []
    for i in range(N):
        B = SparseMatrix(Fd, (L1.dimension, L0.dimension))
        shift = i * N**n
        for b, x in enumerate(basis0):
            ph = [_pair(phi, {shift + idx: v for idx, v in x.items()}, Fd) for phi in funcs1]
            for r in range(L1.dimension):
                acc = Fd.zero_poly
                for k, p in enumerate(ph):
                    if not p.is_zero():
                        acc += pinv1[r][k] * p
                acc = Fd.reduce(acc)
                if not acc.is_zero():
                    B.set(r, b, acc)
        out.append(B)
    return out
