"""Sparse exact linear algebra over a cyclotomic field.

Vectors are ``dict[int, fmpq_poly]`` with no stored zeros; matrices are
row-keyed dicts of such vectors.  Everything is exact, so elimination
uses the lowest-index nonzero entry as pivot and reduced echelon forms are
canonical.
"""

from __future__ import annotations

from dataclasses import dataclass

from flint import fmpq_poly

from .cyclo import CycloField, CycloScalar

Vec = dict  # dict[int, fmpq_poly]


def axpy(y: Vec, a: fmpq_poly, x: Vec, F: CycloField) -> None:
    """y += a * x in place."""
    mul = F.mul
    for k, v in x.items():
        t = mul(a, v)
        if k in y:
            s = y[k] + t
            if s.is_zero():
                del y[k]
            else:
                y[k] = s
        else:
            y[k] = t


def scale(x: Vec, a: fmpq_poly, F: CycloField) -> Vec:
    if a.is_zero():
        return {}
    mul = F.mul
    return {k: mul(a, v) for k, v in x.items()}


def vec_add(x: Vec, y: Vec) -> Vec:
    out = dict(x)
    for k, v in y.items():
        if k in out:
            s = out[k] + v
            if s.is_zero():
                del out[k]
            else:
                out[k] = s
        else:
            out[k] = v
    return out


def vec_conj(x: Vec, F: CycloField) -> Vec:
    return {k: F.conj_poly(v) for k, v in x.items()}


def dot(x: Vec, y: Vec, F: CycloField) -> fmpq_poly:
    if len(x) > len(y):
        x, y = y, x
    acc = fmpq_poly([])
    for k, v in x.items():
        w = y.get(k)
        if w is not None:
            acc += v * w
    return F.reduce(acc)


class SparseMatrix:
    """Exact sparse matrix with fmpq_poly entries reduced in ``field``."""

    __slots__ = ("field", "shape", "rows")

    def __init__(self, field: CycloField, shape: tuple[int, int], rows: dict | None = None):
        self.field = field
        self.shape = (int(shape[0]), int(shape[1]))
        self.rows = rows if rows is not None else {}

    @classmethod
    def identity(cls, field, n):
        one = field.one_poly
        return cls(field, (n, n), {i: {i: one} for i in range(n)})

    @classmethod
    def diag(cls, field, entries):
        rows = {i: {i: e} for i, e in enumerate(entries) if not e.is_zero()}
        return cls(field, (len(entries), len(entries)), rows)

    @classmethod
    def from_entries(cls, field, shape, entries):
        m = cls(field, shape)
        for (i, j), v in entries.items():
            m.set(i, j, v)
        return m

    def set(self, i, j, v):
        if isinstance(v, CycloScalar):
            v = v.poly
        elif not isinstance(v, fmpq_poly):
            v = fmpq_poly([v])
        v = self.field.reduce(v)
        row = self.rows.setdefault(i, {})
        if v.is_zero():
            row.pop(j, None)
            if not row:
                del self.rows[i]
        else:
            row[j] = v

    def get(self, i, j) -> fmpq_poly:
        return self.rows.get(i, {}).get(j, self.field.zero_poly)

    def entry(self, i, j) -> CycloScalar:
        return CycloScalar(self.field, self.get(i, j))

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def __repr__(self):
        return f"SparseMatrix({self.shape[0]}x{self.shape[1]}, nnz={self.nnz}, M={self.field.M})"

    def copy(self):
        return SparseMatrix(self.field, self.shape, {i: dict(r) for i, r in self.rows.items()})

    def transpose(self):
        out: dict = {}
        for i, r in self.rows.items():
            for j, v in r.items():
                out.setdefault(j, {})[i] = v
        return SparseMatrix(self.field, (self.shape[1], self.shape[0]), out)

    def conj_transpose(self):
        F = self.field
        out: dict = {}
        for i, r in self.rows.items():
            for j, v in r.items():
                out.setdefault(j, {})[i] = F.conj_poly(v)
        return SparseMatrix(F, (self.shape[1], self.shape[0]), out)

    def columns(self) -> dict:
        return self.transpose().rows

    def apply(self, x: Vec) -> Vec:
        """Matrix times column vector."""
        F = self.field
        out = {}
        for i, r in self.rows.items():
            acc = dot(r, x, F)
            if not acc.is_zero():
                out[i] = acc
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        F = self.field
        orows = other.rows
        out = {}
        for i, r in self.rows.items():
            acc: dict = {}
            for k, a in r.items():
                ok = orows.get(k)
                if ok is None:
                    continue
                for j, b in ok.items():
                    t = a * b
                    if j in acc:
                        acc[j] += t
                    else:
                        acc[j] = t
            row = {}
            for j, v in acc.items():
                v = F.reduce(v)
                if not v.is_zero():
                    row[j] = v
            if row:
                out[i] = row
        return SparseMatrix(F, (self.shape[0], other.shape[1]), out)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        out = {i: dict(r) for i, r in self.rows.items()}
        for i, r in other.rows.items():
            if i in out:
                row = vec_add(out[i], r)
                if row:
                    out[i] = row
                else:
                    del out[i]
            else:
                out[i] = dict(r)
        return SparseMatrix(self.field, self.shape, out)

    def __neg__(self):
        return SparseMatrix(self.field, self.shape, {i: {j: -v for j, v in r.items()} for i, r in self.rows.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, a) -> "SparseMatrix":
        if isinstance(a, CycloScalar):
            a = a.poly
        elif not isinstance(a, fmpq_poly):
            a = fmpq_poly([a])
        if a.is_zero():
            return SparseMatrix(self.field, self.shape)
        F = self.field
        return SparseMatrix(F, self.shape, {i: scale(r, a, F) for i, r in self.rows.items()})

    def kron(self, other: "SparseMatrix") -> "SparseMatrix":
        F = self.field
        m2, n2 = other.shape
        out = {}
        for i1, r1 in self.rows.items():
            for i2, r2 in other.rows.items():
                row = {}
                for j1, a in r1.items():
                    for j2, b in r2.items():
                        row[j1 * n2 + j2] = F.mul(a, b)
                out[i1 * m2 + i2] = row
        return SparseMatrix(F, (self.shape[0] * m2, self.shape[1] * n2), out)

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    __hash__ = None

    def submatrix(self, rows, cols) -> "SparseMatrix":
        cidx = {c: k for k, c in enumerate(cols)}
        out = {}
        for a, i in enumerate(rows):
            r = self.rows.get(i)
            if not r:
                continue
            row = {cidx[j]: v for j, v in r.items() if j in cidx}
            if row:
                out[a] = row
        return SparseMatrix(self.field, (len(rows), len(cols)), out)

    def to_dense(self) -> list[list[CycloScalar]]:
        F = self.field
        return [[CycloScalar(F, self.get(i, j)) for j in range(self.shape[1])] for i in range(self.shape[0])]

    def rank(self) -> int:
        return len(rref(list(self.rows.values()), self.field)[0])


def commutator(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    return a @ b - b @ a


# elimination --------------------------------------------------------------


def rref(rows: list[Vec], F: CycloField) -> tuple[list[int], list[Vec]]:
    """Reduced row echelon form.  Returns (pivot columns, rows) sorted by pivot."""
    inv = F.inv
    basis: dict[int, Vec] = {}
    for r in rows:
        v = dict(r)
        # forward reduction against existing pivots
        for p in sorted(k for k in v if k in basis):
            c = v.get(p)
            if c is not None:
                axpy(v, -c, basis[p], F)
        if not v:
            continue
        p = min(v)
        v = scale(v, inv(v[p]), F)
        v[p] = F.one_poly
        # make the new pivot column zero elsewhere
        for q, b in basis.items():
            c = b.get(p)
            if c is not None:
                axpy(b, -c, v, F)
        basis[p] = v
    pivots = sorted(basis)
    return pivots, [basis[p] for p in pivots]


def nullspace(rows: list[Vec], ncols: int, F: CycloField) -> list[Vec]:
    """Canonical kernel basis: one vector per free column, 1 at that column."""
    return [v for _, v in kernel_basis(rows, ncols, F)]


def kernel_basis(rows: list[Vec], ncols: int, F: CycloField) -> list[tuple[int, Vec]]:
    """Like :func:`nullspace` but paired with the free column of each vector."""
    pivots, red = rref(rows, F)
    pivset = set(pivots)
    out = []
    free_cols = [c for c in range(ncols) if c not in pivset]
    # column view of the reduced rows restricted to free columns
    colmap: dict[int, list[tuple[int, fmpq_poly]]] = {}
    for p, r in zip(pivots, red):
        for j, v in r.items():
            if j != p:
                colmap.setdefault(j, []).append((p, v))
    for f in free_cols:
        v = {f: F.one_poly}
        for p, c in colmap.get(f, ()):
            v[p] = -c
        out.append((f, v))
    return out


class Subspace:
    """Incrementally built subspace with exact membership and coordinates.

    Keeps a reduced echelon basis together with the combination of
    user-supplied generators that produced each echelon row.
    """

    def __init__(self, field: CycloField):
        self.field = field
        self.gens: list[Vec] = []
        self._ech: dict[int, tuple[Vec, Vec]] = {}  # pivot -> (row, coeffs over gens)

    def __len__(self):
        return len(self.gens)

    def _reduce(self, v: Vec) -> tuple[Vec, Vec]:
        F = self.field
        v = dict(v)
        comb: Vec = {}
        for p in sorted(k for k in v if k in self._ech):
            c = v.get(p)
            if c is None:
                continue
            row, rc = self._ech[p]
            axpy(v, -c, row, F)
            axpy(comb, c, rc, F)
        return v, comb

    def add(self, v: Vec) -> bool:
        """Add v if independent; returns True when the dimension grew."""
        F = self.field
        res, comb = self._reduce(v)
        if not res:
            return False
        idx = len(self.gens)
        self.gens.append(dict(v))
        # res = v - comb.gens  =>  coefficients of res over gens
        rc = {k: -c for k, c in comb.items()}
        rc[idx] = F.one_poly
        p = min(res)
        s = F.inv(res[p])
        res = scale(res, s, F)
        rc = scale(rc, s, F)
        for q, (row, rcq) in self._ech.items():
            c = row.get(p)
            if c is not None:
                axpy(row, -c, res, F)
                axpy(rcq, -c, rc, F)
        self._ech[p] = (res, rc)
        return True

    def contains(self, v: Vec) -> bool:
        return not self._reduce(v)[0]

    def coordinates(self, v: Vec) -> Vec:
        """Coefficients of v over the generators; raises if v is outside."""
        res, comb = self._reduce(v)
        if res:
            raise ValueError("vector is not in the subspace")
        return comb


# Hermitian forms ------------------------------------------------------------


@dataclass
class Inertia:
    positive: int
    negative: int
    zero: int


def inertia(H: list[list[fmpq_poly]], F: CycloField, cap: int | None = None) -> Inertia:
    """Exact inertia of a Hermitian matrix by congruence diagonalisation."""
    n = len(H)
    A = [list(r) for r in H]
    active = list(range(n))
    pos = neg = 0
    mul, inv, conj = F.mul, F.inv, F.conj_poly
    while active:
        piv = None
        for k in active:
            if not A[k][k].is_zero():
                piv = k
                break
        if piv is None:
            pair = None
            for a in active:
                for b in active:
                    if a != b and not A[a][b].is_zero():
                        pair = (a, b)
                        break
                if pair:
                    break
            if pair is None:
                break
            a, b = pair
            # x_a -> x_a + t x_b with t = conj(h_ab) gives diagonal 2|h_ab|^2 > 0
            tc = A[a][b]
            t = conj(tc)
            for j in active:
                A[a][j] = F.reduce(A[a][j] + mul(tc, A[b][j]))
            for i in active:
                A[i][a] = F.reduce(A[i][a] + mul(A[i][b], t))
            piv = a
        d = A[piv][piv]
        s = F.sign_poly(d, cap)
        if s > 0:
            pos += 1
        else:
            neg += 1
        dinv = inv(d)
        rest = [k for k in active if k != piv]
        for i in rest:
            hi = A[i][piv]
            if hi.is_zero():
                continue
            f = mul(hi, dinv)
            row_p = A[piv]
            Ai = A[i]
            for j in rest:
                hp = row_p[j]
                if not hp.is_zero():
                    Ai[j] = F.reduce(Ai[j] - f * hp)
        active = rest
    return Inertia(pos, neg, n - pos - neg)


def leading_minor_witness(H: list[list[fmpq_poly]], F: CycloField, cap: int | None = None):
    """First leading principal minor that is not positive.

    Returns ``(index, sign)`` with a 0-based index, or ``None`` when all
    leading minors are positive.  Minors are tracked through the pivots of
    an elimination without row exchanges.
    """
    n = len(H)
    A = [list(r) for r in H]
    mul, inv = F.mul, F.inv
    minor = F.one_poly
    for k in range(n):
        d = A[k][k]
        minor = mul(minor, d)
        s = F.sign_poly(minor, cap)
        if s <= 0:
            return k, s
        dinv = inv(d)
        for i in range(k + 1, n):
            hi = A[i][k]
            if hi.is_zero():
                continue
            f = mul(hi, dinv)
            for j in range(k + 1, n):
                hp = A[k][j]
                if not hp.is_zero():
                    A[i][j] = F.reduce(A[i][j] - f * hp)
    return None


def determinant(A: list[list[fmpq_poly]], F: CycloField) -> fmpq_poly:
    n = len(A)
    A = [list(r) for r in A]
    det = F.one_poly
    for k in range(n):
        p = next((i for i in range(k, n) if not A[i][k].is_zero()), None)
        if p is None:
            return F.zero_poly
        if p != k:
            A[k], A[p] = A[p], A[k]
            det = -det
        d = A[k][k]
        det = F.mul(det, d)
        dinv = F.inv(d)
        for i in range(k + 1, n):
            if A[i][k].is_zero():
                continue
            f = F.mul(A[i][k], dinv)
            for j in range(k + 1, n):
                if not A[k][j].is_zero():
                    A[i][j] = F.reduce(A[i][j] - f * A[k][j])
    return det


def inverse(A: list[list[fmpq_poly]], F: CycloField) -> list[list[fmpq_poly]] | None:
    """Exact inverse of a square dense matrix, or None when it is singular."""
    n = len(A)
    rows = []
    for i, r in enumerate(A):
        v = {j: x for j, x in enumerate(r) if not x.is_zero()}
        v[n + i] = F.one_poly
        rows.append(v)
    pivots, red = rref(rows, F)
    if pivots[:n] != list(range(n)):
        return None
    return [[red[i].get(n + j, F.zero_poly) for j in range(n)] for i in range(n)]
