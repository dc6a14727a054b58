"""Contravariant forms, unitarity verdicts and the reports built on them.

The form on a highest-weight-generated module is fixed by <hw, hw> = 1,
orthogonality of distinct weight spaces and

    <x, F_i y> = s_i <E_i x, y>,

antilinear in the first slot.  The compact star has every s_i = +1; the
AdS star uses the signs (-1)^{<alpha_i, energy>} from the root data.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .cyclo import CycloScalar
from .errors import ClaimViolation, ParameterError, ResourceError, StructuralError
from .linalg import Inertia, SparseMatrix, inertia, inverse, leading_minor_witness, rref
from .rootdata import ModelParams
from .sphere import CyclicModule, SphereTower, _apply_cols, _wadd, cyclic_submodule, get_tower

log = logging.getLogger(__name__)

PD = "positive-definite"
DEGENERATE = "degenerate"
INDEFINITE = "indefinite"


@dataclass(frozen=True)
class StarStructure:
    kind: str  # "compact" | "ads"
    signs: tuple


def star_structure(kind: str, rs) -> StarStructure:
    if kind == "compact":
        return StarStructure("compact", tuple(1 for _ in rs.simple_roots))
    if kind == "ads":
        return StarStructure("ads", tuple(rs.signs))
    raise ValueError(f"unknown star structure {kind!r}")


@dataclass
class GramForm:
    module: CyclicModule
    star: StarStructure
    blocks: dict  # weight -> (module indices, dense block of fmpq_poly)
    verdict: str = ""
    witness: int | None = None
    inertia: Inertia | None = None
    block_inertia: dict = field(default_factory=dict)

    @property
    def field(self):
        return self.module.parent.field

    def matrix(self) -> SparseMatrix:
        """The full Gram matrix in the module basis (block diagonal)."""
        Fd = self.field
        n = self.module.dimension
        m = SparseMatrix(Fd, (n, n))
        for idx, blk in self.blocks.values():
            for a, ia in enumerate(idx):
                for b, ib in enumerate(idx):
                    if not blk[a][b].is_zero():
                        m.set(ia, ib, blk[a][b])
        return m

    @property
    def quotient_dimension(self) -> int:
        """Dimension of the module modulo the radical of the form."""
        return self.inertia.positive + self.inertia.negative

    @property
    def quotient_verdict(self) -> str:
        """Verdict for the nondegenerate quotient (the irreducible module)."""
        if self.inertia.negative:
            return INDEFINITE
        return PD if self.inertia.positive else DEGENERATE

    def quotient_spectrum(self) -> dict:
        spec: dict = {}
        for w, inn in self.block_inertia.items():
            k = inn.positive + inn.negative
            if k:
                spec[w[0]] = spec.get(w[0], 0) + k
        return dict(sorted(spec.items()))


def contravariant_gram(mod: CyclicModule, star: StarStructure, cap: int | None = None, judge: bool = True) -> GramForm:
    level = mod.parent
    Fd = level.field
    roots = level.rep.rs.simple_roots
    Ecols = [A.columns() for A in level.E]
    spaces = mod._spaces  # type: ignore[attr-defined]
    for i in range(len(roots)):
        if _apply_cols(Ecols[i], mod.vectors[0], Fd):
            raise StructuralError("module generator is not a highest weight vector")
    pos_in_block = {}
    for w, idx in mod.blocks.items():
        for k, u in enumerate(idx):
            pos_in_block[u] = k
    blocks: dict = {}
    hw = mod.weights[0]
    blocks[hw] = ([0], [[Fd.one_poly]])
    for w in _ordered_weights(mod):
        if w == hw:
            continue
        idx = mod.blocks[w]
        size = len(idx)
        # E_i w_a expressed in the basis of the block above, for each i used
        above: dict = {}
        for b_ in idx:
            i, _ = mod.origin[b_]
            if i in above:
                continue
            nu = _wadd(w, roots[i])
            sp = spaces[nu]
            above[i] = [sp.coordinates(_apply_cols(Ecols[i], mod.vectors[a], Fd)) for a in idx]
        G = [[None] * size for _ in range(size)]
        for bcol, b_ in enumerate(idx):
            i, u = mod.origin[b_]
            nu = _wadd(w, roots[i])
            Gup = blocks[nu][1]
            s = star.signs[i]
            ku = pos_in_block[u]
            for arow in range(size):
                coords = above[i][arow]
                acc = Fd.zero_poly
                for c, val in coords.items():
                    g = Gup[c][ku]
                    if not g.is_zero():
                        acc = acc + Fd.conj_poly(val) * g
                acc = Fd.reduce(acc)
                G[arow][bcol] = acc if s == 1 else -acc
        for a in range(size):
            for b in range(a, size):
                if G[a][b] != Fd.conj_poly(G[b][a]):
                    raise StructuralError(f"contravariant form is not Hermitian at weight {w}")
        blocks[w] = (idx, G)
    gf = GramForm(mod, star, blocks)
    if judge:
        judge_gram(gf, cap)
    return gf


def _ordered_weights(mod: CyclicModule) -> list:
    seen = []
    s = set()
    for w in mod.weights:
        if w not in s:
            s.add(w)
            seen.append(w)
    return seen


def judge_gram(gf: GramForm, cap: int | None = None) -> str:
    Fd = gf.field
    pos = neg = zero = 0
    witness = None
    for w in _ordered_weights(gf.module):
        idx, G = gf.blocks[w]
        inn = inertia(G, Fd, cap)
        gf.block_inertia[w] = inn
        pos += inn.positive
        neg += inn.negative
        zero += inn.zero
        if witness is None and (inn.negative or inn.zero):
            hit = leading_minor_witness(G, Fd, cap)
            witness = idx[hit[0]] if hit is not None else idx[0]
    gf.inertia = Inertia(pos, neg, zero)
    gf.witness = witness
    gf.verdict = INDEFINITE if neg else (DEGENERATE if zero else PD)
    return gf.verdict


def is_positive_definite(H, Fd, cap: int | None = None) -> tuple[str, int | None]:
    """Verdict and witness for a Hermitian matrix given as rows of fmpq_poly or CycloScalar."""
    rows = [[x.poly if hasattr(x, "poly") else x for x in r] for r in H]
    inn = inertia(rows, Fd, cap)
    if inn.negative == 0 and inn.zero == 0:
        return PD, None
    hit = leading_minor_witness(rows, Fd, cap)
    verdict = INDEFINITE if inn.negative else DEGENERATE
    return verdict, (hit[0] if hit else None)


# scans and reports -----------------------------------------------------------


@dataclass
class ScanRow:
    n: int
    dim_level: int | None = None
    dim_cyclic: int | None = None
    verdict: str | None = None
    E_min: int | None = None
    witness_index: int | None = None
    dim_quotient: int | None = None
    quotient_verdict: str | None = None
    E_min_quotient: int | None = None
    skipped: str | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dim_level": self.dim_level,
            "dim_cyclic": self.dim_cyclic,
            "verdict": self.verdict,
            "E_min": self.E_min,
            "witness_index": self.witness_index,
            "dim_quotient": self.dim_quotient,
            "quotient_verdict": self.quotient_verdict,
            "E_min_quotient": self.E_min_quotient,
            "skipped": self.skipped,
        }


def scan_row(tower: SphereTower, n: int, kind: str, cap: int | None = None) -> ScanRow:
    try:
        level = tower.level(n)
    except ResourceError as exc:
        return ScanRow(n, skipped=str(exc))
    mod = tower.cyclic(n)
    gf = contravariant_gram(mod, star_structure(kind, tower.rs), cap)
    qspec = gf.quotient_spectrum()
    return ScanRow(
        n=n,
        dim_level=level.dimension,
        dim_cyclic=mod.dimension,
        verdict=gf.verdict,
        E_min=min(mod.energies()),
        witness_index=gf.witness,
        dim_quotient=gf.quotient_dimension,
        quotient_verdict=gf.quotient_verdict,
        E_min_quotient=min(qspec) if qspec else None,
    )


def _scan_worker(args):
    D, M, R_sq, budget, n, kind, cap = args
    return scan_row(get_tower(D, M, R_sq, budget), n, kind, cap)


def unitarity_window_scan(params: ModelParams, form_kind: str, n_range, budget: int | None = None,
                          cap: int | None = None, workers: int = 1) -> list[ScanRow]:
    """One row per n; rows come back ordered by n whatever the completion order."""
    ns = list(n_range)
    if workers > 1 and len(ns) > 1:
        jobs = [(params.D, params.M, params.R_sq, budget, n, form_kind, cap) for n in ns]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_scan_worker, jobs))
    else:
        tower = get_tower(params.D, params.M, params.R_sq, budget)
        rows = [scan_row(tower, n, form_kind, cap) for n in ns]
    return sorted(rows, key=lambda r: r.n)


@dataclass
class HilbertSpaceReport:
    params: ModelParams
    entries: list  # dicts: n, dimension, E_min, cyclic_dimension, energies
    total_dimension: int
    L_min_sq: Fraction

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "entries": self.entries,
            "total_dimension": self.total_dimension,
            "R_sq": str(self.params.R_sq),
            "L_min_sq": str(self.L_min_sq),
            "L_min_sq_over_R_sq": str(Fraction(1, self.params.M_S**2)),
        }


def assemble_ads_hilbert(params: ModelParams, budget: int | None = None, cap: int | None = None) -> HilbertSpaceReport:
    """Direct sum over the AdS window of the unitary U_q^fin modules.

    Each summand is the module generated by e_1^{(x) n} modulo the radical
    of its sign-twisted form; the report fails loudly if some summand
    carries a form with a negative direction.
    """
    tower = get_tower(params.D, params.M, params.R_sq, budget)
    star = star_structure("ads", tower.rs)
    entries = []
    for n in params.ads_window:
        mod = tower.cyclic(n)
        gf = contravariant_gram(mod, star, cap)
        if gf.quotient_verdict != PD:
            raise ClaimViolation(
                f"AdS window module n={n} is not unitary ({gf.quotient_verdict})",
                witness={"n": n, "verdict": gf.verdict, "witness_index": gf.witness,
                         "inertia": vars(gf.inertia)},
            )
        spec = gf.quotient_spectrum()
        entries.append({
            "n": n,
            "dimension": gf.quotient_dimension,
            "E_min": min(spec),
            "cyclic_dimension": mod.dimension,
            "cyclic_verdict": gf.verdict,
            "energies": {str(k): v for k, v in spec.items()},
        })
    total = sum(e["dimension"] for e in entries)
    return HilbertSpaceReport(params, entries, total, params.L_min_sq)


@dataclass
class SectorReport:
    params: ModelParams
    rows: list  # dicts: n, sector, dim_level, dim_cyclic, compact/ads verdicts

    def sectors(self) -> dict:
        out: dict = {}
        for r in self.rows:
            out.setdefault(r["sector"], []).append(r["n"])
        return out

    def to_dict(self) -> dict:
        return {"params": self.params.to_dict(), "rows": self.rows}


def classify(compact: ScanRow, ads: ScanRow) -> str:
    if compact.skipped:
        return "skipped"
    if compact.verdict == PD:
        return "compact-unitary"
    if ads.quotient_verdict == PD:
        return "ads-unitary"
    return "neither"


def sector_classification(params: ModelParams, n_max: int, budget: int | None = None,
                          cap: int | None = None) -> SectorReport:
    """Classify the levels n = 0 .. n_max - 1 (the upper end is exclusive)."""
    tower = get_tower(params.D, params.M, params.R_sq, budget)
    rows = []
    for n in range(n_max):
        c = scan_row(tower, n, "compact", cap)
        a = scan_row(tower, n, "ads", cap)
        rows.append({
            "n": n,
            "sector": classify(c, a),
            "dim_level": c.dim_level,
            "dim_cyclic": c.dim_cyclic,
            "compact_verdict": c.verdict,
            "ads_verdict": a.verdict,
            "ads_quotient_verdict": a.quotient_verdict,
            "dim_ads_quotient": a.dim_quotient,
        })
    return SectorReport(params, rows)


# adjoints of the coordinate operators ------------------------------------------


def _dense(A: SparseMatrix) -> list:
    return [[A.get(i, j) for j in range(A.shape[1])] for i in range(A.shape[0])]


def _sparse(rows: list, Fd) -> SparseMatrix:
    m = SparseMatrix(Fd, (len(rows), len(rows[0]) if rows else 0))
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            if not v.is_zero():
                m.set(i, j, v)
    return m


def level_gram(level, star: StarStructure, cap: int | None = None) -> tuple[SparseMatrix, GramForm]:
    """Gram matrix of a level in its own basis, when the level is cyclic on its top vector."""
    Fd = level.field
    mod = cyclic_submodule(level)
    gf = contravariant_gram(mod, star, cap)
    if mod.dimension != level.dimension:
        raise ParameterError(
            f"level {level.n} is not generated by its highest weight vector "
            f"({mod.dimension} of {level.dimension}); the form is not defined on the whole level"
        )
    Q = SparseMatrix(Fd, (level.dimension, level.dimension))
    for c, vec in enumerate(mod.vectors):
        for r, v in vec.items():
            Q.set(r, c, v)
    Qinv = inverse(_dense(Q), Fd)
    Qinv = _sparse(Qinv, Fd)
    return Qinv.conj_transpose() @ gf.matrix() @ Qinv, gf


@dataclass
class AdjointReport:
    kind: str
    n_max: int
    levels: list  # source levels on which the span test is run
    involution_failures: list
    span: dict  # i -> {"in_span": bool, "C": list | None, "witness": str | None}

    @property
    def involution_ok(self) -> bool:
        return not self.involution_failures

    def C_matrix(self):
        """C[j][i] with t_i^* = sum_j C[j][i] (-1)^E t_j (-1)^E, when every column exists."""
        cols = [self.span[i]["C"] for i in sorted(self.span)]
        if any(c is None for c in cols):
            return None
        return [[cols[i][j] for i in range(len(cols))] for j in range(len(cols))]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_max": self.n_max,
            "levels": list(self.levels),
            "involution_ok": self.involution_ok,
            "involution_failures": self.involution_failures,
            "span": {
                str(i): {
                    "in_span": v["in_span"],
                    "C": v["C"],
                    "witness": v["witness"],
                    "local": {str(n): c for n, c in sorted(v["local"].items())},
                }
                for i, v in sorted(self.span.items())
            },
            "C": self.C_matrix(),
        }


def coordinate_adjoints(coords, kind: str = "compact", grams: list | None = None,
                        cap: int | None = None) -> AdjointReport:
    """Adjoints of t_i for the Gram inner products on the levels of ``coords``.

    Every level must carry a positive-definite form.  The adjoint of each t_i
    is compared with the span of (-1)^E t_j (-1)^E on the source levels
    0..n_max-1, where the truncated tower does not cut either side.
    """
    Fd = coords.field
    tower = coords.tower
    N = tower.rep.dimension
    star = star_structure(kind, tower.rs)
    if grams is None:
        grams = []
        for L in coords.levels:
            G, gf = level_gram(L, star, cap)
            if gf.verdict != PD:
                raise ParameterError(f"level {L.n} has a {gf.verdict} {kind} form; adjoints need positive-definite forms")
            grams.append(G)
    Ginv = [_sparse(inverse(_dense(G), Fd), Fd) for G in grams]

    def adj(X: SparseMatrix, n: int, m: int) -> SparseMatrix:
        # X: level n -> level m;  X^* = G_n^{-1} X^dagger G_m
        return Ginv[n] @ X.conj_transpose() @ grams[m]

    blocks = [((i, n), n, n + 1, B) for (i, n), B in coords.raising.items()]
    blocks += [((i, n), n, n - 1, B) for (i, n), B in coords.lowering.items()]
    inv_bad = []
    for key, n, m, B in sorted(blocks, key=lambda t: (t[0], t[2])):
        if not (adj(adj(B, n, m), m, n) == B):
            inv_bad.append(f"t{key[0]}: {n}->{m}")
    parity = [[1 if e % 2 == 0 else -1 for e in L.energies()] for L in coords.levels]

    def conj_parity(B: SparseMatrix, n: int, m: int) -> SparseMatrix:
        out = SparseMatrix(Fd, B.shape)
        for r, row in B.rows.items():
            for c, v in row.items():
                out.set(r, c, v if parity[m][r] * parity[n][c] == 1 else -v)
        return out

    def equations(i: int, n: int) -> list:
        # unknowns C_j (column N carries the target); t_i^* on level n is the
        # adjoint of t_i between level n and its neighbours
        out = []
        for m in (n - 1, n + 1):
            if m < 0 or m > coords.n_max:
                continue
            target = adj(coords.block(i, m, n), m, n)
            fam = [conj_parity(coords.block(j, n, m), n, m) for j in range(N)]
            keys = {(r, c) for r, row in target.rows.items() for c in row}
            for Bj in fam:
                keys |= {(r, c) for r, row in Bj.rows.items() for c in row}
            for r, c in sorted(keys):
                e = {j: fam[j].get(r, c) for j in range(N) if not fam[j].get(r, c).is_zero()}
                t = target.get(r, c)
                if not t.is_zero():
                    e[N] = -t
                if e:
                    out.append(e)
        return out

    def solve(rows: list):
        pivots, red = rref(rows, Fd)
        if N in pivots:
            return None, None
        C = [Fd.zero_poly] * N
        for p, r in zip(pivots, red):
            C[p] = -r.get(N, Fd.zero_poly)
        return C, [j for j in range(N) if j not in pivots]

    src_levels = range(0, coords.n_max)
    span = {}
    for i in range(N):
        local = {}
        rows = []
        for n in src_levels:
            eq = equations(i, n)
            rows += eq
            C, free = solve(eq)
            local[n] = None if C is None else [CycloScalar(Fd, c) for c in C]
        C, free = solve(rows)
        if C is not None:
            span[i] = {
                "in_span": True,
                "C": [CycloScalar(Fd, c) for c in C],
                "local": local,
                "witness": f"coefficients {free} not fixed by the truncated tower" if free else None,
            }
            continue
        bad = [n for n in src_levels if local[n] is None]
        if bad:
            w = f"on level {bad[0]} the adjoint has a component outside the span"
        else:
            w = "each level is in the span but the coefficients differ between levels"
        span[i] = {"in_span": False, "C": None, "local": local, "witness": w}
    return AdjointReport(kind, coords.n_max, list(src_levels), inv_bad, span)
