"""Fast acceptance subset for D in {2, 3} and M in {6, 8}."""

from __future__ import annotations

import math
import sys

from .errors import QadsError

GRID = [(2, 6), (2, 8), (3, 6), (3, 8)]
LARGE_BUDGET = 10**12  # levels are stored in nested coordinates; this only bounds n


def _generic_dim(N: int, n: int) -> int:
    return math.comb(N + n - 1, n) - (math.comb(N + n - 3, n - 2) if n >= 2 else 0)


def _cyclo_checks(cap):
    from .cyclo import make_field, qnum

    for M in (6, 8):
        F = make_field(M)
        q = F.zeta
        assert q ** (2 * M) == F.one(), "q^(2M) != 1"
        assert q**M == -F.one(), "q^M != -1"
        for n in range(M + 1):
            assert qnum(M - n, F) == qnum(n, F), f"[M-n] != [n] at n={n}"
            assert q.conj() == q.inverse()
        for n in range(1, M):
            assert qnum(n, F).sign(cap) == 1, f"[{n}] not positive"


def _tower_checks(D, M, cap):
    from .rootdata import build_params
    from .sphere import get_tower
    from .unitarity import PD, assemble_ads_hilbert, unitarity_window_scan
    from .vecrep import parity_residuals, tensor_action

    p = build_params(D, M)
    t = get_tower(D, M, 1, LARGE_BUDGET)  # braid, projector and metric identities are checked here
    N = p.N
    exp = (N * (N + 1) // 2 - 1, N * (N - 1) // 2, 1)
    assert t.proj.ranks == exp, f"projector ranks {t.proj.ranks}"
    bad = parity_residuals(tensor_action(t.rep, 2), t.rs.signs)
    assert not bad, f"parity identity fails: {bad}"
    top = p.compact_window[-1] + 1
    rows = unitarity_window_scan(p, "compact", range(0, top + 1), LARGE_BUDGET, cap)
    for r in rows[:-1]:
        assert r.dim_level == _generic_dim(N, r.n), f"dim F({r.n}) = {r.dim_level}"
        assert r.verdict == PD, f"compact form at n={r.n} is {r.verdict}"
    assert rows[-1].verdict != PD, f"compact form at n={top} is still positive definite"
    h = assemble_ads_hilbert(p, LARGE_BUDGET, cap)
    assert [e["n"] for e in h.entries] == list(p.ads_window)


def _coordinate_checks(D, M, n_max, cap):
    from .coords import coordinate_operators
    from .rootdata import build_params
    from .unitarity import coordinate_adjoints

    co = coordinate_operators(build_params(D, M), n_max)
    res = co.relation_residuals()
    assert not res, f"relation residuals {res[:3]}"
    pd_levels = {(2, 8): 3, (3, 8): 4}[(D, M)]
    adj = coordinate_adjoints(coordinate_operators(build_params(D, M), pd_levels), "compact", cap=cap)
    assert adj.involution_ok, f"adjoint involution fails: {adj.involution_failures}"


def checks(cap):
    yield "cyclotomic identities", lambda: _cyclo_checks(cap)
    for D, M in GRID:
        yield f"tower D={D} M={M}", lambda D=D, M=M: _tower_checks(D, M, cap)
    yield "coordinates D=2 M=8", lambda: _coordinate_checks(2, 8, 5, cap)
    yield "coordinates D=3 M=8", lambda: _coordinate_checks(3, 8, 4, cap)


def selftest(cap: int | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    failed = 0
    for name, fn in checks(cap):
        try:
            fn()
            out.write(f"PASS {name}\n")
        except (AssertionError, QadsError) as exc:
            failed += 1
            out.write(f"FAIL {name}: {type(exc).__name__}: {exc}\n")
    out.write(f"{'ok' if not failed else 'failed'}: {failed} failing check(s)\n")
    return 0 if failed == 0 else 1
