"""Command-line entry point: ``qads <command> [options]``.

Exit codes: 0 success, 1 internal or certification failure, 2 bad
parameters, 3 resource budget exceeded, 4 a computed result contradicts an
expected unitarity statement, 5 the report could not be written.  Errors are
reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError, QadsError
from .report import emit_report
from .rootdata import build_params
from .vecrep import DEFAULT_BUDGET

log = logging.getLogger("qads")

COMMANDS = ("params", "rmatrix", "level", "gram", "scan", "sectors", "hilbert", "adjoints", "selftest")
DEFAULT_CAP = 4096
SCAN_COLUMNS = ["n", "dim_level", "dim_cyclic", "verdict", "E_min", "witness_index",
                "dim_quotient", "quotient_verdict", "E_min_quotient", "skipped"]


@dataclass
class RunConfig:
    command: str
    D: int | None = None
    M: int | None = None
    R_sq: Fraction = Fraction(1)
    n: int | None = None
    n_max: int | None = None
    n_range: tuple | None = None
    form: str = "compact"
    output: str = "json"
    output_path: str | None = None
    budget: int = DEFAULT_BUDGET
    precision_cap: int = DEFAULT_CAP
    workers: int = 1
    verbose: bool = False
    params: object = None  # ModelParams, filled in by validate()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _n_range(text: str) -> tuple:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise ParameterError(f"--n-range expects a..b, got {text!r}") from None
    if lo < 0:
        raise ParameterError("--n-range must start at n >= 0")
    return (lo, hi)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"--R-sq expects a rational number, got {text!r}") from None


def _env_budget() -> int:
    raw = os.environ.get("QADS_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise ParameterError(f"QADS_BUDGET must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qads", description="Exact computations for the quantum AdS / sphere algebra at q = exp(i pi/M).")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, n=False, n_max=False, n_range=False, form=False):
        sp.add_argument("--D", type=int, required=True)
        sp.add_argument("--M", type=int, required=True)
        sp.add_argument("--R-sq", dest="R_sq", type=_rational, default=Fraction(1))
        if n:
            sp.add_argument("--n", type=int, required=True)
        if n_max:
            sp.add_argument("--n-max", dest="n_max", type=int, required=True)
        if n_range:
            sp.add_argument("--n-range", dest="n_range", type=_n_range, required=True)
        if form:
            sp.add_argument("--form", choices=("compact", "ads"), default="compact")
        sp.add_argument("--output", choices=("json", "csv"), default="json")
        sp.add_argument("--output-path", dest="output_path")
        sp.add_argument("--budget", type=int, default=None, help="maximum ambient tensor dimension (env QADS_BUDGET)")
        sp.add_argument("--precision-cap", dest="precision_cap", type=int, default=DEFAULT_CAP)

    common(sub.add_parser("params", help="derived parameters and unitarity windows"))
    common(sub.add_parser("rmatrix", help="braid operator, projectors and metric"))
    common(sub.add_parser("level", help="the polynomial level F(n)"), n=True)
    common(sub.add_parser("gram", help="contravariant form on the cyclic module at level n"), n=True, form=True)
    sc = sub.add_parser("scan", help="unitarity verdicts over a range of levels")
    common(sc, n_range=True, form=True)
    sc.add_argument("--workers", type=int, default=1)
    common(sub.add_parser("sectors", help="classify levels 0 .. n_max-1"), n_max=True)
    common(sub.add_parser("hilbert", help="assemble the AdS Hilbert space"))
    common(sub.add_parser("adjoints", help="coordinate operators and their adjoints"), n_max=True, form=True)
    st = sub.add_parser("selftest", help="fast acceptance subset")
    st.add_argument("--precision-cap", dest="precision_cap", type=int, default=DEFAULT_CAP)
    return p


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(command=ns.command, verbose=ns.verbose)
    for k in vars(cfg):
        if hasattr(ns, k) and getattr(ns, k) is not None:
            setattr(cfg, k, getattr(ns, k))
    if getattr(ns, "budget", None) is None:
        cfg.budget = _env_budget()
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    """Checks that must pass before any computation starts."""
    if cfg.command == "selftest":
        if cfg.precision_cap < 2:
            raise ParameterError("--precision-cap must be at least 2 bits")
        return
    params = build_params(cfg.D, cfg.M, cfg.R_sq)
    if cfg.budget < 1:
        raise ParameterError("--budget must be positive")
    if cfg.precision_cap < 2:
        raise ParameterError("--precision-cap must be at least 2 bits")
    if cfg.n is not None and cfg.n < 0:
        raise ParameterError("--n must be >= 0")
    if cfg.n_max is not None and cfg.n_max < 0:
        raise ParameterError("--n-max must be >= 0")
    if cfg.workers < 1:
        raise ParameterError("--workers must be >= 1")
    if cfg.command == "adjoints" and cfg.n_max < 1:
        raise ParameterError("adjoints needs --n-max >= 1")
    cfg.params = params


# commands --------------------------------------------------------------------


def cmd_params(cfg):
    return cfg.params.to_dict()


def _entries(A) -> list:
    return [[i, j, A.entry(i, j)] for i in sorted(A.rows) for j in sorted(A.rows[i])]


def cmd_rmatrix(cfg):
    from .frt import braid_residuals, metric_residuals, projector_residuals
    from .sphere import get_tower

    t = get_tower(cfg.D, cfg.M, cfg.R_sq, cfg.budget)
    return {
        "params": cfg.params.to_dict(),
        "eigenvalues": list(t.braid.eigenvalue_scalars()),
        "projector_ranks": list(t.proj.ranks),
        "residuals": {
            "braid": braid_residuals(t.braid),
            "projectors": projector_residuals(t.proj),
            "metric": metric_residuals(t.metric, t.proj),
        },
        "quantum_dimension": t.metric.qdim,
        "g_upper": _entries(t.metric.g_upper),
        "R_hat": _entries(t.braid.matrix),
    }


def cmd_level(cfg):
    from math import comb

    from .sphere import get_tower

    t = get_tower(cfg.D, cfg.M, cfg.R_sq, cfg.budget)
    L = t.level(cfg.n)
    mod = t.cyclic(cfg.n)
    N, n = cfg.params.N, cfg.n
    generic = comb(N + n - 1, n) - (comb(N + n - 3, n - 2) if n >= 2 else 0)
    mult: dict = {}
    for w in L.weights:
        mult[w] = mult.get(w, 0) + 1
    return {
        "params": cfg.params.to_dict(),
        "n": n,
        "dimension": L.dimension,
        "generic_dimension": generic,
        "ambient_dimension": L.ambient_dimension,
        "cyclic_dimension": mod.dimension,
        "hw_index": L.hw_index,
        "E_min": min(L.energies()) if L.dimension else None,
        "weights": [{"weight": list(w), "multiplicity": m} for w, m in sorted(mult.items(), reverse=True)],
    }


def cmd_gram(cfg):
    from .sphere import get_tower
    from .unitarity import contravariant_gram, star_structure

    t = get_tower(cfg.D, cfg.M, cfg.R_sq, cfg.budget)
    mod = t.cyclic(cfg.n)
    gf = contravariant_gram(mod, star_structure(cfg.form, t.rs), cfg.precision_cap)
    blocks = []
    for w, (idx, _G) in gf.blocks.items():
        bi = gf.block_inertia.get(w)
        blocks.append({"weight": list(w), "size": len(idx), "inertia": vars(bi) if bi else None})
    return {
        "params": cfg.params.to_dict(),
        "n": cfg.n,
        "form": cfg.form,
        "signs": list(gf.star.signs),
        "dimension": mod.dimension,
        "verdict": gf.verdict,
        "witness_index": gf.witness,
        "inertia": vars(gf.inertia),
        "dim_quotient": gf.quotient_dimension,
        "quotient_verdict": gf.quotient_verdict,
        "blocks": blocks,
        "matrix": _entries(gf.matrix()),
    }


def cmd_scan(cfg):
    from .unitarity import unitarity_window_scan

    lo, hi = cfg.n_range
    rows = unitarity_window_scan(cfg.params, cfg.form, range(lo, hi + 1), cfg.budget, cfg.precision_cap, cfg.workers)
    return {"params": cfg.params.to_dict(), "form": cfg.form, "rows": [r.to_dict() for r in rows]}


def cmd_sectors(cfg):
    from .unitarity import sector_classification

    rep = sector_classification(cfg.params, cfg.n_max, cfg.budget, cfg.precision_cap)
    d = rep.to_dict()
    d["sectors"] = rep.sectors()
    return d


def cmd_hilbert(cfg):
    from .unitarity import assemble_ads_hilbert

    return assemble_ads_hilbert(cfg.params, cfg.budget, cfg.precision_cap).to_dict()


def cmd_adjoints(cfg):
    from .coords import coordinate_operators
    from .unitarity import coordinate_adjoints

    co = coordinate_operators(cfg.params, cfg.n_max, cfg.budget)
    rep = coordinate_adjoints(co, cfg.form, cap=cfg.precision_cap)
    return {
        "params": cfg.params.to_dict(),
        "coordinates": co.to_dict(),
        "relation_residuals": co.relation_residuals(),
        "energy_shift_residuals": co.energy_shift_residuals(),
        "adjoints": rep.to_dict(),
    }


HANDLERS = {
    "params": cmd_params,
    "rmatrix": cmd_rmatrix,
    "level": cmd_level,
    "gram": cmd_gram,
    "scan": cmd_scan,
    "sectors": cmd_sectors,
    "hilbert": cmd_hilbert,
    "adjoints": cmd_adjoints,
}


def _fail(exc: Exception, stderr) -> int:
    if isinstance(exc, QadsError):
        payload, code = exc.to_dict(), exc.exit_code
    else:
        payload, code = {"error": type(exc).__name__, "message": str(exc)}, 1
    stderr.write(json.dumps(payload, default=str) + "\n")
    return code


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        if cfg.command == "selftest":
            from .selftest import selftest

            return selftest(cfg.precision_cap, stdout)
        report = HANDLERS[cfg.command](cfg)
        header = SCAN_COLUMNS if cfg.command == "scan" else None
        emit_report(report, cfg.output, cfg.output_path or stdout, header)
        return 0
    except Exception as exc:  # every failure leaves as structured JSON
        return _fail(exc, stderr)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:
        return _fail(exc, sys.stderr)
    if getattr(cfg, "verbose", False):
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr, format="%(name)s: %(message)s")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
