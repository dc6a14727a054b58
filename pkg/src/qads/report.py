"""Serialization of reports to JSON and CSV.

Scalars from the cyclotomic field become ``{"coeffs", "conductor", "approx"}``
objects: the exact rational coefficients in the power basis of the primitive
2M-th root of unity, plus a 20-digit decimal rendering for humans.  Field
order follows insertion order, so identical reports give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import mpmath

from .cyclo import CycloScalar
from .errors import SinkError

APPROX_DIGITS = 20


def _approx(x: CycloScalar, digits: int = APPROX_DIGITS) -> str:
    with mpmath.workdps(digits + 15):
        z = mpmath.exp(1j * mpmath.pi / x.field.M)
        val = mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * z**k for k, c in enumerate(x.coeffs()))
        re = mpmath.nstr(val.real, digits, min_fixed=-5, max_fixed=5)
        im = mpmath.nstr(val.imag, digits, min_fixed=-5, max_fixed=5)
    # values exactly real or imaginary print without a spurious tiny part
    if x.is_real():
        return re
    if (x + x.conj()).is_zero():
        return f"{im}j"
    sign = "-" if im.startswith("-") else "+"
    return f"{re}{sign}{im.lstrip('-')}j"


def scalar_to_json(x: CycloScalar) -> dict:
    return {
        "coeffs": [str(c) for c in x.coeffs()],
        "conductor": 2 * x.field.M,
        "approx": _approx(x),
    }


def to_jsonable(obj):
    if isinstance(obj, CycloScalar):
        return scalar_to_json(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render_json(report) -> str:
    return json.dumps(to_jsonable(report), indent=2, ensure_ascii=True) + "\n"


def _is_scalar_cell(v) -> bool:
    return v is None or isinstance(v, (bool, int, float, str))


def table_of(report) -> tuple[list[str], list[dict]]:
    """Rows of a tabular report; nested values are dropped from CSV output."""
    data = to_jsonable(report)
    if isinstance(data, dict):
        for key in ("rows", "entries"):
            if isinstance(data.get(key), list):
                rows = data[key]
                break
        else:
            rows = [data]
    else:
        rows = list(data)
    header: list[str] = []
    for r in rows:
        for k, v in r.items():
            if k not in header and _is_scalar_cell(v):
                header.append(k)
    return header, [{k: r.get(k) for k in header} for r in rows]


def render_csv(report, header: list[str] | None = None) -> str:
    cols, rows = table_of(report)
    if header and not cols:
        cols = header
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue()


def emit_report(report, fmt: str = "json", sink=None, header: list[str] | None = None) -> str:
    """Render ``report`` and write it to ``sink`` (a path, a file object, or None).

    Returns the rendered text.  A failed write raises :class:`SinkError`.
    """
    if fmt == "json":
        text = render_json(report)
    elif fmt == "csv":
        text = render_csv(report, header)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    if sink is None:
        return text
    try:
        if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
            with open(sink, "w", encoding="ascii", newline="") as fh:
                fh.write(text)
        else:
            sink.write(text)
            sink.flush()
    except OSError as exc:
        raise SinkError(f"cannot write report: {exc}") from exc
    return text
