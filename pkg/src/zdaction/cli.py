"""Command-line interface.

Subcommands: ``analyze``, ``perpoints``, ``scan``, ``correlate``, ``pairing``,
``compose``.  Output is deterministic: identical inputs give byte-identical
reports.  Exit codes: 0 success, 2 configuration error, 3 arithmetic or
precision failure, 4 enumeration cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import config as cfg
from .composition import (
    check_inheritance,
    composed_rate,
    composed_set,
    leaf_rates,
    scan_composed,
)
from .errors import ConfigError, NotMixing, ZdactionError
from .fields import Presentation
from .lyapunov import (
    directional_entropy,
    is_mixing,
    lyapunov_vectors,
    one_sided_constant,
    separation_constant,
)
from .periodic import correlation, fix_count_table, fix_table_csv, periodic_pairing
from .reals import Interval
from .uniformity import (
    DEFAULT_CAP,
    enumerate_Hk,
    fit_rate,
    phi_rate,
    scan_radius,
)


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _k_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN..MAX or K, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad k range {text!r}")
    return lo, hi


def _vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace("(", "").replace(")", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "na"
    s = f"{x:.12f}"
    return s[1:] if s.startswith("-") and not s.strip("-0.") else s


def _frac(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


def _load(ref: str) -> tuple[dict, Presentation]:
    doc, _ = cfg.load_document(ref)
    return doc, cfg.load_presentation(doc)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def _interval(iv: Interval) -> dict:
    return {"enclosure": iv.render(), "width": f"{float(iv.width):.3e}"}


def _entropy_samples(d: int) -> list[tuple[int, ...]]:
    out = []
    for i in range(d):
        for s in (1, -1):
            out.append(tuple(s if j == i else 0 for j in range(d)))
    if d > 1:
        out.append(tuple([1] * d))
        out.append(tuple([-1] * d))
    return out


def cmd_analyze(args) -> str:
    _, pres = _load(args.config)
    L = lyapunov_vectors(pres, None, args.precision)
    mixing = is_mixing(L, pres)
    places = []
    for v, vec in zip(pres.places, L.vectors):
        entry = {"label": v.label, "kind": v.kind}
        if not v.archimedean:
            entry["prime"] = v.prime
            entry["residue_degree"] = v.residue_degree
            entry["ramification"] = v.ramification
        entry["lyapunov"] = [
            dict(_interval(c.enc), exact=None if c.exact is None else f"log({c.exact})")
            for c in vec
        ]
        places.append(entry)
    report = {
        "system": pres.name,
        "d": pres.d,
        "characteristic": pres.characteristic,
        "field": repr(pres.field),
        "places": places,
        "zero_sum": [_interval(s) for s in L.zero_sum()],
        "zero_sum_ok": all(s.contains(0) for s in L.zero_sum()),
        "mixing": mixing,
        "sigma": L.sigma,
    }
    if mixing:
        C = separation_constant(L, pres)
        Cs = one_sided_constant(L, pres)
        report["separation_c"] = dict(_interval(C.enc), exact=None if C.log_of is None else C.describe())
        report["one_sided_c"] = dict(_interval(Cs.enc), exact=None if Cs.log_of is None else Cs.describe())
        report["default_B"] = _fmt(2 / float(C.enc.lo))
    else:
        report["separation_c"] = None
        report["one_sided_c"] = None
        report["default_B"] = None
    report["entropy"] = [{"w": list(w), **_interval(directional_entropy(L, w))}
                         for w in _entropy_samples(pres.d)]
    if args.output == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        head = ["place", "kind"]
        for i in range(pres.d):
            head += [f"l{i + 1}", f"l{i + 1}_width", f"l{i + 1}_exact"]
        wr.writerow(head)
        for p in places:
            row = [p["label"], p["kind"]]
            for c in p["lyapunov"]:
                row += [c["enclosure"], c["width"], c["exact"] or ""]
            wr.writerow(row)
        return buf.getvalue()
    return _dump_json(report)


# ---------------------------------------------------------------------------
# perpoints
# ---------------------------------------------------------------------------

def cmd_perpoints(args) -> str:
    _, pres = _load(args.config)
    L = lyapunov_vectors(pres, None, args.precision)
    if not is_mixing(L, pres):
        raise NotMixing(f"{pres.name!r} is not mixing: some u^n - 1 vanishes")
    rows = fix_count_table(pres, args.radius, args.precision)
    if args.output == "json":
        return _dump_json({"system": pres.name, "rows": [
            {"n": list(r["n"]), "count": r["count"], "method": r["method"], "agree": r["agree"]}
            for r in rows]})
    return fix_table_csv(rows, pres.d)


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

def _thetas(args, doc) -> list[tuple[int | None, Fraction]]:
    if args.theta is not None:
        return [(None, Fraction(args.theta))]
    sched = cfg.load_schedule(doc)
    lo, hi = args.k
    try:
        return [(k, sched.value(k)) for k in range(lo, hi + 1)]
    except ValueError as exc:
        raise ConfigError(f"--k: {exc}") from None


def cmd_scan(args) -> str:
    doc, pres = _load(args.config)
    L = lyapunov_vectors(pres, None, args.precision)
    if not is_mixing(L, pres):
        raise NotMixing(f"{pres.name!r} is not mixing; scans need a mixing system")
    C = float(separation_constant(L, pres).enc.lo)
    B = 2 / C
    reports = []
    for k, theta in _thetas(args, doc):
        H = enumerate_Hk(pres, None, theta, args.cap, k)
        reports.append((scan_radius(pres, None, H, args.property, args.window), len(H)))
    fit = fit_rate([r.theta for r, _ in reports], [r.r for r, _ in reports])
    rows = []
    for (r, size), res in zip(reports, fit.residuals):
        row = r.row()
        row["H_size"] = size
        row["log_theta"] = _fmt(math.log(r.theta))
        row["phi_bound"] = _fmt(phi_rate(B, r.theta))
        row["residual"] = _fmt(res)
        rows.append(row)
    summary = {"B": _fmt(B), "C": _fmt(C), "slope": _fmt(fit.slope), "intercept": _fmt(fit.intercept)}
    if args.output == "json":
        return _dump_json({"system": pres.name, "rows": rows, "fit": summary})
    buf = io.StringIO()
    fields = list(rows[0].keys())
    wr = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    wr.writeheader()
    wr.writerows(rows)
    buf.write("# " + " ".join(f"{k}={v}" for k, v in summary.items()) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# correlate / pairing
# ---------------------------------------------------------------------------

def _exact_out(name: str, n, value, output: str) -> str:
    if output == "csv":
        return ("n,re_num,re_den,im_num,im_den\n"
                f"\"({','.join(map(str, n))})\",{value.re.numerator},{value.re.denominator},"
                f"{value.im.numerator},{value.im.denominator}\n")
    return _dump_json({"quantity": name, "n": list(n), "value": value.render(), "text": str(value)})


def _check_n(pres: Presentation, n):
    if len(n) != pres.d:
        raise ConfigError(f"--n: expected {pres.d} components")
    if not any(n):
        raise ConfigError("--n: must be nonzero")


def cmd_correlate(args) -> str:
    _, pres = _load(args.config)
    _check_n(pres, args.n)
    fns = cfg.load_functions(args.functions, pres)
    if "g" not in fns:
        raise ConfigError("correlate needs both f and g in the functions file")
    return _exact_out("correlation", args.n, correlation(fns["f"], fns["g"], args.n, pres), args.output)


def cmd_pairing(args) -> str:
    _, pres = _load(args.config)
    _check_n(pres, args.n)
    L = lyapunov_vectors(pres, None, args.precision)
    if not is_mixing(L, pres):
        raise NotMixing(f"{pres.name!r} is not mixing")
    fns = cfg.load_functions(args.functions, pres)
    return _exact_out("pairing", args.n, periodic_pairing(fns["f"], pres, None, args.n), args.output)


# ---------------------------------------------------------------------------
# compose
# ---------------------------------------------------------------------------

def cmd_compose(args) -> str:
    doc, base = cfg.load_document(args.config)
    M, leaves = cfg.load_composition(doc, base)
    rates = leaf_rates(M)
    B = composed_rate([r.B for r in rates])
    rows = []
    for k, theta in _thetas(args, doc):
        H = composed_set(M, theta, args.cap)
        rep = scan_composed(H, args.property, args.window)
        row = rep.row()
        row["k"] = "" if k is None else k
        row["H_size"] = len(H)
        row["phi_bound"] = _fmt(phi_rate(B, theta))
        row["within_bound"] = str(rep.r <= phi_rate(B, theta) + 1e-9).lower()
        inh = check_inheritance(M, theta, args.property, args.window, args.cap)
        row["inherit_checked"] = inh.checked
        row["inherit_premise"] = inh.premise_held
        row["inherit_failures"] = len(inh.failures)
        rows.append(row)
    summary = {"B": _fmt(B)}
    for r in rates:
        summary[f"B[{r.name}]"] = _fmt(r.B)
    if args.output == "json":
        return _dump_json({"module": M.__class__.__name__, "rows": rows, "rates": summary})
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    wr.writeheader()
    wr.writerows(rows)
    buf.write("# " + " ".join(f"{k}={v}" for k, v in summary.items()) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zdaction", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, default_output):
        sp.add_argument("--config", required=True, help="config path or stock name")
        sp.add_argument("--output", choices=("json", "csv"), default=default_output)
        sp.add_argument("--precision", type=int, default=128, help="working precision in bits")

    sp = sub.add_parser("analyze", help="places, Lyapunov vectors, mixing and C")
    common(sp, "json")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("perpoints", help="periodic-point counts with oracle agreement")
    common(sp, "csv")
    sp.add_argument("--radius", type=float, default=6)
    sp.set_defaults(func=cmd_perpoints)

    for name, func, helptext in (("scan", cmd_scan, "radius scans of Property I or II"),
                                 ("compose", cmd_compose, "scans of a composed module")):
        sp = sub.add_parser(name, help=helptext)
        common(sp, "csv")
        sp.add_argument("--k", type=_k_range, default=(1, 1), help="MIN..MAX")
        sp.add_argument("--theta", type=Fraction, default=None, help="single theta overriding the schedule")
        sp.add_argument("--property", choices=("I", "II", "II-strong"), default="I")
        sp.add_argument("--window", type=float, default=10)
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
        sp.set_defaults(func=func)

    for name, func in (("correlate", cmd_correlate), ("pairing", cmd_pairing)):
        sp = sub.add_parser(name, help=f"exact {name} value for trigonometric polynomials")
        common(sp, "json")
        sp.add_argument("--functions", required=True)
        sp.add_argument("--n", type=_vector, required=True)
        sp.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except ZdactionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
