"""Command-line front end.

Every subcommand writes one file (or stdout) that starts with a header
echoing the version and the configuration. The worker count is not echoed
because it must not change the output.

Exit status: 0 success, 1 invalid input, 2 budget exhausted (partial output
is still written and marked), 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__, descent, pell, search, ternary
from .curve import CurveParams
from .errors import DomainError, ResourceError, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE, EXIT_USAGE = 0, 1, 2, 64

_NOT_ECHOED = {"workers", "output", "func"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}


def _header_lines(args) -> list[str]:
    return [f"twistpoints {__version__}", "config: " + json.dumps(_config(args), sort_keys=True)]


def _json_doc(args, body: dict, partial: bool = False) -> str:
    doc = {"header": {"version": __version__, "config": _config(args)}, "partial": partial}
    doc.update(body)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _curve(args) -> CurveParams:
    return CurveParams(*args.curve)


# --------------------------------------------------------------------------
# subcommands; each returns (text, exit status)


def cmd_eta(args):
    params = _curve(args)
    if args.d is not None:
        r = search.eta(params, args.d, args.cap, n_iter=args.n_iter)
        body = r.as_dict()
        if r.status == search.FOUND:
            # same minimum on the h_x scale (twice the value used here)
            body["eta_log_hx_scale"] = round(2 * r.eta_log, 12)
        return _json_doc(args, {"result": body}), EXIT_OK
    results = search.eta_scan(params, args.X, args.cap, workers=args.workers, n_iter=args.n_iter)
    found = [r for r in results if r.status == search.FOUND]
    summary = {
        "twists": len(results),
        "found": len(found),
        "rank_zero_up_to_cap": sum(r.status == search.RANK_ZERO for r in results),
        "exceeds_cap": sum(r.status == search.EXCEEDS_CAP for r in results),
        "C_emp": round(search.eta_slack_constant(params), 12),
        "observed_slack": round(search.lower_bound_constant(found), 12) if found else None,
        "min_excess": round(min(r.excess for r in found), 12) if found else None,
    }
    return _json_doc(args, {"summary": summary, "results": [r.as_dict() for r in results]}), EXIT_OK


def _scan_output(args, params, window, records, partial=False, cursor=None):
    summary = search.run_summary(params, window, records)
    if cursor is not None:
        summary["resume"] = cursor
    if args.format == "json":
        rows = [dict(zip(search.CSV_COLUMNS, r.csv_row())) for r in records]
        return _json_doc(args, {"summary": summary, "records": rows}, partial)
    lines = _header_lines(args) + ["summary: " + json.dumps(summary, sort_keys=True)]
    if partial:
        lines.append("partial: true")
    return search.records_csv(records, lines)


def cmd_scan(args):
    params = _curve(args)
    window = search.SearchWindow(args.X, alpha=args.alpha, H=args.H)
    try:
        records = list(
            search.enumerate_low_points(
                params, window, workers=args.workers, n_iter=args.n_iter,
                max_candidates=args.max_candidates, resume=args.resume,
            )
        )
    except ResourceError as exc:
        return _scan_output(args, params, window, exc.partial, True, exc.cursor), EXIT_RESOURCE
    return _scan_output(args, params, window, records), EXIT_OK


def cmd_audit(args):
    params = _curve(args)
    rep = descent.uniqueness_audit(params, args.bound, sample=args.sample, seed=args.seed)
    body = json.loads(rep.to_json())
    body["ok"] = rep.ok
    return _json_doc(args, {"audit": body}), EXIT_OK if rep.ok else EXIT_INVALID


def cmd_family(args):
    params = _curve(args)
    members = search.minimal_family(params, args.d1_max, args.x1_max, n_iter=args.n_iter)
    if args.format == "json":
        rows = [
            {"d": m.d, "d1": m.d1, "x1": m.x1, "point": list(m.record.point.as_tuple()),
             "h_hat": round(m.record.h_hat, 12), "ratio": round(m.ratio, 12)}
            for m in members
        ]
        return _json_doc(args, {"members": rows}), EXIT_OK
    import csv, io

    buf = io.StringIO()
    for line in _header_lines(args):
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "d1", "x1", "x", "y", "z", "h_hat", "ratio"])
    for m in members:
        P = m.record.point
        w.writerow([m.d, m.d1, m.x1, P.x, P.y, P.z, f"{m.record.h_hat:.12g}", f"{m.ratio:.12g}"])
    return buf.getvalue(), EXIT_OK


def cmd_ternary(args):
    form = ternary.TernaryForm(*args.f)
    scales = ternary.scale_list(*args.scales)
    rep = ternary.exponent_scan(form, scales, eps=args.eps, fixed_V=args.fixed_V, workers=args.workers)
    if args.format == "json":
        rows = [
            {"scale": r.scale, "box": list(r.box.as_tuple()), "count": r.count,
             "bound": round(r.bound, 9), "ratio": round(r.ratio, 12)}
            for r in rep.rows
        ]
        return _json_doc(args, {"rows": rows, "max_ratio": round(rep.max_ratio, 12)}), EXIT_OK
    return rep.to_csv(_header_lines(args)), EXIT_OK


def cmd_pell(args):
    table = pell.pell_table(args.X, workers=args.workers)
    sa = pell.siegel_average(args.X, table=table)
    fr = pell.conjA_frequency(args.X, args.eps, table=table)
    summary = {
        "siegel_sum": round(sa.total, 6),
        "siegel_ratio": round(sa.ratio, 12),
        "discriminants": sa.count,
        "conjA_fraction": round(fr.fraction, 12),
        "conjA_blocks": [[b.lo, b.hi, b.total, b.hits] for b in fr.blocks],
    }
    if args.format == "json":
        return _json_doc(args, {"summary": summary}), EXIT_OK
    lines = _header_lines(args) + ["summary: " + json.dumps(summary, sort_keys=True)]
    return pell.pell_csv(table, lines), EXIT_OK


def cmd_exponents(args):
    params = _curve(args)
    X_list = sorted(args.X_list)
    window = search.SearchWindow(max(X_list), alpha=args.alpha)
    records = list(search.enumerate_low_points(params, window, workers=args.workers, n_iter=args.n_iter))
    rows = search.count_series(records, X_list)
    body = {"series": [r._asdict() for r in rows]}
    for key in ("N", "N_star"):
        try:
            fit = search.fit_exponent([(r.X, getattr(r, key)) for r in rows])
            body[f"fit_{key}"] = {k: (round(v, 12) if isinstance(v, float) else v) for k, v in fit._asdict().items()}
        except DomainError as exc:
            body[f"fit_{key}"] = {"error": str(exc)}
    return _json_doc(args, body), EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="twistpoints", description="Low-height points on quadratic twists.")
    p.add_argument("--version", action="version", version=f"twistpoints {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, curve=True, fmt="json"):
        if curve:
            sp.add_argument("--curve", nargs=2, type=int, metavar=("A", "B"), required=True)
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        sp.add_argument("--output", help="output file (default: stdout)")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("eta", help="minimal canonical height of one twist, or of all d <= X")
    common(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--d", type=int)
    g.add_argument("--X", type=int)
    sp.add_argument("--cap", type=float, required=True, help="cap on log eta")
    sp.add_argument("--n-iter", type=int, default=8)
    sp.set_defaults(func=cmd_eta)

    sp = sub.add_parser("scan", help="enumerate low-height points over d <= X")
    common(sp, fmt="csv")
    sp.add_argument("--X", type=int, required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=float)
    g.add_argument("--H", type=float)
    sp.add_argument("--n-iter", type=int, default=8)
    sp.add_argument("--max-candidates", type=int)
    sp.add_argument("--resume", type=int, default=0)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("descent-audit", help="exhaustive uniqueness audit of the descent")
    common(sp)
    sp.add_argument("--bound", type=int, default=60)
    sp.add_argument("--sample", type=float, default=1.0, help="fraction of points audited")
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("family", help="explicit twists where eta is about d^(1/8)")
    common(sp, fmt="csv")
    sp.add_argument("--d1-max", type=int, required=True)
    sp.add_argument("--x1-max", type=int, required=True)
    sp.add_argument("--n-iter", type=int, default=8)
    sp.set_defaults(func=cmd_family)

    sp = sub.add_parser("ternary", help="count solutions of f1 u1 v1^2 + f2 u2 v2^2 + f3 u3 v3^2 = 0")
    common(sp, curve=False, fmt="csv")
    sp.add_argument("--f", nargs=3, type=int, required=True, metavar=("F1", "F2", "F3"))
    sp.add_argument("--scales", nargs=2, type=float, required=True, metavar=("LO", "HI"))
    sp.add_argument("--eps", type=float, default=ternary.DEFAULT_EPS)
    sp.add_argument("--fixed-V", type=float)
    sp.set_defaults(func=cmd_ternary)

    sp = sub.add_parser("pell", help="units and class numbers of real quadratic fields")
    common(sp, curve=False, fmt="csv")
    sp.add_argument("--X", type=int, required=True)
    sp.add_argument("--eps", type=float, default=0.5, help="exponent slack for the unit-size frequency")
    sp.set_defaults(func=cmd_pell)

    sp = sub.add_parser("exponents", help="N and N* counts over several X with log-log fits")
    common(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--X-list", type=int, nargs="+", required=True)
    sp.add_argument("--n-iter", type=int, default=8)
    sp.set_defaults(func=cmd_exponents)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    if args.workers < 1:
        print("--workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        text, status = args.func(args)
    except (ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())
