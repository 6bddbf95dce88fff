"""Command-line front end.

Subcommands: ``analyze``, ``verify``, ``scan``, ``pin-structure``,
``catalog`` and ``truncate``. Structured formats (``json-lines``, ``csv``)
carry numbers only, with floats written to 17 significant digits so that
identical inputs give byte-identical output.

Exit codes: 0 success, 1 parse or validation failure, 2 spectrum outside
the polytope, 3 catalog verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .catalog import (
    KNOWN_SETTINGS, ConstraintCatalog, FacetPair, Setting, catalog_from_table, check_pair,
    export_catalog, format_pair_cell, load_setting,
)
from .errors import NotInPolytope, QuasipinError, UnknownConstraint
from .geometry import FINITE, q_overall
from .lp.derive import verify_catalog
from .lp.dump import LPDumpWriter
from .selection import CIState, natural_occupations, pc_configurations, pinned_configurations
from .spectra import DEFAULT_TOL, Spectrum, infer_setting, validate_spectrum
from .truncation import TruncationPlan, auto_truncate, max_abs_kappa, truncate

EXIT_OK, EXIT_INPUT, EXIT_POLYTOPE, EXIT_MISMATCH = 0, 1, 2, 3

FORMATS = ("human", "json-lines", "csv")


def fmt_float(x) -> str:
    """17 significant digits; ``inf``/``-inf``/``nan`` spelled out."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(obj) -> str:
    if obj is None or isinstance(obj, (bool, str, int)) and not isinstance(obj, float):
        return json.dumps(obj)
    if isinstance(obj, float):
        return fmt_float(obj) if math.isfinite(obj) else json.dumps(fmt_float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_json_value(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_json_value(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def json_line(record: dict) -> str:
    """Compact JSON with insertion-ordered keys and fixed float formatting."""
    return _json_value(record)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with other input failures; 2 is reserved
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _setting_arg(text: str) -> Setting:
    try:
        return Setting.coerce(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"invalid setting {text!r}: {exc}") from None


def _pair_arg(text: str) -> FacetPair:
    try:
        r, s = (int(v) for v in text.split(","))
        return FacetPair(r, s)
    except (ValueError, QuasipinError) as exc:
        raise argparse.ArgumentTypeError(f"invalid pair {text!r}, expected r,s: {exc}") from None


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


_NUMBER_SPLIT = re.compile(r"[\s,;]+")


def parse_vector(text: str) -> list[float]:
    tokens = [t for t in _NUMBER_SPLIT.split(text.strip()) if t]
    if not tokens:
        raise ValueError("empty occupation vector")
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise ValueError(f"occupation vector holds non-numeric entries: {text.strip()[:60]!r}") from None


def resolve_setting(values, explicit: Setting | None, tol: float) -> Setting:
    """Explicit setting if given, else ``(round(sum), len)``."""
    return explicit if explicit is not None else infer_setting(values, tol)


# analysis -------------------------------------------------------------------

def _analyse_spectrum(values, args) -> dict:
    """Validate, optionally truncate, and compute the Q report of one vector."""
    setting = resolve_setting(values, args.setting, args.tol)
    spectrum = validate_spectrum(values, setting, args.tol)
    plan, error = None, None
    tol = args.tol
    if setting not in KNOWN_SETTINGS:
        if args.budget is None:
            raise QuasipinError(f"no constraint table for {setting}; pass --budget to truncate")
        result = auto_truncate(spectrum, args.budget, args.tol)
        plan, error, spectrum = result.plan, result.error_bound, result.spectrum
        catalog = load_setting(spectrum.setting)
        # constraints are only known up to the neglected occupation mass
        tol = args.tol + error * max(max_abs_kappa(c) for c in catalog)
    return {"report": q_overall(spectrum, tol=tol), "plan": plan, "error": error}


def _pair_key(pair: FacetPair) -> str:
    return f"{pair.r},{pair.s}"


def _verdict(q) -> str:
    if q is None:
        return "no finite Q: every constraint is pinned or indeterminate"
    if q <= 1:
        return "Q <= 1: the Pauli constraints already account for the quasipinning (trivial)"
    if q >= 2:
        return "Q >= 2: quasipinning beyond what the Pauli constraints imply (nontrivial)"
    return "1 < Q < 2: intermediate"


def _analysis_records(res: dict, extra: dict) -> list[dict]:
    report = res["report"]
    records = []
    for e in report.entries:
        records.append({
            "record": "constraint", "j": e.index, "D": e.value, "facet_distance": e.facet_distance,
            "bounds": {_pair_key(p): b for p, b in e.bounds.items()},
            "denominator": e.denominator, "q": e.q, "state": e.state, "pinned": e.pinned,
        })
    summary = {
        "record": "summary", "setting": str(report.spectrum.setting),
        "lambda": report.spectrum.values.tolist(), "q": report.q, "argmax": report.argmax,
        "d_min": report.d_min, "d_min_index": report.d_min_index,
        "truncation": str(res["plan"]) if res["plan"] else None, "error_bound": res["error"],
    }
    summary.update(extra)
    records.append(summary)
    return records


def _emit_analysis(res: dict, extra: dict, fmt: str, out) -> None:
    records = _analysis_records(res, extra)
    if fmt == "json-lines":
        out.write("".join(json_line(r) + "\n" for r in records))
        return
    if fmt == "csv":
        rows = []
        for r in records[:-1]:
            bounds = ";".join(f"{k}={fmt_float(v)}" for k, v in r["bounds"].items())
            rows.append(["constraint", r["j"], fmt_float(r["D"]), fmt_float(r["facet_distance"]), bounds,
                         fmt_float(r["denominator"]), fmt_float(r["q"]), r["state"], int(r["pinned"])])
        s = records[-1]
        rows.append(["overall", s["argmax"], fmt_float(s["d_min"]), "", "", "", fmt_float(s["q"]), "", ""])
        out.write(_csv_text(["kind", "j", "D", "facet_distance", "bounds", "denominator", "q", "state",
                             "pinned"], rows))
        return
    report = res["report"]
    s = records[-1]
    lines = [f"setting {s['setting']}"]
    if "aligned" in s:
        lines.append(f"state expressed in natural orbitals: {'yes' if s['aligned'] else 'no'}")
    if res["plan"] is not None:
        lines.append(f"truncated {res['plan']}, error bound {fmt_float(res['error'])}")
    lines.append("lambda = [" + ", ".join(fmt_float(v) for v in s["lambda"]) + "]")
    for e in report.entries:
        bounds = ", ".join(f"c*dist{p} = {fmt_float(b)}" for p, b in e.bounds.items()) or \
            f"scalar bound {fmt_float(e.denominator)}"
        lines.append(f"  D{e.index} = {fmt_float(e.value)}  facet dist {fmt_float(e.facet_distance)}"
                     f"  {bounds}  Q = {fmt_float(e.q)} [{e.state}]")
    arg = f" (D{report.argmax})" if report.argmax is not None else ""
    lines.append(f"Q = {fmt_float(report.q)}{arg}")
    lines.append(f"D_min = {fmt_float(report.d_min)} (D{report.d_min_index})")
    lines.append(f"pinned: {len(report.pinned)} of {len(report.entries)}")
    lines.append(f"verdict: {_verdict(report.q)}")
    out.write("\n".join(lines) + "\n")


def _load_state(text: str, setting: Setting) -> CIState:
    text = text.strip()
    if text.startswith("["):
        records = json.loads(text)
    else:
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
    return CIState.from_records(setting, records)


def cmd_analyze(args, out) -> int:
    text = args.values if args.values is not None else _read_input(args.input)
    extra = {}
    if args.kind == "ci-state":
        if args.setting is None:
            raise QuasipinError("ci-state input needs --setting N,d")
        spectrum, aligned = natural_occupations(_load_state(text, args.setting), args.tol)
        values = spectrum.values.tolist()
        extra["aligned"] = aligned
    else:
        values = parse_vector(text)
    _emit_analysis(_analyse_spectrum(values, args), extra, args.format, out)
    return EXIT_OK


# verification ---------------------------------------------------------------

def _row_fields(row, setting):
    return {
        "j": row.index,
        "expected_pairs": [p.as_list() for p in row.expected_pairs],
        "derived_pairs": [p.as_list() for p in row.derived_pairs],
        "expected_c": [str(c) for c in row.expected_c],
        "derived_c": [str(c) for c in row.derived_c],
        "witnesses_tight": row.witnesses_tight, "match": row.match,
    }


def _catalog_for_verify(args) -> ConstraintCatalog:
    if args.table is None:
        return load_setting(args.setting)
    parsed = catalog_from_table(_read_input(args.table), args.setting)
    try:
        equalities = load_setting(args.setting).equalities
    except QuasipinError:
        equalities = ()
    return ConstraintCatalog(parsed.setting, parsed.inequalities, equalities)


def cmd_verify(args, out) -> int:
    if args.setting is None:
        raise QuasipinError("verify needs --setting N,d")
    catalog = _catalog_for_verify(args)
    indices = args.rows
    if indices is not None:
        for j in indices:
            if not 1 <= j <= len(catalog):
                raise UnknownConstraint(f"setting {catalog.setting} has no constraint {j}")
    dump = open(args.lp_dump, "w") if args.lp_dump else None
    try:
        recorder = LPDumpWriter(dump) if dump else None
        report = verify_catalog(catalog.setting, indices, catalog=catalog, recorder=recorder)
    finally:
        if dump:
            dump.close()
    setting = catalog.setting
    if args.format == "json-lines":
        for row in report.rows:
            out.write(json_line({"record": "row", **_row_fields(row, setting)}) + "\n")
        out.write(json_line({"record": "summary", "setting": str(setting), "verified": report.n_match,
                             "rows": len(report.rows)}) + "\n")
    elif args.format == "csv":
        rows = [[row.index, format_pair_cell(row.expected_pairs, setting),
                 format_pair_cell(row.derived_pairs, setting),
                 ", ".join(map(str, row.expected_c)), ", ".join(map(str, row.derived_c)),
                 int(row.witnesses_tight), int(row.match)] for row in report.rows]
        out.write(_csv_text(["j", "expected_pairs", "derived_pairs", "expected_c", "derived_c",
                             "witnesses_tight", "match"], rows))
    else:
        for row in report.rows:
            pairs = " ".join(str(p) for p in row.derived_pairs) or "empty class"
            cs = ", ".join(map(str, row.derived_c))
            status = "ok" if row.match else (
                f"MISMATCH (table: {' '.join(map(str, row.expected_pairs)) or 'empty class'}; "
                f"c = {', '.join(map(str, row.expected_c))})")
            out.write(f"D{row.index}: pairs {pairs}  c = {cs}  {status}\n")
        out.write(f"{report.n_match}/{len(report.rows)} verified\n")
    return EXIT_OK if report.ok else EXIT_MISMATCH


# batch scan -----------------------------------------------------------------

def _batch_rows(text: str):
    """Yield ``(label, values or None, error or None)`` in input order."""
    for n, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        label = str(n)
        try:
            if stripped.startswith("{"):
                rec = json.loads(stripped)
                label = str(rec.get("label", n))
                values = [float(v) for v in rec["lambda"]]
            else:
                tokens = [t for t in _NUMBER_SPLIT.split(stripped) if t]
                try:
                    float(tokens[0])
                except ValueError:
                    label, tokens = tokens[0], tokens[1:]
                values = parse_vector(" ".join(tokens))
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            yield label, None, f"parse error: {exc}"
            continue
        yield label, values, None


SCAN_COLUMNS = ["label", "setting", "d_min", "d_min_index", "q", "argmax", "truncation", "error_bound",
                "error"]


def cmd_scan(args, out) -> int:
    rows, failures = [], 0
    for label, values, error in _batch_rows(_read_input(args.input)):
        row = dict.fromkeys(SCAN_COLUMNS)
        row["label"] = label
        if error is None:
            try:
                res = _analyse_spectrum(values, args)
                rep = res["report"]
                row.update(setting=str(rep.spectrum.setting), d_min=rep.d_min, d_min_index=rep.d_min_index,
                           q=rep.q, argmax=rep.argmax, error_bound=res["error"],
                           truncation=str(res["plan"]) if res["plan"] else None)
            except QuasipinError as exc:
                error = f"{type(exc).__name__}: {exc}"
        if error is not None:
            failures += 1
            row["error"] = error
        rows.append(row)
    if args.format == "json-lines":
        out.write("".join(json_line(r) + "\n" for r in rows))
    else:
        cells = [[r["label"], r["setting"], fmt_float(r["d_min"]), r["d_min_index"], fmt_float(r["q"]),
                  r["argmax"], r["truncation"], fmt_float(r["error_bound"]), r["error"]] for r in rows]
        if args.format == "csv":
            out.write(_csv_text(SCAN_COLUMNS, cells))
        else:
            out.write("\t".join(SCAN_COLUMNS) + "\n")
            out.write("".join("\t".join("" if c is None else str(c) for c in row) + "\n" for row in cells))
    return EXIT_INPUT if rows and failures == len(rows) else EXIT_OK


# selection sets ---------------------------------------------------------------

def cmd_pin_structure(args, out) -> int:
    if args.setting is None:
        raise QuasipinError("pin-structure needs --setting N,d")
    if args.constraint is None and args.pair is None:
        raise QuasipinError("pass --constraint J and/or --pair r,s")
    setting = args.setting
    sets = []
    if args.constraint is not None:
        catalog = load_setting(setting)
        try:
            con = catalog[args.constraint]
        except KeyError:
            raise UnknownConstraint(f"setting {setting} has no constraint {args.constraint}") from None
        sets.append((f"I_D(D{con.index})", sorted(pinned_configurations(con))))
    if args.pair is not None:
        check_pair(args.pair, setting)
        sets.append((f"I_S{args.pair}", sorted(pc_configurations(args.pair, setting))))
    inclusion = None
    if len(sets) == 2:
        inclusion = set(sets[1][1]) <= set(sets[0][1])
    if args.format == "json-lines":
        for name, confs in sets:
            out.write(json_line({"set": name, "count": len(confs),
                                 "configurations": [list(c.orbitals) for c in confs]}) + "\n")
        if inclusion is not None:
            outside = len(set(sets[1][1]) - set(sets[0][1]))
            out.write(json_line({"inclusion": inclusion, "outside": outside}) + "\n")
    elif args.format == "csv":
        out.write(_csv_text(["set", "configuration"],
                            [[name, " ".join(map(str, c.orbitals))] for name, confs in sets for c in confs]))
    else:
        for name, confs in sets:
            out.write(f"{name} in {setting}: {len(confs)} configurations\n")
            out.write("".join(f"  {c}\n" for c in confs))
        if inclusion is not None:
            outside = len(set(sets[1][1]) - set(sets[0][1]))
            text = "yes" if inclusion else f"no, {outside} configuration(s) outside"
            out.write(f"{sets[1][0]} contained in {sets[0][0]}: {text}\n")
    return EXIT_OK


# catalog dump and truncation ------------------------------------------------

def cmd_catalog(args, out) -> int:
    settings = [args.setting] if args.setting is not None else list(KNOWN_SETTINGS)
    for setting in settings:
        catalog = load_setting(setting)
        if args.format == "json-lines":
            out.write(export_catalog(catalog))
        elif args.format == "csv":
            rows = [[con.index, " ".join(map(str, con.coeffs)), format_pair_cell(con.minimal_pairs, setting),
                     ", ".join(map(str, con.prefactors))] for con in catalog]
            out.write(_csv_text(["index", "kappa", "pairs", "c"], rows))
        else:
            out.write(f"# setting {setting}: {len(catalog)} inequalities\n")
            for con in catalog:
                out.write(f"{con.index}\t{' '.join(map(str, con.coeffs))}\t"
                          f"{format_pair_cell(con.minimal_pairs, setting)}\t"
                          f"{', '.join(map(str, con.prefactors))}\n")
            for k, eq in enumerate(catalog.equalities, 1):
                out.write(f"E{k}\t{' '.join(map(str, eq))}\t(equality)\n")
    return EXIT_OK


def cmd_truncate(args, out) -> int:
    values = parse_vector(args.values if args.values is not None else _read_input(args.input))
    setting = resolve_setting(values, args.setting, args.tol)
    spectrum = validate_spectrum(values, setting, args.tol)
    if args.target is not None:
        result = truncate(spectrum, TruncationPlan.between(setting, args.target), args.budget, args.tol)
    else:
        if args.budget is None:
            raise QuasipinError("pass --target N,d or --budget for automatic truncation")
        result = auto_truncate(spectrum, args.budget, args.tol)
    plan = result.plan
    record = {"source": str(plan.source), "target": str(plan.target), "delta_n": plan.delta_n,
              "delta_d": plan.delta_d, "error_bound": result.error_bound,
              "lambda": result.spectrum.values.tolist()}
    if args.format == "json-lines":
        out.write(json_line(record) + "\n")
    elif args.format == "csv":
        out.write(_csv_text(["source", "target", "delta_n", "delta_d", "error_bound", "lambda"],
                            [[record["source"], record["target"], plan.delta_n, plan.delta_d,
                              fmt_float(result.error_bound),
                              " ".join(fmt_float(v) for v in record["lambda"])]]))
    else:
        out.write(f"{plan}\nerror bound {fmt_float(result.error_bound)}\n"
                  "lambda' = [" + ", ".join(fmt_float(v) for v in record["lambda"]) + "]\n")
    return EXIT_OK


# parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--setting", type=_setting_arg, default=argparse.SUPPRESS,
                        help="setting N,d (inferred from the input when omitted)")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help=f"numerical tolerance (default {DEFAULT_TOL})")
    common.add_argument("--budget", type=float, default=argparse.SUPPRESS,
                        help="truncation error budget for spectra outside the catalog settings")
    common.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS,
                        help="output format (default human)")
    common.add_argument("--lp-dump", metavar="PATH", default=argparse.SUPPRESS,
                        help="write every linear program solved to PATH")

    parser = _Parser(prog="quasipin", parents=[common],
                     description="Quasipinning analysis with generalized Pauli constraints.")
    parser.set_defaults(setting=None, tol=DEFAULT_TOL, budget=None, format="human", lp_dump=None)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("analyze", parents=[common], help="Q-parameter report of one spectrum or CI state")
    p.add_argument("input", nargs="?", default="-", help="input file, '-' for stdin")
    p.add_argument("--values", help="inline occupation vector, e.g. '1,1,0.9,0.1,0,0'")
    p.add_argument("--kind", choices=("spectrum", "ci-state"), default="spectrum")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", parents=[common], help="re-derive a constraint table with exact LPs")
    p.add_argument("--rows", type=lambda t: [int(v) for v in t.split(",")], help="comma-separated rows")
    p.add_argument("--table", metavar="PATH", help="verify this tab-separated table instead of the shipped one")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common], help="one summary row per spectrum of a batch file")
    p.add_argument("input", help="delimited text (one spectrum per line) or {label, lambda} records")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("pin-structure", parents=[common], help="configurations compatible with pinning")
    p.add_argument("--constraint", type=int, help="constraint index J")
    p.add_argument("--pair", type=_pair_arg, help="Pauli facet pair r,s")
    p.set_defaults(func=cmd_pin_structure)

    p = sub.add_parser("catalog", parents=[common], help="dump the embedded constraint tables")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("truncate", parents=[common], help="truncate a spectrum to a smaller setting")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--values", help="inline occupation vector")
    p.add_argument("--target", type=_setting_arg, help="target setting N',d'")
    p.set_defaults(func=cmd_truncate)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        return args.func(args, out)
    except NotInPolytope as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POLYTOPE
    except (QuasipinError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
