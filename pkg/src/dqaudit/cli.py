"""Command-line front end.

Exit status: 0 no findings, 1 warnings only, 2 errors present, 3 tool
failure, 64 usage error. ``diff`` exits 0 when the tables match and 1 when
they differ; ``benford`` exits 1 when the column is flagged.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from decimal import Decimal
from pathlib import Path
from typing import Sequence

from . import __version__, analytics, checks, compare, generate, ingest, report
from .errors import DQError, ReadError
from .findings import CHECKS, Dimension, exit_status
from .model import Kind, Table, cell, render
from .parsing import parse_generic

log = logging.getLogger("dqaudit")

EX_USAGE = 64
EX_FAILURE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _check_list() -> str:
    width = max(len(c) for c in CHECKS)
    lines = ["checks (id, dimension, default severity):"]
    for c in CHECKS.values():
        lines.append(f"  {c.check_id:<{width}}  {c.dimension.value:<13} {c.severity.label:<7} {c.description}")
    return "\n".join(lines)


def _ids(text: str) -> list[str]:
    ids = [t.strip() for t in text.split(",") if t.strip()]
    unknown = [i for i in ids if i not in CHECKS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown check id(s): {', '.join(unknown)}")
    return ids


def _names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _fraction(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("must be in (0, 1]")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _add_ingest(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input")
    g.add_argument("--delimiter", default=",", help="field delimiter (default ',')")
    g.add_argument("--decimal-separator", default=".", help="decimal separator (default '.')")
    g.add_argument("--no-header", action="store_true", help="first row is data")
    g.add_argument("--locale", choices=sorted(ingest.LOCALE_PATTERNS),
                   help="enable two-digit-year dates in DD/MM or MM/DD order")
    g.add_argument("--null", action="append", metavar="TOKEN",
                   help="null token (repeatable; default '', NA, NULL)")
    g.add_argument("--no-trim", action="store_true", help="keep surrounding whitespace")
    g.add_argument("--lossy", action="store_true", help="replace invalid UTF-8 instead of failing")


def _opts(args) -> ingest.IngestOptions:
    kw = {}
    if args.null is not None:
        kw["null_tokens"] = frozenset(args.null)
    try:
        return ingest.IngestOptions(delimiter=args.delimiter, has_header=not args.no_header,
                                    decimal_separator=args.decimal_separator, locale=args.locale,
                                    trim_whitespace=not args.no_trim, lossy=args.lossy, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dqaudit", description="Data-quality audit engine for CSV tables.",
                     epilog=_check_list(), formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"dqaudit {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more diagnostics on stderr")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def cmd(name, help_text, **kw):
        return sub.add_parser(name, help=help_text, description=help_text,
                              formatter_class=argparse.RawDescriptionHelpFormatter, **kw)

    p = cmd("audit", "run the check suite and print findings plus a scorecard", epilog=_check_list())
    p.add_argument("file", help="CSV file to audit")
    p.add_argument("--schema", help="schema file (.dq)")
    p.add_argument("--ref", action="append", default=[], metavar="[NAME=]PATH",
                   help="parent table for foreign keys (repeatable)")
    p.add_argument("--checks", type=_ids, help="comma-separated check ids to run (default: all but timeliness)")
    p.add_argument("--skip", type=_ids, default=[], help="comma-separated check ids to skip")
    p.add_argument("--format", choices=report.FORMATS, default="text")
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--benford-min-sample", type=_positive_int, default=100)
    p.add_argument("--dominance-threshold", type=_fraction, default=0.5)
    p.add_argument("--outlier-k", type=_positive_float, default=1.5)
    p.add_argument("--delimiters", default=";,|", metavar="D1,D2",
                   help="multi-value delimiters for the atomicity check (default ';' and '|')")
    p.add_argument("--max-age", type=_positive_float, metavar="DAYS",
                   help="flag the file when older than DAYS (enables the timeliness check)")
    p.add_argument("--manual", action="append", default=[], metavar="DIMENSION=NOTE",
                   help="manual scorecard annotation, e.g. Believable='source is the ledger'")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    _add_ingest(p)

    p = cmd("stats", "descriptive statistics per column")
    p.add_argument("file")
    p.add_argument("--columns", type=_names, help="comma-separated columns (default: all)")
    p.add_argument("-k", type=_positive_int, default=10, help="top/bottom values to list")
    p.add_argument("--bands", help="stratify numeric columns by comma-separated band edges, e.g. 0,10,20")
    p.add_argument("--crosstab", type=_names, metavar="A,B", help="cross-tabulate two columns")
    p.add_argument("--gaps", action="store_true", help="also report gaps in numeric/date columns")
    p.add_argument("--step", default="1", help="expected step for --gaps (default 1)")
    p.add_argument("--duplicates", type=_names, nargs="?", const=[], metavar="COLS",
                   help="report duplicate groups over COLS (all columns when empty)")
    _add_ingest(p)

    p = cmd("benford", "first-digit analysis of a numeric column")
    p.add_argument("file")
    p.add_argument("--column", required=True)
    p.add_argument("--min-sample", type=_positive_int, default=100)
    _add_ingest(p)

    p = cmd("diff", "compare two tables cell by cell")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--key", type=_names, help="pair rows by these key columns")
    p.add_argument("--mode", choices=compare.MODES, help="alignment (default: key when --key, else position)")
    p.add_argument("--epsilon", type=Decimal, help="ignore numeric differences up to this size")
    p.add_argument("--ignore-case", action="store_true", help="compare text ignoring case and whitespace runs")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--members", type=_names, metavar="COL_A,COL_B",
                   help="instead of a diff, partition the values of column A (left) and B (right)")
    _add_ingest(p)

    p = cmd("merge", "join two tables on key columns")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--key", type=_names, required=True, metavar="COL[=RIGHT_COL],...",
                   help="key columns; use LEFT=RIGHT when the names differ")
    p.add_argument("--join", choices=compare.JOINS, default="inner")
    p.add_argument("-o", "--output")
    _add_ingest(p)

    p = cmd("unique", "keep the first row of each distinct key")
    p.add_argument("file")
    p.add_argument("--columns", type=_names, default=[], help="key columns (default: whole row)")
    p.add_argument("-o", "--output")
    _add_ingest(p)

    p = cmd("generate", "synthesize a table from a schema")
    p.add_argument("--schema", required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--fill", action="append", default=[], metavar="COL=SPEC",
                   help="random | fixed:VALUE | inc:START[:STEP] (repeatable)")
    p.add_argument("-o", "--output")

    p = cmd("inject", "corrupt a table with seeded errors and log the ground truth")
    p.add_argument("file")
    p.add_argument("--rate", type=_fraction, required=True)
    p.add_argument("--kinds", required=True,
                   help="comma-separated kinds with optional weights, e.g. "
                        "'TransposeDigits,BlankOut:2,DecimalShift(+1),UnitScale(1000)'")
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--schema", help="schema (ranges for OutOfRange, patterns for FormatCorrupt)")
    p.add_argument("--log", required=True, help="write the injection log (JSON) here")
    p.add_argument("-o", "--output")
    _add_ingest(p)

    p = cmd("score", "scorecard from a JSON audit report, or detection rates against an injection log")
    p.add_argument("report", help="JSON report written by 'audit --format json'")
    p.add_argument("--log", help="injection log; prints recall/precision instead of the scorecard")
    p.add_argument("--clean", help="the clean table the log refers to (required with --log)")
    p.add_argument("--manual", action="append", default=[], metavar="DIMENSION=NOTE")
    _add_ingest(p)
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        report.write_report(text, output)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _manual(items: Sequence[str]) -> dict[Dimension, str]:
    out = {}
    for item in items:
        name, sep, note = item.partition("=")
        if not sep:
            raise UsageError(f"--manual expects DIMENSION=NOTE, got {item!r}")
        try:
            out[Dimension.parse(name)] = note
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return out


def _load(path: str, args, schema=None, name=None) -> Table:
    return ingest.load_csv(path, _opts(args), schema=schema, name=name)


def cmd_audit(args) -> int:
    schema = ingest.load_schema(args.schema) if args.schema else None
    name = schema.table if schema is not None else None
    table = _load(args.file, args, schema, name)
    refs = {}
    for item in args.ref:
        ref_name, sep, path = item.partition("=")
        if not sep:
            ref_name, path = Path(item).stem, item
        refs[ref_name] = _load(path, args, name=ref_name)
    selected = set(args.checks) if args.checks else set(checks.DEFAULT_CHECKS)
    if args.max_age is not None:
        selected.add("timeliness")
    selected -= set(args.skip)
    config = checks.AuditConfig(
        checks=frozenset(selected), delimiters=tuple(d for d in args.delimiters.split(",") if d),
        benford_min_sample=args.benford_min_sample, dominance_threshold=args.dominance_threshold,
        outlier_k=args.outlier_k, max_age_days=args.max_age,
        source_modified=os.stat(args.file).st_mtime if args.max_age is not None else None)
    findings = checks.audit(table, schema, refs=refs, config=config, threads=args.threads)
    card = report.build_scorecard(findings, [table], manual=_manual(args.manual))
    _emit(report.render_report(findings, card, args.format, table=table), args.output)
    return exit_status(findings)


def cmd_stats(args) -> int:
    table = _load(args.file, args)
    names = args.columns or table.headers
    lines = [f"dqaudit stats v1: {table.name} ({table.row_count} rows, {len(table.columns)} columns)"]
    edges = None
    if args.bands:
        try:
            edges = [cell(parse_generic(e.strip())) for e in args.bands.split(",")]
        except (TypeError, ValueError):
            raise UsageError(f"bad --bands {args.bands!r}") from None
        if len(edges) < 2:
            raise UsageError("--bands needs at least two edges")
    for name in names:
        col = table.column(name)
        s = analytics.descriptive_stats(col, args.k)
        lines.append(f"column {name}:")
        lines.append(f"  count {s.count}, nulls {s.null_count}, distinct {len(s.frequency)}")
        if s.frequency:
            lines.append(f"  min {render(s.min)}, max {render(s.max)}")
        if s.mean is not None:
            lines.append(f"  sum {render(s.total)}, mean {s.mean_text}")
        lines.append("  top: " + ", ".join(f"{render(v)} ({n})" for v, n in s.top_k))
        lines.append("  bottom: " + ", ".join(f"{render(v)} ({n})" for v, n in s.bottom_k))
        if edges is not None and col.numeric is not None and col.numeric.count:
            strata = analytics.stratify(col, list(zip(edges, edges[1:])))
            for (lo, hi), n in zip(strata.bands, strata.counts):
                lines.append(f"  band [{render(lo)}, {render(hi)}): {n}")
            lines.append(f"  out of band: {strata.out_of_band}")
        if args.gaps and (col.numeric is not None or col.kinds() <= {Kind.DATE}) and col.kinds():
            g = analytics.find_gaps(col, Decimal(args.step))
            lines.append(f"  gaps: {len(g.gaps)} ({g.missing_total} missing), duplicates {len(g.duplicates)}, "
                         f"irregular {len(g.irregular)}, sequential pairs {g.sequential}")
            for after, missing in g.gaps:
                lines.append(f"    after {render(after)}: {missing} missing")
    if args.crosstab:
        if len(args.crosstab) != 2:
            raise UsageError("--crosstab needs exactly two columns")
        a, b = (table.column(n) for n in args.crosstab)
        lines.append(f"crosstab {a.name} x {b.name}:")
        for (x, y), n in analytics.cross_tabulate(a, b).items():
            lines.append(f"  {render(x) if x is not None else 'null'} | {render(y) if y is not None else 'null'}: {n}")
    if args.duplicates is not None:
        d = analytics.find_duplicates(table, args.duplicates)
        lines.append(f"duplicate groups over {', '.join(d.key_columns)}: {len(d.groups)}")
        for g in d.groups:
            lines.append("  rows " + ", ".join(map(str, g)))
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_benford(args) -> int:
    table = _load(args.file, args)
    r = analytics.benford(table.column(args.column), args.min_sample)
    lines = [f"dqaudit benford v1: {table.name}.{args.column}, n={r.n}",
             "digit observed proportion expected"]
    for d in range(9):
        prop = r.observed[d] / r.n if r.n else 0.0
        lines.append(f"{d + 1} {r.observed[d]:>8} {prop:.5f} {r.expected[d]:.5f}")
    lines.append(f"chi-square {r.chi_square:.4f} (critical {analytics.CHI2_CRITICAL_8DF}), MAD {r.mad:.5f}")
    status = "insufficient sample" if r.insufficient else ("flagged" if r.flagged else "conforms")
    lines.append(status)
    sys.stdout.write("\n".join(lines) + "\n")
    return 1 if r.flagged else 0


def cmd_diff(args) -> int:
    left = _load(args.left, args, name="left" if Path(args.left).stem == Path(args.right).stem else None)
    right = _load(args.right, args, name="right" if Path(args.left).stem == Path(args.right).stem else None)
    if args.members:
        if len(args.members) != 2:
            raise UsageError("--members needs two column names")
        m = compare.set_membership(left.column(args.members[0]), right.column(args.members[1]))
        lines = ["dqaudit members v1"]
        for label, values in (("in both", m.in_both), ("only left", m.only_a), ("only right", m.only_b)):
            lines.append(f"{label} ({len(values)}): " + ", ".join(render(v) for v in values))
        sys.stdout.write("\n".join(lines) + "\n")
        return 0 if not (m.only_a or m.only_b) else 1
    mode = args.mode or ("key" if args.key else "position")
    if mode == "key" and not args.key:
        raise UsageError("--mode key needs --key")
    result = compare.diff_tables(left, right, mode, key=args.key or (), epsilon=args.epsilon,
                                 text_insensitive=args.ignore_case)
    sys.stdout.write(report.render_diff(result, args.format))
    return 0 if result.empty else 1


def cmd_merge(args) -> int:
    left, right = _load(args.left, args), _load(args.right, args)
    pairs = [k.partition("=") for k in args.key]
    merged = compare.match_merge(left, right, [a for a, _, _ in pairs], args.join,
                                 right_key=[b if sep else a for a, sep, b in pairs])
    _emit(ingest.csv_text(merged), args.output)
    return 0


def cmd_unique(args) -> int:
    table = _load(args.file, args)
    _emit(ingest.csv_text(compare.extract_unique(table, args.columns)), args.output)
    return 0


def _parse_fill(item: str) -> tuple[str, generate.Fill]:
    name, sep, spec = item.partition("=")
    if not sep:
        raise UsageError(f"--fill expects COL=SPEC, got {item!r}")
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "random":
            return name, generate.Random()
        if kind == "fixed":
            return name, generate.Fixed(parse_generic(rest))
        if kind in ("inc", "incremental"):
            start, _, step = rest.partition(":")
            return name, generate.Incremental(parse_generic(start), parse_generic(step) if step else Decimal(1))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad --fill {item!r}: {exc}") from None
    raise UsageError(f"unknown fill {spec!r}; use random, fixed:VALUE or inc:START[:STEP]")


def cmd_generate(args) -> int:
    if args.rows < 0:
        raise UsageError("--rows must be >= 0")
    schema = ingest.load_schema(args.schema)
    fill = dict(_parse_fill(f) for f in args.fill)
    try:
        table = generate.generate_table(schema, args.rows, fill, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(ingest.csv_text(table), args.output)
    return 0


def _parse_kinds(text: str):
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        label, weight = item, "1"
        if ":" in item:
            label, _, weight = item.rpartition(":")
        try:
            out.append((generate.parse_kind(label), Decimal(weight)))
        except (ValueError, ArithmeticError) as exc:
            raise UsageError(f"bad --kinds entry {item!r}: {exc}") from None
    if not out:
        raise UsageError("--kinds is empty")
    return out


def cmd_inject(args) -> int:
    kinds = _parse_kinds(args.kinds)
    schema = ingest.load_schema(args.schema) if args.schema else None
    table = _load(args.file, args, schema, schema.table if schema else None)
    corrupted, injection_log = generate.inject_errors(table, Decimal(str(args.rate)), kinds, args.seed, schema)
    report.write_report(injection_log.to_json(), args.log)
    _emit(ingest.csv_text(corrupted), args.output)
    return 0


def cmd_score(args) -> int:
    try:
        text = Path(args.report).read_text(encoding="utf-8")
    except OSError as exc:
        raise ReadError(f"cannot read {args.report}: {exc.strerror or exc}") from exc
    import json
    try:
        findings, card = report.parse_json_report(text)
        doc = json.loads(text)
    except (ValueError, KeyError) as exc:
        raise DQError(f"{args.report}: not a dqaudit JSON report ({exc})") from exc
    if args.log:
        if not args.clean:
            raise UsageError("--log needs --clean")
        injection_log = generate.InjectionLog.from_json(Path(args.log).read_text(encoding="utf-8"))
        clean = _load(args.clean, args, name=injection_log.table)
        detection = generate.measure_detection(clean, None, injection_log, findings)
        sys.stdout.write(report.render_detection(detection))
        return 0
    checked = sum(t["rows"] * t["columns"] for t in doc.get("tables", []))
    manual = dict(card.manual) if card else {}
    manual.update(_manual(args.manual))
    card = report.build_scorecard(findings, cells_checked=checked if doc.get("tables") else
                                  (card.cells_checked if card else 0), manual=manual)
    sys.stdout.write("\n".join(report.scorecard_lines(card)) + "\n")
    return 0


COMMANDS = {
    "audit": cmd_audit, "stats": cmd_stats, "benford": cmd_benford, "diff": cmd_diff,
    "merge": cmd_merge, "unique": cmd_unique, "generate": cmd_generate, "inject": cmd_inject,
    "score": cmd_score,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="dqaudit: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"dqaudit: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except (DQError, OSError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"dqaudit: {msg}", file=sys.stderr)
        return EX_FAILURE


if __name__ == "__main__":
    sys.exit(main())
