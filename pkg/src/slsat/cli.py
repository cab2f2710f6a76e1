"""Command-line front end.

Exit codes: 10 satisfiable, 20 unsatisfiable, 30 unknown within the
bound, 1 bad input, 2 fuzz disagreement, 0 otherwise.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .contraction import ContractionError, contract, frontier_sets, restrict, size_bound
from .formula import flatten_fo
from .fuzz import fuzz_compare
from .gen import GenConfig
from .parser import ParseError, parse
from .reductions import TranslationError, emit_fo, fo_to_sl, sl_to_fo
from .semantics import UnboundVariable, eval_fo, eval_sl
from .solver import NotBSR, check_finite_sat, check_infinite_sat, oracle_sat
from .structures import StructureFormatError, parse_fo_structure, parse_structure

EXIT_INPUT = 1
EXIT_DISAGREE = 2


class InputError(Exception):
    pass


def read_source(arg: str) -> str:
    """``-`` reads stdin, an existing path reads the file, anything else is
    taken as the text itself."""
    if arg == "-":
        return sys.stdin.read()
    p = Path(arg)
    if p.is_file():
        return p.read_text()
    return arg


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse(arg: str, dialect: str):
    try:
        return parse(read_source(arg), dialect)
    except ParseError as e:
        raise InputError(f"parse error: {e}") from None


def _structure(arg: str, fo: bool = False):
    try:
        text = read_source(arg)
        return parse_fo_structure(text) if fo else parse_structure(text)
    except StructureFormatError as e:
        raise InputError(f"bad structure: {e}") from None


def _names(raw: str | None) -> list[str]:
    return [t for t in (raw or "").replace(",", " ").split() if t]


def _locs(raw: str | None) -> list[int]:
    try:
        return [int(t) for t in _names(raw)]
    except ValueError:
        raise InputError(f"locations must be integers: {raw!r}") from None


# -- commands ------------------------------------------------------------------------


def cmd_check(args) -> int:
    dialect = "FO" if args.fo else "SL"
    phi = _parse(args.formula, dialect)
    if args.fo and args.oracle_bound is None:
        raise InputError("FO formulae can only be checked with --oracle-bound")
    try:
        if args.oracle_bound is not None:
            res = oracle_sat(phi, dialect, args.oracle_bound, max_work=args.max_work)
            mode = "oracle"
        elif args.infinite:
            res = check_infinite_sat(phi, max_work=args.max_work)
            mode = "infinite"
        else:
            res = check_finite_sat(phi, max_work=args.max_work)
            mode = "finite"
    except NotBSR as e:
        raise InputError(str(e)) from None
    lines = [res.status.value, f"mode {mode}", f"bound {res.bound_used}"]
    for key in ("universe", "complete_up_to", "visited", "checked_by"):
        if key in res.stats:
            lines.append(f"{key} {res.stats[key]}")
    if res.note:
        lines.append(f"note {res.note}")
    out = "\n".join(lines) + "\n"
    if res.witness is not None:
        out += "witness\n" + str(res.witness)
        if args.witness_out:
            Path(args.witness_out).write_text(str(res.witness))
    sys.stdout.write(out)
    return res.status.exit_code


def cmd_translate(args) -> int:
    try:
        if args.to_fo:
            phi = _parse(args.formula, "SL")
            text = emit_fo(sl_to_fo(phi), args.format)
        else:
            if args.format != "native":
                raise InputError("SL output only exists in the native format")
            phi = _parse(args.formula, "FO")
            mode = "finite" if args.from_fo_finite else "infinite"
            text = f"{fo_to_sl(flatten_fo(phi), mode)}\n"
    except TranslationError as e:
        raise InputError(str(e)) from None
    _write(text, args.out)
    return 0


def cmd_modelcheck(args) -> int:
    phi = _parse(args.formula, "FO" if args.fo else "SL")
    i = _structure(args.structure, args.fo)
    try:
        ok = eval_fo(i, phi) if args.fo else eval_sl(i, phi)
    except (UnboundVariable, KeyError) as e:
        raise InputError(f"cannot evaluate: {e.args[0]}") from None
    sys.stdout.write("true\n" if ok else "false\n")
    return 0


def cmd_contract(args) -> int:
    i = _structure(args.structure)
    xs, locs = _names(args.vars), _locs(args.locs)
    try:
        out = contract(i, args.bound, xs, locs)
        sets = frontier_sets(i, xs, locs)
        limit = size_bound(i, args.bound, xs, locs)
    except ContractionError as e:
        raise InputError(str(e)) from None
    grown = out.size - len(i.universe - sets.Vbar)
    verdict = "within" if grown <= limit else "exceeds"
    text = str(out) + f"# kept {grown} reachable locations, size bound {limit}: {verdict}\n"
    _write(text, args.out)
    return 0


def cmd_restrict(args) -> int:
    i = _structure(args.structure)
    try:
        out = restrict(i, _names(args.vars), _locs(args.locs))
    except ContractionError as e:
        raise InputError(str(e)) from None
    _write(str(out), args.out)
    return 0


def cmd_fuzz(args) -> int:
    cfg = GenConfig(max_quantifiers=args.max_quantifiers, max_nodes=args.max_nodes,
                    max_const=args.max_const)
    report = fuzz_compare(args.seed, args.count, cfg, workers=args.workers)
    sys.stdout.write(report.summary())
    if args.out_dir:
        from .plotting import render_fuzz_figures

        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.tsv").write_text(report.to_tsv())
        (out / "summary.txt").write_text(report.summary())
        render_fuzz_figures(report, out)
    return EXIT_DISAGREE if report.disagreements else 0


# -- argument parsing ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="slsat", description="Satisfiability tools for prenex SL(1).")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide satisfiability")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--finite", action="store_true", help="finite universes (default)")
    mode.add_argument("--infinite", action="store_true", help="infinite universes")
    mode.add_argument("--oracle-bound", type=int, metavar="N",
                      help="bounded search up to N locations instead; never UNSAT")
    p.add_argument("--fo", action="store_true", help="the formula is first-order (oracle only)")
    p.add_argument("--max-work", type=int, help="give up with UNKNOWN after this many steps")
    p.add_argument("--witness-out", metavar="FILE", help="also write the witness here")
    p.add_argument("formula", help="file, '-' for stdin, or the formula text")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("translate", help="translate between SL and FO")
    direction = p.add_mutually_exclusive_group(required=True)
    direction.add_argument("--to-fo", action="store_true")
    direction.add_argument("--from-fo-finite", action="store_true")
    direction.add_argument("--from-fo-infinite", action="store_true")
    p.add_argument("--format", choices=["native", "smtlib2", "tptp"], default="native")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("formula")
    p.set_defaults(run=cmd_translate)

    p = sub.add_parser("modelcheck", help="evaluate a formula in a structure")
    p.add_argument("--formula", required=True)
    p.add_argument("--structure", required=True)
    p.add_argument("--fo", action="store_true")
    p.set_defaults(run=cmd_modelcheck)

    for name, fn in (("contract", cmd_contract), ("restrict", cmd_restrict)):
        p = sub.add_parser(name, help=f"{name} a structure around variables and locations")
        p.add_argument("--structure", required=True)
        p.add_argument("--vars", default="", help="comma separated variables")
        p.add_argument("--locs", default="", help="comma separated locations")
        if name == "contract":
            p.add_argument("--bound", type=int, required=True, help="segment length N >= 1")
        p.add_argument("--out", metavar="FILE")
        p.set_defaults(run=fn)

    p = sub.add_parser("fuzz", help="compare the checker with the oracle on random sentences")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-quantifiers", type=int, default=3)
    p.add_argument("--max-nodes", type=int, default=12)
    p.add_argument("--max-const", type=int, default=2)
    p.add_argument("--workers", type=int, help="processes; default from SLSAT_WORKERS or 1")
    p.add_argument("--out-dir", help="write report.tsv, summary.txt and figures here")
    p.set_defaults(run=cmd_fuzz)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else 0
    try:
        return args.run(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
