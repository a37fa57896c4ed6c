"""Command-line driver: check files, translate them, and count what they prove.

Exit codes: 0 everything checked; 1 a parse or typing error; 2 the theory is
not HOL-encoded (or a translation-time name clash); 3 the translated output
failed to re-check, which would be a bug in the translator.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .elaborate import Elaboration, elaborate
from .errors import KernelError, ValidationError
from .frontend import ParseError, SourceFile, parse, print_file
from .holtheory import PEM, KappaClass, hol_base, kappa_class, validate_hol_encoded
from .kernel import Const, Pi, Term, constants, subterms, unspine
from .kuroda import TranslationOutput, translate_source
from .reduction import Theory

EXIT_OK, EXIT_CHECK, EXIT_VALIDATION, EXIT_RECHECK = 0, 1, 2, 3
STATS_HEADER = ("file", "proofs", "classical", "higher_order", "inference_rules")


@dataclass
class RunConfig:
    command: str
    inputs: list[Path]
    output: Path | None = None
    stdout: bool = False
    classical: bool = True
    tidy: bool = True
    budget: int | None = None
    pedantic: bool = False
    inline: bool = False
    base: bool = True
    tsv: bool = False

    def __post_init__(self):
        if self.budget is not None and self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.command == "translate" and self.output is None and not self.stdout:
            raise ValueError("translate needs -o FILE or --stdout")

    def base_theory(self) -> Theory:
        return hol_base(self.classical) if self.base else Theory()


@dataclass
class ItemStatus:
    file: str
    name: str
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class FileStats:
    file: str
    proofs: int = 0
    classical: int = 0
    higher_order: int = 0
    inference_rules: int = 0

    def row(self) -> tuple:
        return (self.file, self.proofs, self.classical, self.higher_order, self.inference_rules)


@dataclass
class Report:
    items: list[ItemStatus] = field(default_factory=list)
    stats: list[FileStats] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    exit_code: int = EXIT_OK
    output: str | None = None

    @property
    def failures(self) -> list[ItemStatus]:
        return [i for i in self.items if not i.ok]

    def raise_to(self, code: int) -> None:
        # a check failure outranks a validation failure, which outranks success
        order = [EXIT_OK, EXIT_VALIDATION, EXIT_CHECK, EXIT_RECHECK]
        if order.index(code) > order.index(self.exit_code):
            self.exit_code = code

    def totals(self) -> FileStats:
        t = FileStats("all")
        for s in self.stats:
            t.proofs += s.proofs
            t.classical += s.classical
            t.higher_order += s.higher_order
            t.inference_rules += s.inference_rules
        return t


# -- the counters ------------------------------------------------------------------


def is_higher_order(statement: Term) -> bool:
    """Quantifies (all/ex) over a sort built from ``o``."""
    for t in subterms(statement):
        h, args = unspine(t)
        if isinstance(h, Const) and h.name in ("all", "ex") and args:
            if "o" in constants(args[0]):
                return True
    return False


def is_inference_rule(statement: Term) -> bool:
    """A proof-typed statement with a proof-typed premise in its product spine."""
    if kappa_class(statement) is not KappaClass.K3:
        return False
    t = statement
    while isinstance(t, Pi):
        if kappa_class(t.domain) is KappaClass.K3:
            return True
        t = t.body
    return False


def file_stats(name: str, elab: Elaboration) -> FileStats:
    stats = FileStats(name)
    classical: set[str] = set()
    for d in elab.theorems:
        stats.proofs += 1
        used = constants(d.proof)
        if PEM in used or used & classical:
            classical.add(d.name)
            stats.classical += 1
        stats.higher_order += is_higher_order(d.statement)
        stats.inference_rules += is_inference_rule(d.statement)
    return stats


# -- pipeline ----------------------------------------------------------------------


def _read(path: Path) -> bytes:
    return path.read_bytes()


def _check_file(
    cfg: RunConfig, path: Path, report: Report, text: bytes | str | None = None
) -> tuple[SourceFile, Elaboration] | None:
    base = cfg.base_theory()
    label = str(path)
    try:
        source = parse(_read(path) if text is None else text, known=base.signature, path=label)
    except ParseError as e:
        report.items.append(ItemStatus(label, "<parse>", str(e)))
        report.raise_to(EXIT_CHECK)
        return None
    elab = elaborate(source, base, budget=cfg.budget)
    for s in elab.statuses:
        report.items.append(ItemStatus(label, s.name, None if s.ok else str(s.error)))
    if not elab.ok:
        report.raise_to(EXIT_CHECK)
        return source, elab
    if cfg.base:
        v = validate_hol_encoded(elab.theory, cfg.pedantic)
        report.violations += [f"{label}: {x}" for x in v.violations]
        report.notes += [f"{label}: {n}" for n in v.notes]
        if not v.ok:
            report.raise_to(EXIT_VALIDATION)
    return source, elab


def run_check(cfg: RunConfig) -> Report:
    report = Report()
    for path in cfg.inputs:
        _check_file(cfg, path, report)
    return report


def run_stats(cfg: RunConfig) -> Report:
    report = Report()
    for path in cfg.inputs:
        res = _check_file(cfg, path, report)
        if res is not None:
            report.stats.append(file_stats(path.name, res[1]))
    return report


def translate_text(cfg: RunConfig, source: SourceFile, elab: Elaboration) -> TranslationOutput:
    return translate_source(
        source, elab.theory, elab.rules, tidy_output=cfg.tidy, inline=cfg.inline,
        pedantic=cfg.pedantic,
    )


def recheck(text: str, budget: int | None = None) -> Elaboration:
    """Check translated output over the intuitionistic base."""
    base = hol_base(False)
    return elaborate(parse(text, known=base.signature), base, budget=budget)


def run_translate(cfg: RunConfig) -> Report:
    report = Report()
    if len(cfg.inputs) != 1:
        raise ValueError("translate takes exactly one input file")
    res = _check_file(cfg, cfg.inputs[0], report)
    if res is None or report.exit_code != EXIT_OK:
        return report
    source, elab = res
    try:
        out = translate_text(cfg, source, elab)
    except ValidationError as e:
        report.violations.append(str(e))
        report.raise_to(EXIT_VALIDATION)
        return report
    except KernelError as e:
        report.items.append(ItemStatus(str(cfg.inputs[0]), "<translate>", str(e)))
        report.raise_to(EXIT_RECHECK)
        return report
    text = print_file(out.file_declarations())
    report.output = text
    # the output stands alone: parse it afresh and check it intuitionistically
    report.items = []
    label = str(cfg.output) if cfg.output else "<stdout>"
    try:
        again = recheck(text, cfg.budget)
    except ParseError as e:
        report.items.append(ItemStatus(label, "<parse>", str(e)))
        report.raise_to(EXIT_RECHECK)
        return report
    for s in again.statuses:
        report.items.append(ItemStatus(label, s.name, None if s.ok else str(s.error)))
    if not again.ok:
        report.raise_to(EXIT_RECHECK)
    if PEM in text.replace("(", " ").replace(")", " ").split():
        report.items.append(ItemStatus(label, "<output>", "excluded middle survived translation"))
        report.raise_to(EXIT_RECHECK)
    return report


# -- argument parsing and printing -------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lpkuroda",
        description="Check HOL proof files and translate classical proofs "
        "into intuitionistic ones.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--intuitionistic-base",
        action="store_true",
        help="inject the HOL base without excluded middle",
    )
    common.add_argument(
        "--no-base",
        action="store_true",
        help="inject nothing (for files that declare their own base)",
    )
    common.add_argument("--budget", type=int, help="reduction steps per conversion test")
    common.add_argument(
        "-v", "--verbose", action="store_true", help="also print informational notes"
    )
    common.add_argument(
        "--pedantic",
        action="store_true",
        help="reject every rule whose left-hand side is headed by Prf or all",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="type-check files")
    c.add_argument("inputs", nargs="+", type=Path)

    t = sub.add_parser("translate", parents=[common], help="translate one file")
    t.add_argument("inputs", nargs=1, type=Path, metavar="input")
    t.add_argument("-o", "--output", type=Path)
    t.add_argument("--stdout", action="store_true", help="print the translation")
    t.add_argument("--no-tidy", action="store_true", help="keep the translated Prf/all redexes")
    t.add_argument("--raw", action="store_true", help="same as --no-tidy")
    t.add_argument(
        "--inline-witnesses",
        action="store_true",
        help="substitute closed witness terms instead of emitting the witness prelude",
    )

    s = sub.add_parser("stats", parents=[common], help="count proofs per file")
    s.add_argument("inputs", nargs="+", type=Path)
    s.add_argument("--tsv", action="store_true", help="tab-separated output")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        inputs=list(ns.inputs),
        output=getattr(ns, "output", None),
        stdout=getattr(ns, "stdout", False),
        classical=not ns.intuitionistic_base,
        tidy=not (getattr(ns, "no_tidy", False) or getattr(ns, "raw", False)),
        budget=ns.budget,
        pedantic=ns.pedantic,
        inline=getattr(ns, "inline_witnesses", False),
        base=not ns.no_base,
        tsv=getattr(ns, "tsv", False),
    )


def format_stats(report: Report, tsv: bool) -> str:
    rows = [s.row() for s in report.stats]
    if tsv:
        return "".join("\t".join(map(str, r)) + "\n" for r in [STATS_HEADER, *rows])
    rows.append(report.totals().row())
    table = [STATS_HEADER, *rows]
    widths = [max(len(str(r[i])) for r in table) for i in range(len(STATS_HEADER))]
    lines = []
    for r in table:
        cells = [str(r[0]).ljust(widths[0])]
        cells += [str(v).rjust(w) for v, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def print_report(report: Report, verbose: bool = False, err=None) -> None:
    err = err or sys.stderr
    for item in report.failures:
        print(f"{item.file}: {item.name}: {item.error}", file=err)
    for v in report.violations:
        print(f"not HOL-encoded: {v}", file=err)
    if verbose:
        for n in report.notes:
            print(f"note: {n}", file=err)


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as e:
        ap.error(str(e))
    try:
        match cfg.command:
            case "check":
                report = run_check(cfg)
                if report.exit_code == EXIT_OK:
                    n = len(report.items)
                    print(f"ok: {n} declarations in {len(cfg.inputs)} file(s)")
            case "translate":
                report = run_translate(cfg)
                if report.output is not None:
                    if cfg.stdout:
                        sys.stdout.write(report.output)
                    else:
                        cfg.output.write_text(report.output, encoding="utf-8", newline="\n")
            case "stats":
                report = run_stats(cfg)
                sys.stdout.write(format_stats(report, cfg.tsv))
    except OSError as e:
        print(f"lpkuroda: {e}", file=sys.stderr)
        return EXIT_CHECK
    print_report(report, ns.verbose)
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
