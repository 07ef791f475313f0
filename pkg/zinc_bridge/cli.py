"""``zinc-bridge`` command line: one subcommand per pipeline end plus ``check``."""

from typing import Any, Dict, Iterator, List, Optional, Sequence

import argparse
import enum
import logging
import sys
from pathlib import Path

from pydantic import BaseModel, validator
from pythonjsonlogger import jsonlogger

from zinc_bridge import __version__
from zinc_bridge.emzn2fzn import SIDECAR_SUFFIX, run_wrapper
from zinc_bridge.errors import (
    UsageError,
    ValidationError,
    VerdictIncorrect,
    ZincBridgeError,
)
from zinc_bridge.flatzinc import parse_fzn, print_fzn
from zinc_bridge.flatzinc.model import BaseType, FznModel
from zinc_bridge.fzn2omt import EncodeConfig, IntMode, ObjectiveMode, encode_model
from zinc_bridge.logging import LoggingContext
from zinc_bridge.minizinc import flatten, parse_mzn
from zinc_bridge.monitoring import Monitor
from zinc_bridge.omt2mzn import BoundsPolicy, IntDomainMode, LabelMode, translate
from zinc_bridge.oracle import (
    Classification,
    InstanceReport,
    OracleResult,
    classify,
    solve_fzn,
    solve_smt,
    solve_translation,
    summarize,
    write_reports,
)
from zinc_bridge.oracle.external import run_fzn_solver
from zinc_bridge.rational import format_float
from zinc_bridge.settings import Settings
from zinc_bridge.smtlib import parse_smt2, print_smt2
from zinc_bridge.smtlib.printer import DIALECTS

logger = logging.getLogger(__name__)

INSTANCE_SUFFIXES = (".fzn", ".smt2")
TEXT_FORMAT = "%(levelname)s %(name)s: %(message)s"
JSON_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


class Subcommand(str, enum.Enum):
    FZN2OMT = "fzn2omt"
    OMT2MZN = "omt2mzn"
    EMZN2FZN = "emzn2fzn"
    MZN2FZN = "mzn2fzn"
    CHECK = "check"


class CliInvocation(BaseModel):
    """A parsed command line; only the fields of ``subcommand`` are meaningful."""

    subcommand: Subcommand
    inputs: List[Path]
    output: Optional[Path] = None
    encode: EncodeConfig = EncodeConfig()
    bounds: BoundsPolicy = BoundsPolicy()
    label_mode: LabelMode = LabelMode.TWO_FATHERS
    data: List[Path] = []
    compiler: Optional[str] = None
    dedup: bool = True
    budget: Optional[int] = None
    report: Optional[Path] = None
    multi_objective: bool = False
    metrics_file: Optional[Path] = None

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True

    @validator("budget")
    def _positive_budget(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value <= 0:
            raise ValueError("budget must be positive")
        return value

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliInvocation":
        subcommand = Subcommand(args.subcommand)
        fields: Dict[str, Any] = {
            "subcommand": subcommand,
            "inputs": [Path(path) for path in args.inputs],
            "output": getattr(args, "output", None),
            "metrics_file": args.metrics_file,
        }
        if subcommand == Subcommand.FZN2OMT:
            fields["multi_objective"] = args.multi_objective or args.lexicographic
            fields["encode"] = EncodeConfig(
                int_mode=IntMode(args.int_mode),
                bv_width=args.bv_width,
                pb_rewrite=not args.no_pb_rewrite,
                dialect=args.dialect,
                objective_mode=ObjectiveMode.LEXICOGRAPHIC
                if args.lexicographic
                else ObjectiveMode.INDEPENDENT,
            )
        elif subcommand == Subcommand.OMT2MZN:
            fields["bounds"] = BoundsPolicy(
                float_domain=args.float_domain,
                int_domain_mode=IntDomainMode(args.int_domain),
            )
            fields["label_mode"] = LabelMode(args.labels)
        elif subcommand == Subcommand.EMZN2FZN:
            fields["data"] = [Path(path) for path in args.data]
            fields["compiler"] = args.compiler
            fields["dedup"] = not args.no_dedup
            fields["bounds"] = BoundsPolicy(float_domain=args.float_domain)
        elif subcommand == Subcommand.MZN2FZN:
            fields["data"] = [Path(path) for path in args.data]
        else:
            fields["budget"] = args.budget
            fields["report"] = args.report
            fields["multi_objective"] = args.multi_objective
        return cls(**fields)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    formatter = argparse.ArgumentDefaultsHelpFormatter
    float_domain = format_float(BoundsPolicy().float_domain)
    parser = _ArgumentParser(
        prog="zinc-bridge",
        description="Translate between FlatZinc/MiniZinc and optimization SMT-LIB.",
        formatter_class=formatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--log-level", help="logging level, ZINC_BRIDGE_LOG_LEVEL when unset"
    )
    parser.add_argument(
        "--log-format",
        choices=["text", "json"],
        help="log line format, ZINC_BRIDGE_LOG_FORMAT when unset",
    )
    parser.add_argument(
        "--metrics-file", type=Path, help="write Prometheus text exposition here"
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    fzn2omt = subparsers.add_parser(
        "fzn2omt", help="FlatZinc to OMT SMT-LIB", formatter_class=formatter
    )
    fzn2omt.add_argument("inputs", nargs=1, metavar="IN", help="FlatZinc model")
    fzn2omt.add_argument(
        "-o", "--output", type=Path, required=True, help="SMT-LIB script to write"
    )
    fzn2omt.add_argument(
        "--int-mode",
        choices=[m.value for m in IntMode],
        default="la",
        help="integers as linear arithmetic or as signed bit-vectors",
    )
    fzn2omt.add_argument(
        "--bv-width", type=int, help="bit-vector width, smallest sufficient when unset"
    )
    fzn2omt.add_argument(
        "--no-pb-rewrite",
        action="store_true",
        help="keep sums of bool2int images as linear constraints",
    )
    fzn2omt.add_argument(
        "--dialect",
        choices=sorted(DIALECTS),
        default="default",
        help="how objectives and the trailer are printed",
    )
    fzn2omt.add_argument(
        "--multi-objective", action="store_true", help="accept several solve items"
    )
    fzn2omt.add_argument(
        "--lexicographic",
        action="store_true",
        help="optimize several objectives lexicographically",
    )

    omt2mzn = subparsers.add_parser(
        "omt2mzn", help="OMT SMT-LIB to MiniZinc", formatter_class=formatter
    )
    omt2mzn.add_argument("inputs", nargs=1, metavar="IN", help="SMT-LIB script")
    omt2mzn.add_argument(
        "-o",
        "--output",
        type=Path,
        required=True,
        metavar="OUTDIR",
        help="directory for the MiniZinc models",
    )
    omt2mzn.add_argument(
        "--float-domain", default=float_domain, help="bound for Real variables"
    )
    omt2mzn.add_argument(
        "--int-domain",
        choices=[m.value for m in IntDomainMode],
        default="unbounded",
        help="Int variables unbounded or capped at 2^31",
    )
    omt2mzn.add_argument(
        "--labels",
        choices=[mode.value for mode in LabelMode],
        default="two-fathers",
        help="which shared subterms get their own variable",
    )

    emzn2fzn = subparsers.add_parser(
        "emzn2fzn", help="rational-preserving mzn2fzn", formatter_class=formatter
    )
    emzn2fzn.add_argument("inputs", nargs=1, metavar="IN", help="MiniZinc model")
    emzn2fzn.add_argument(
        "-d", "--data", action="append", default=[], help="data file, repeatable"
    )
    emzn2fzn.add_argument(
        "-o", "--output", type=Path, required=True, help="FlatZinc model to write"
    )
    emzn2fzn.add_argument(
        "--compiler",
        help="compiler command template, ZINC_BRIDGE_MZN2FZN_COMMAND when unset",
    )
    emzn2fzn.add_argument(
        "--no-dedup",
        action="store_true",
        help="give every fraction occurrence its own variable",
    )
    emzn2fzn.add_argument(
        "--float-domain", default=float_domain, help="bound for fraction variables"
    )

    mzn2fzn = subparsers.add_parser(
        "mzn2fzn", help="flatten emitted MiniZinc", formatter_class=formatter
    )
    mzn2fzn.add_argument("inputs", nargs=1, metavar="IN", help="MiniZinc model")
    mzn2fzn.add_argument("data", nargs="*", help="data files (not supported)")
    mzn2fzn.add_argument(
        "-o", "--output", type=Path, required=True, help="FlatZinc model to write"
    )

    check = subparsers.add_parser(
        "check",
        help="differential check against the oracle",
        formatter_class=formatter,
    )
    check.add_argument(
        "inputs", nargs="+", metavar="IN", help=".fzn/.smt2 files or directories"
    )
    check.add_argument(
        "--budget", type=int, help="oracle budget, ZINC_BRIDGE_ORACLE_BUDGET when unset"
    )
    check.add_argument("--report", type=Path, help="JSON lines report")
    check.add_argument(
        "--multi-objective", action="store_true", help="accept several solve items"
    )
    return parser


def configure_logging(
    level: Optional[str] = None, log_format: Optional[str] = None
) -> None:
    settings = Settings()
    handler = logging.StreamHandler(sys.stderr)
    if (log_format or settings.log_format) == "json":
        handler.setFormatter(jsonlogger.JsonFormatter(JSON_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(TEXT_FORMAT))
    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel((level or settings.log_level).upper())


class ExitStatus:
    """Turns an exception escaping the block into an exit code.

    :class:`ZincBridgeError` subclasses carry their own code; anything else is
    an internal error (70) and is logged with its traceback.
    """

    def __init__(self, context: LoggingContext) -> None:
        self.context = context
        self.code = 0

    def __enter__(self) -> "ExitStatus":
        return self

    def __exit__(self, typ: Any, value: Any, traceback: Any) -> bool:
        if value is None or not isinstance(value, Exception):
            return False
        if isinstance(value, ZincBridgeError):
            self.code = value.exit_code
            logger.error("%s", value, extra=self.context.with_exit_code(self.code))
        else:
            self.code = ZincBridgeError.exit_code
            context = self.context.with_exit_code(self.code)
            logger.exception("Internal error", extra=context)
        return True


def _read(path: Path) -> str:
    if not path.is_file():
        raise UsageError(f"input file not found: {path}")
    return path.read_text(encoding="utf-8")


def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _instances(paths: Sequence[Path]) -> Iterator[Path]:
    for path in paths:
        if path.is_dir():
            found = (p for p in path.rglob("*") if p.suffix in INSTANCE_SUFFIXES)
            yield from sorted(found)
        elif path.suffix in INSTANCE_SUFFIXES:
            yield path
        elif not path.exists():
            raise UsageError(f"input not found: {path}")
        else:
            raise UsageError(f"unsupported instance type: {path}")


class _Runner:
    def __init__(
        self, invocation: CliInvocation, monitor: Monitor, context: LoggingContext
    ) -> None:
        self.invocation = invocation
        self.monitor = monitor
        self.context = context

    def _output(self) -> Path:
        assert self.invocation.output is not None
        return self.invocation.output

    def _write(self, path: Path, text: str) -> None:
        self.monitor.time_stage("write")(_write_text)(path, text)

    def fzn2omt(self) -> None:
        invocation = self.invocation
        text = _read(invocation.inputs[0])
        with self.monitor.time_stage("parse"):
            model = parse_fzn(text, invocation.multi_objective)
        with self.monitor.time_stage("encode"):
            script = encode_model(model, invocation.encode)
        text = print_smt2(script, invocation.encode.dialect)
        self._write(self._output(), text)
        logger.info("Wrote %s", self._output(), extra=self.context.with_stage("write"))

    def omt2mzn(self) -> None:
        invocation = self.invocation
        source = invocation.inputs[0]
        with self.monitor.time_stage("parse"):
            script = parse_smt2(_read(source))
        with self.monitor.time_stage("translate"):
            output = translate(script, invocation.bounds, invocation.label_mode)
        paths = output.write(self._output(), source.stem)
        context = self.context.with_stage("write")
        logger.info("Wrote %d files", len(paths), extra=context)

    def emzn2fzn(self) -> None:
        invocation = self.invocation
        source = invocation.inputs[0]
        _read(source)
        for path in invocation.data:
            _read(path)
        output = self._output()
        with self.monitor.time_stage("compile"):
            text = run_wrapper(
                source,
                invocation.data,
                invocation.compiler,
                invocation.dedup,
                invocation.bounds.float_domain,
                table_path=output.with_suffix(SIDECAR_SUFFIX),
            )
        self._write(output, text)

    def mzn2fzn(self) -> None:
        if self.invocation.data:
            raise UsageError("mzn2fzn does not take data files")
        with self.monitor.time_stage("parse"):
            model = parse_mzn(_read(self.invocation.inputs[0]))
        with self.monitor.time_stage("flatten"):
            flat = flatten(model)
        self._write(self._output(), print_fzn(flat))

    def _record(
        self,
        reports: List[InstanceReport],
        instance: Path,
        translation: str,
        reference: OracleResult,
        candidate: OracleResult,
    ) -> None:
        verdict = classify(reference, candidate)
        delta = None if verdict.error is None else float(verdict.error)
        self.monitor.observe_verdict(verdict.classification.value, delta)
        logger.info(
            "%s %s: %s%s",
            instance,
            translation,
            verdict.classification.value,
            f" ({verdict.reason})" if verdict.reason else "",
            extra=self.context.with_verdict(verdict.classification.value),
        )
        reports.append(
            InstanceReport.build(
                str(instance), translation, reference, candidate, verdict
            )
        )

    def _check_fzn(self, path: Path, reports: List[InstanceReport]) -> None:
        invocation = self.invocation
        model = parse_fzn(_read(path), invocation.multi_objective)
        with self.monitor.time_stage("oracle"):
            reference = solve_fzn(model, invocation.budget)
        for config in _encodings(model):
            rewrite = "pb" if config.pb_rewrite else "nopb"
            translation = f"fzn2omt-{config.int_mode.value}-{rewrite}"
            try:
                script = encode_model(model, config)
            except ValidationError as error:
                candidate = OracleResult.inapplicable(str(error))
            else:
                with self.monitor.time_stage("oracle"):
                    candidate = solve_smt(
                        script, invocation.budget, ObjectiveMode.INDEPENDENT
                    )
            self._record(reports, path, translation, reference, candidate)
        if Settings().fzn_solver_command:
            external = run_fzn_solver(path, model)
            self._record(reports, path, "external", reference, external)

    def _check_smt(self, path: Path, reports: List[InstanceReport]) -> None:
        budget = self.invocation.budget
        script = parse_smt2(_read(path))
        with self.monitor.time_stage("oracle"):
            reference = solve_smt(script, budget)
        try:
            output = translate(script)
        except ValidationError as error:
            candidate = OracleResult.inapplicable(str(error))
        else:
            with self.monitor.time_stage("oracle"):
                candidate = solve_translation(output, budget)
        self._record(reports, path, "omt2mzn", reference, candidate)

    def check(self) -> None:
        reports: List[InstanceReport] = []
        for path in _instances(self.invocation.inputs):
            self.context.with_input(str(path))
            if path.suffix == ".fzn":
                self._check_fzn(path, reports)
            else:
                self._check_smt(path, reports)
        if self.invocation.report is not None:
            with self.invocation.report.open("w", encoding="utf-8") as stream:
                write_reports(reports, stream)
        for name, count in summarize(reports).items():
            print(f"{name}: {count}")
        incorrect = [r for r in reports if r.verdict == Classification.INCORRECT]
        if incorrect:
            raise VerdictIncorrect(
                f"{len(incorrect)} of {len(reports)} checks are incorrect"
            )


def _encodings(model: FznModel) -> List[EncodeConfig]:
    """la always; bv as well when the model is purely Boolean and integer."""
    modes = [IntMode.LA]
    if all(var.type.base in (BaseType.BOOL, BaseType.INT) for var in model.vars):
        modes.append(IntMode.BV)
    return [
        EncodeConfig(int_mode=mode, pb_rewrite=rewrite)
        for mode in modes
        for rewrite in (True, False)
    ]


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command line; returns the process exit code."""
    context = LoggingContext(" ".join(argv if argv is not None else sys.argv[1:]))
    status = ExitStatus(context)
    monitor = Monitor()
    invocation: Optional[CliInvocation] = None
    with status:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as stop:
            return int(stop.code or 0)
        configure_logging(args.log_level, args.log_format)
        try:
            invocation = CliInvocation.from_args(args)
        except ValueError as error:
            raise UsageError(str(error)) from error
        if invocation.inputs:
            context.with_input(str(invocation.inputs[0]))
        runner = _Runner(invocation, monitor, context)
        with monitor.count_exceptions(invocation.subcommand.value):
            getattr(runner, invocation.subcommand.value)()
    if invocation is not None and invocation.metrics_file is not None:
        monitor.write(str(invocation.metrics_file))
    return status.code


def run() -> None:
    sys.exit(main())
