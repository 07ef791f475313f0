"""Rational-preserving wrapper around a MiniZinc to FlatZinc compiler.

Every division of two numeric literals in the model is replaced by a fresh
float variable before compiling, and the compiled FlatZinc gets one
``float_div(n.0, d.0, fresh)`` constraint per variable, so the exact quotient
survives compilation instead of being rounded to a double.
"""

from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple

import logging
import re
import shlex
import subprocess
import tempfile
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel, validator

from zinc_bridge.errors import (
    CompilerFailedError,
    CompilerSpawnError,
    MissingVariableError,
    TokenizeError,
)
from zinc_bridge.omt2mzn.translator import DEFAULT_FLOAT_DOMAIN
from zinc_bridge.rational import format_float, format_float_approx, parse_decimal
from zinc_bridge.settings import Settings

logger = logging.getLogger(__name__)

FRESH_PREFIX = "zb_frac_"
SIDECAR_SUFFIX = ".fractions.json"

_TOKEN = re.compile(
    r"""
    (?P<space>\s+)
    | (?P<comment>%[^\n]*)
    | (?P<block>/\*.*?\*/)
    | (?P<open_block>/\*)
    | (?P<string>"(?:\\.|[^"\\\n])*")
    | (?P<open_string>")
    | (?P<number>\d+\.\d+(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+|\d+)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<op>\\/|/\\|\.\.|::|<->|->|<-|!=|==|<=|>=|[^\s\w])
    """,
    re.VERBOSE | re.DOTALL,
)
_BLOCKING_LEFT = frozenset({"/", "div", "mod", "^"})
_BLOCKING_RIGHT = frozenset({"^"})
_ITEM_KEYWORDS = frozenset(
    {
        "constraint",
        "solve",
        "output",
        "predicate",
        "function",
        "test",
        "include",
        "annotation",
    }
)


class Substitution(BaseModel):
    numerator: int
    denominator: int
    line: int
    column: int

    @validator("denominator")
    def _nonzero(cls, value: int) -> int:
        if value == 0:
            raise ValueError("denominator must be non-zero")
        return value

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)


class SubstitutionTable(BaseModel):
    """Fresh variable name to the exact fraction it stands for."""

    entries: Dict[str, Substitution] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, name: object) -> bool:
        return name in self.entries

    def values(self) -> Dict[str, Fraction]:
        return {name: entry.value for name, entry in self.entries.items()}


class _Token(NamedTuple):
    kind: str
    text: str
    offset: int
    line: int
    column: int


def _tokens(text: str) -> Iterator[_Token]:
    offset = 0
    line = 1
    line_start = 0
    while offset < len(text):
        match = _TOKEN.match(text, offset)
        column = offset - line_start + 1
        if match is None:
            raise TokenizeError(f"unexpected character {text[offset]!r}", line, column)
        if match.lastgroup in ("open_block", "open_string"):
            what = "comment" if match.lastgroup == "open_block" else "string"
            raise TokenizeError(f"unterminated {what}", line, column)
        lexeme = match.group()
        yield _Token(match.lastgroup or "", lexeme, offset, line, column)
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = offset + lexeme.rindex("\n") + 1
        offset = match.end()


def _is_division(tokens: Sequence[_Token], i: int) -> bool:
    if i + 2 >= len(tokens):
        return False
    left, slash, right = tokens[i], tokens[i + 1], tokens[i + 2]
    if left.kind != "number" or slash.text != "/" or right.kind != "number":
        return False
    if i > 0 and tokens[i - 1].text in _BLOCKING_LEFT:
        return False
    if i + 3 < len(tokens) and tokens[i + 3].text in _BLOCKING_RIGHT:
        return False
    return parse_decimal(right.text) != 0


def _item_start(tokens: Sequence[_Token], i: int) -> int:
    depth = 0
    while i > 0:
        text = tokens[i - 1].text
        if text in (")", "]", "}"):
            depth += 1
        elif text in ("(", "[", "{"):
            depth -= 1
        elif text == ";" and depth <= 0:
            break
        i -= 1
    return i


def _promotion(tokens: Sequence[_Token], start: int) -> Optional[Tuple[int, int, str]]:
    """Edit turning the par float declaration starting at ``start`` into a var one."""
    if tokens[start].text in _ITEM_KEYWORDS:
        return None
    i = start
    while i < len(tokens) and tokens[i].text not in (":", ";", "="):
        token = tokens[i]
        if token.text == "var":
            return None
        if token.text == "float":
            previous = tokens[i - 1] if i > start else None
            if previous is not None and previous.text == "par":
                return previous.offset, previous.offset + 3, "var"
            return token.offset, token.offset + 5, "var float"
        i += 1
    return None


def _fresh_names(text: str) -> Iterator[str]:
    index = 0
    while True:
        index += 1
        name = f"{FRESH_PREFIX}{index}"
        if name not in text:
            yield name


def rewrite_mzn(
    text: str, dedup: bool = True, float_domain: Fraction = DEFAULT_FLOAT_DOMAIN
) -> Tuple[str, SubstitutionTable]:
    """Replace each division of two numeric literals by a fresh float variable.

    Fresh variables are declared at the top of the document with the domain
    ``-float_domain..float_domain``. Everything else is left as it was, except
    that a par ``float`` declaration whose initializer now mentions a fresh
    variable becomes a ``var float`` one.

    Raises:
        TokenizeError: on an unterminated comment or string.
    """
    skipped = ("space", "comment", "block")
    tokens = [token for token in _tokens(text) if token.kind not in skipped]
    names = _fresh_names(text)
    entries: Dict[str, Substitution] = {}
    by_value: Dict[Fraction, str] = {}
    # (offset, end, replacement), applied back to front
    edits: List[Tuple[int, int, str]] = []
    promoted: Set[Tuple[int, int, str]] = set()
    divisions = 0
    i = 0
    while i < len(tokens):
        if not _is_division(tokens, i):
            i += 1
            continue
        numerator, denominator = tokens[i], tokens[i + 2]
        value = parse_decimal(numerator.text) / parse_decimal(denominator.text)
        name = by_value.get(value) if dedup else None
        if name is None:
            name = next(names)
            entries[name] = Substitution(
                numerator=value.numerator,
                denominator=value.denominator,
                line=numerator.line,
                column=numerator.column,
            )
            by_value[value] = name
        end = denominator.offset + len(denominator.text)
        edits.append((numerator.offset, end, name))
        divisions += 1
        start = _item_start(tokens, i)
        promotion = _promotion(tokens, start)
        if promotion is not None and promotion not in promoted:
            promoted.add(promotion)
            edits.append(promotion)
        i += 3

    if not entries:
        return text, SubstitutionTable()
    result = text
    for offset, end, replacement in sorted(edits, reverse=True):
        result = result[:offset] + replacement + result[end:]
    bound = format_float(float_domain) or format_float_approx(float_domain)
    declarations = "".join(f"var -{bound}..{bound}: {name};\n" for name in entries)
    logger.info(
        "Replaced %d constant divisions by %d fresh variables", divisions, len(entries)
    )
    return declarations + result, SubstitutionTable(entries=entries)


def _declares(fzn_text: str, name: str) -> bool:
    pattern = rf"^\s*var\b[^;]*:\s*{re.escape(name)}\b"
    return re.search(pattern, fzn_text, re.MULTILINE) is not None


def patch_fzn(fzn_text: str, table: SubstitutionTable) -> str:
    """Fix every fresh variable of ``table`` to its exact fraction with ``float_div``.

    Raises:
        MissingVariableError: if the compiler eliminated a fresh variable.
    """
    if not table.entries:
        return fzn_text
    lines = []
    for name, entry in table.entries.items():
        if not _declares(fzn_text, name):
            raise MissingVariableError(name)
        numerator = format_float(Fraction(entry.numerator))
        denominator = format_float(Fraction(entry.denominator))
        lines.append(f"constraint float_div({numerator}, {denominator}, {name});\n")
    patch = "".join(lines)
    solve = re.search(r"^\s*solve\b", fzn_text, re.MULTILINE)
    if solve is None:
        separator = "" if not fzn_text or fzn_text.endswith("\n") else "\n"
        return fzn_text + separator + patch
    return fzn_text[: solve.start()] + patch + fzn_text[solve.start() :]


def compiler_command(
    template: str, mzn_path: Path, data_paths: Sequence[Path], fzn_path: Path
) -> List[str]:
    """Split ``template`` and fill in its placeholders.

    ``{mzn}`` and ``{fzn}`` become paths; ``{data}`` expands to any number of
    data files.
    """
    command = []
    for word in shlex.split(template):
        if word == "{data}":
            command.extend(str(path) for path in data_paths)
        else:
            command.append(word.format(mzn=mzn_path, fzn=fzn_path, data=""))
    return command


def run_wrapper(
    mzn_path: Path,
    data_paths: Sequence[Path] = (),
    compiler: Optional[str] = None,
    dedup: bool = True,
    float_domain: Fraction = DEFAULT_FLOAT_DOMAIN,
    table_path: Optional[Path] = None,
) -> str:
    """Rewrite, compile with the external compiler and patch; returns the FlatZinc text.

    The rewritten model is written next to the original so that relative
    includes still resolve. ``table_path`` receives the substitution table as JSON.

    Raises:
        CompilerSpawnError: if the compiler cannot be started.
        CompilerFailedError: if it exits with a non-zero status.
        MissingVariableError: if it eliminated a fresh variable.
    """
    template = compiler or Settings().mzn2fzn_command
    text, table = rewrite_mzn(mzn_path.read_text(encoding="utf-8"), dedup, float_domain)
    with tempfile.TemporaryDirectory(prefix="zinc-bridge-") as workdir:
        fzn_path = Path(workdir) / f"{mzn_path.stem}.fzn"
        with tempfile.NamedTemporaryFile(
            "w",
            suffix=".mzn",
            prefix=f".{mzn_path.stem}-",
            dir=mzn_path.parent,
            delete=False,
        ) as handle:
            handle.write(text)
            rewritten = Path(handle.name)
        try:
            command = compiler_command(template, rewritten, data_paths, fzn_path)
            logger.info("Running MiniZinc compiler: %s", " ".join(command))
            try:
                completed = subprocess.run(
                    command, capture_output=True, text=True, check=False
                )
            except OSError as error:
                reason = error.strerror or str(error)
                raise CompilerSpawnError(command, reason) from error
            if completed.returncode != 0:
                raise CompilerFailedError(
                    command, completed.returncode, completed.stderr
                )
            fzn_text = fzn_path.read_text(encoding="utf-8")
        finally:
            rewritten.unlink()
    if table_path is not None:
        table_path.write_text(table.json(indent=2), encoding="utf-8")
    return patch_fzn(fzn_text, table)
