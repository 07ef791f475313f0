"""S-expression reader for SMT-LIB v2 text."""

from typing import List, Tuple, Union

import re
from dataclasses import dataclass

from zinc_bridge.errors import ParseError, TokenizeError

_TOKEN = re.compile(
    r"""
    (?P<space>\s+)
    | (?P<comment>;[^\n]*)
    | (?P<open>\()
    | (?P<close>\))
    | (?P<decimal>\d+\.\d+)
    | (?P<numeral>\d+)
    | (?P<binary>\#b[01]+)
    | (?P<hex>\#x[0-9A-Fa-f]+)
    | (?P<string>"(?:[^"]|"")*")
    | (?P<quoted>\|[^|\\]*\|)
    | (?P<keyword>:[A-Za-z0-9~!@$%^&*_\-+=<>.?/]+)
    | (?P<symbol>[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Atom:
    kind: str
    text: str
    line: int
    column: int

    @property
    def symbol(self) -> str:
        """The symbol name, without ``|`` quotes."""
        if self.kind == "quoted":
            return self.text[1:-1]
        return self.text

    @property
    def is_symbol(self) -> bool:
        return self.kind in ("symbol", "quoted")


@dataclass(frozen=True)
class SList:
    items: Tuple["SExpr", ...]
    line: int
    column: int


SExpr = Union[Atom, SList]


def position(expr: SExpr) -> Tuple[int, int]:
    return expr.line, expr.column


def read_sexprs(text: str) -> List[SExpr]:
    """Read every top-level s-expression of ``text``."""
    stack: List[Tuple[List[SExpr], int, int]] = []
    top: List[SExpr] = []
    offset = 0
    line = 1
    line_start = 0
    while offset < len(text):
        match = _TOKEN.match(text, offset)
        column = offset - line_start + 1
        if match is None:
            char = text[offset]
            if char in "\"|":
                what = "string" if char == "\"" else "quoted symbol"
                raise TokenizeError(f"unterminated {what}", line, column)
            raise TokenizeError(f"unexpected character {char!r}", line, column)
        kind = match.lastgroup
        assert kind is not None
        lexeme = match.group()
        if kind == "open":
            stack.append(([], line, column))
        elif kind == "close":
            if not stack:
                raise ParseError("unbalanced ')'", line, column)
            items, open_line, open_column = stack.pop()
            node = SList(tuple(items), open_line, open_column)
            (stack[-1][0] if stack else top).append(node)
        elif kind not in ("space", "comment"):
            atom = Atom(kind, lexeme, line, column)
            (stack[-1][0] if stack else top).append(atom)
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = offset + lexeme.rindex("\n") + 1
        offset = match.end()
    if stack:
        _, open_line, open_column = stack[-1]
        raise ParseError("unbalanced '('", open_line, open_column)
    return top
