from typing import List, NamedTuple, Optional

import logging
import re

from zinc_bridge.errors import ParseError, TokenizeError
from zinc_bridge.minizinc.ast import (
    MznArray,
    MznBaseType,
    MznBinary,
    MznBool,
    MznCall,
    MznConstraint,
    MznExpr,
    MznFloat,
    MznIdent,
    MznIf,
    MznInclude,
    MznInt,
    MznItem,
    MznModel,
    MznSolve,
    MznSolveKind,
    MznUnary,
    MznVarDecl,
    MznVerbatim,
)
from zinc_bridge.minizinc.printer import PRECEDENCE
from zinc_bridge.rational import parse_decimal

logger = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"""
    (?P<space>\s+)
    | (?P<comment>%[^\n]*)
    | (?P<float>\d+\.\d+(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+)
    | (?P<int>\d+)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<string>"(?:\\.|[^"\\\n])*")
    | (?P<op><->|->|<-|\\/|/\\|!=|==|<=|>=|\.\.|::|[-+*/<>=:;,()\[\]{}|])
    """,
    re.VERBOSE,
)

_VERBATIM_ITEMS = ("predicate", "function", "output", "test", "annotation")
_WORD_OPERATORS = ("div", "mod", "xor")
_TOP = 10_000


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int
    offset: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    position = 0
    line = 1
    line_start = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        column = position - line_start + 1
        if match is None:
            raise TokenizeError(
                f"unexpected character {text[position]!r}", line, column
            )
        kind = match.lastgroup
        assert kind is not None
        if kind not in ("space", "comment"):
            tokens.append(Token(kind, match.group(), line, column, position))
        newlines = match.group().count("\n")
        if newlines:
            line += newlines
            line_start = position + match.group().rindex("\n") + 1
        position = match.end()
    tokens.append(Token("eof", "", line, position - line_start + 1, position))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.position = 0

    def peek(self) -> Token:
        return self.tokens[self.position]

    def next(self) -> Token:
        token = self.tokens[self.position]
        if token.kind != "eof":
            self.position += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> ParseError:
        token = token or self.peek()
        return ParseError(message, token.line, token.column)

    def at(self, text: str) -> bool:
        token = self.peek()
        return token.kind in ("op", "ident") and token.text == text

    def expect(self, text: str) -> Token:
        token = self.next()
        if token.text != text or token.kind not in ("op", "ident"):
            found = token.text or "end of input"
            raise self.error(f"expected '{text}', found '{found}'", token)
        return token

    def skip_annotations(self) -> None:
        while self.at("::"):
            self.next()
            self.parse_primary()

    # items

    def parse(self) -> MznModel:
        items: List[MznItem] = []
        while self.peek().kind != "eof":
            items.append(self.parse_item())
        return MznModel(tuple(items))

    def parse_item(self) -> MznItem:
        token = self.peek()
        if token.kind == "ident" and token.text in _VERBATIM_ITEMS:
            return self.parse_verbatim()
        if self.at("include"):
            self.next()
            file = self.next()
            if file.kind != "string":
                raise self.error("expected a file name after include", file)
            self.expect(";")
            return MznInclude(file.text[1:-1])
        if self.at("constraint"):
            self.next()
            expr = self.parse_expr()
            self.expect(";")
            return MznConstraint(expr)
        if self.at("solve"):
            return self.parse_solve()
        if self.at("var") or self.at("array"):
            return self.parse_declaration()
        raise self.error(f"unexpected '{token.text}' at start of item")

    def parse_verbatim(self) -> MznVerbatim:
        start = self.peek().offset
        depth = 0
        while True:
            token = self.next()
            if token.kind == "eof":
                raise self.error("unterminated item", token)
            if token.text in ("(", "[", "{"):
                depth += 1
            elif token.text in (")", "]", "}"):
                depth -= 1
            elif token.text == ";" and depth == 0:
                return MznVerbatim(self.text[start : token.offset + 1])

    def parse_declaration(self) -> MznVarDecl:
        length = None
        if self.at("array"):
            self.next()
            self.expect("[")
            first = self.next()
            if first.text != "1":
                raise self.error("array index sets must start at 1", first)
            self.expect("..")
            size = self.next()
            if size.kind != "int":
                raise self.error("expected an array length", size)
            length = int(size.text)
            self.expect("]")
            self.expect("of")
        self.expect("var")
        lo = hi = None
        token = self.peek()
        if token.kind == "ident" and token.text in ("bool", "int", "float"):
            base = MznBaseType(self.next().text)
        else:
            lo = self.parse_expr()
            self.expect("..")
            hi = self.parse_expr()
            is_float = isinstance(lo, MznFloat) or isinstance(hi, MznFloat)
            base = MznBaseType.FLOAT if is_float else MznBaseType.INT
        self.expect(":")
        name = self.next()
        if name.kind != "ident":
            raise self.error("expected a variable name", name)
        self.skip_annotations()
        value = None
        if self.at("="):
            self.next()
            value = self.parse_expr()
        self.expect(";")
        return MznVarDecl(name.text, base, lo, hi, value, length)

    def parse_solve(self) -> MznSolve:
        self.expect("solve")
        self.skip_annotations()
        token = self.next()
        try:
            kind = MznSolveKind(token.text)
        except ValueError:
            raise self.error(f"unknown solve kind '{token.text}'", token) from None
        expr = None if kind == MznSolveKind.SATISFY else self.parse_expr()
        self.expect(";")
        return MznSolve(kind, expr)

    # expressions

    def binary_operator(self) -> Optional[str]:
        token = self.peek()
        if token.kind == "op" and (token.text in PRECEDENCE or token.text == "=="):
            return "=" if token.text == "==" else token.text
        if token.kind == "ident" and token.text in _WORD_OPERATORS:
            return token.text
        return None

    def parse_expr(self, limit: int = _TOP) -> MznExpr:
        left = self.parse_unary()
        while True:
            op = self.binary_operator()
            if op is None or PRECEDENCE[op] > limit:
                return left
            self.next()
            right = self.parse_expr(PRECEDENCE[op] - 1)
            left = MznBinary(op, left, right)

    def parse_unary(self) -> MznExpr:
        if self.at("not"):
            self.next()
            return MznUnary("not", self.parse_unary())
        if self.at("-"):
            self.next()
            operand = self.parse_unary()
            if isinstance(operand, MznInt):
                return MznInt(-operand.value)
            if isinstance(operand, MznFloat):
                return MznFloat(-operand.value)
            return MznUnary("-", operand)
        return self.parse_primary()

    def parse_primary(self) -> MznExpr:
        token = self.next()
        if token.kind == "int":
            return MznInt(int(token.text))
        if token.kind == "float":
            return MznFloat(parse_decimal(token.text))
        if token.kind == "op" and token.text == "(":
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if token.kind == "op" and token.text == "[":
            return MznArray(tuple(self.parse_list("]")))
        if token.kind == "ident":
            if token.text in ("true", "false"):
                return MznBool(token.text == "true")
            if token.text == "if":
                return self.parse_if()
            if self.at("("):
                self.next()
                return MznCall(token.text, tuple(self.parse_list(")")))
            return MznIdent(token.text)
        found = token.text or "end of input"
        raise self.error(f"unexpected '{found}' in expression", token)

    def parse_list(self, closing: str) -> List[MznExpr]:
        items = []
        while not self.at(closing):
            items.append(self.parse_expr())
            if not self.at(closing):
                self.expect(",")
        self.expect(closing)
        return items

    def parse_if(self) -> MznExpr:
        condition = self.parse_expr()
        self.expect("then")
        then = self.parse_expr()
        if self.at("elseif"):
            self.next()
            return MznIf(condition, then, self.parse_if())
        self.expect("else")
        otherwise = self.parse_expr()
        self.expect("endif")
        return MznIf(condition, then, otherwise)


def parse_mzn(text: str) -> MznModel:
    """Parse a model of the emitted MiniZinc subset."""
    model = _Parser(text).parse()
    logger.debug("Parsed MiniZinc model with %d items", len(model.items))
    return model
