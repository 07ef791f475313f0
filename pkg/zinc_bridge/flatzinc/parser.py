from typing import List, NamedTuple, Optional, Tuple, Union

import logging
import re

from zinc_bridge.errors import ParseError, TokenizeError
from zinc_bridge.flatzinc.model import (
    Annotation,
    ArrayAccess,
    ArrayLit,
    BaseType,
    BoolLit,
    Domain,
    Expr,
    FloatLit,
    FznConstraint,
    FznModel,
    FznParam,
    FznSolveGoal,
    FznType,
    FznVarDecl,
    GoalKind,
    Ident,
    IntervalDomain,
    IntLit,
    RangeLit,
    SetDomain,
    SetLit,
    StringLit,
)
from zinc_bridge.flatzinc.validate import validate_model
from zinc_bridge.rational import parse_decimal

logger = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"""
    (?P<space>\s+)
    | (?P<comment>%[^\n]*)
    | (?P<float>-?\d+\.\d+(?:[eE][-+]?\d+)?|-?\d+[eE][-+]?\d+)
    | (?P<int>-?0x[0-9A-Fa-f]+|-?0o[0-7]+|-?\d+)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<string>"(?:\\.|[^"\\\n])*")
    | (?P<punct>\.\.|::|[:;,=()\[\]{}])
    """,
    re.VERBOSE,
)


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
        if match is None:
            column = position - line_start + 1
            if text[position] == '"':
                raise TokenizeError("unterminated string", line, column)
            raise TokenizeError(
                f"unexpected character {text[position]!r}", line, column
            )
        kind = match.lastgroup
        assert kind is not None
        if kind not in ("space", "comment"):
            tokens.append(
                Token(kind, match.group(), line, position - line_start + 1, position)
            )
        newlines = match.group().count("\n")
        if newlines:
            line += newlines
            line_start = position + match.group().rindex("\n") + 1
        position = match.end()
    tokens.append(Token("eof", "", line, position - line_start + 1, position))
    return tokens


def _int_value(text: str) -> int:
    negative = text.startswith("-")
    digits = text[1:] if negative else text
    if digits.startswith("0x"):
        value = int(digits[2:], 16)
    elif digits.startswith("0o"):
        value = int(digits[2:], 8)
    else:
        value = int(digits)
    return -value if negative else value


_SCALAR_TYPES = {
    "bool": BaseType.BOOL,
    "int": BaseType.INT,
    "float": BaseType.FLOAT,
}


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.position = 0

    # token helpers

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.position + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        token = self.peek()
        self.position += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> ParseError:
        token = token or self.peek()
        return ParseError(message, token.line, token.column)

    def at(self, text: str) -> bool:
        token = self.peek()
        return token.kind in ("punct", "ident") and token.text == text

    def expect(self, text: str) -> Token:
        token = self.next()
        if token.text != text or token.kind not in ("punct", "ident"):
            found = token.text or "end of input"
            raise self.error(f"expected '{text}', found '{found}'", token)
        return token

    def expect_kind(self, kind: str) -> Token:
        token = self.next()
        if token.kind != kind:
            found = token.text or "end of input"
            raise self.error(f"expected {kind}, found '{found}'", token)
        return token

    # items

    def parse(
        self,
    ) -> Tuple[
        List[str],
        List[FznParam],
        List[FznVarDecl],
        List[FznConstraint],
        List[FznSolveGoal],
    ]:
        predicates: List[str] = []
        params: List[FznParam] = []
        variables: List[FznVarDecl] = []
        constraints: List[FznConstraint] = []
        goals: List[FznSolveGoal] = []
        while self.peek().kind != "eof":
            token = self.peek()
            if token.kind != "ident":
                raise self.error(f"unexpected '{token.text}' at start of item")
            if token.text == "predicate":
                predicates.append(self.parse_predicate())
            elif token.text == "constraint":
                constraints.append(self.parse_constraint())
            elif token.text == "solve":
                goals.append(self.parse_solve())
            else:
                declaration = self.parse_declaration()
                if isinstance(declaration, FznParam):
                    params.append(declaration)
                else:
                    variables.append(declaration)
        return predicates, params, variables, constraints, goals

    def parse_predicate(self) -> str:
        start = self.next()
        depth = 0
        while True:
            token = self.next()
            if token.kind == "eof":
                raise self.error("unterminated predicate declaration", start)
            if token.text == "(":
                depth += 1
            elif token.text == ")":
                depth -= 1
            elif token.text == ";" and depth == 0:
                return self.text[start.offset : token.offset + 1]

    def parse_declaration(self) -> Union[FznParam, FznVarDecl]:
        array_length = None
        if self.at("array"):
            self.next()
            self.expect("[")
            lo = self.expect_kind("int")
            self.expect("..")
            hi = self.expect_kind("int")
            self.expect("]")
            self.expect("of")
            if _int_value(lo.text) != 1:
                raise self.error("array index sets must start at 1", lo)
            array_length = _int_value(hi.text)
        is_var = self.at("var")
        if is_var:
            self.next()
        base, domain = self.parse_type(is_var)
        self.expect(":")
        name = self.expect_kind("ident").text
        annotations = self.parse_annotations()
        value = None
        if self.at("="):
            self.next()
            value = self.parse_expr()
        self.expect(";")
        fzn_type = FznType(base, is_var, array_length)
        if not is_var:
            if value is None:
                raise self.error(f"parameter '{name}' has no value")
            return FznParam(name, fzn_type, value)
        return FznVarDecl(name, fzn_type, domain, value, annotations)

    def parse_type(self, is_var: bool) -> Tuple[BaseType, Optional[Domain]]:
        token = self.peek()
        if token.kind == "ident" and token.text in _SCALAR_TYPES:
            self.next()
            return _SCALAR_TYPES[token.text], None
        if token.kind == "ident" and token.text == "set":
            self.next()
            self.expect("of")
            if self.at("int"):
                self.next()
                return BaseType.SET, None
            if not is_var:
                raise self.error("parameter sets must be declared 'set of int'")
            return BaseType.SET, self.parse_int_domain()
        if not is_var:
            raise self.error(f"unknown parameter type '{token.text}'")
        if token.kind == "float":
            lo = parse_decimal(self.next().text)
            self.expect("..")
            hi = parse_decimal(self.expect_kind("float").text)
            return BaseType.FLOAT, self._interval(lo, hi, token)
        return BaseType.INT, self.parse_int_domain()

    def parse_int_domain(self) -> Domain:
        token = self.peek()
        if token.text == "{":
            elements = self.parse_set_elements()
            if not elements:
                raise self.error("empty set domain", token)
            return SetDomain(tuple(sorted(set(elements))))
        lo = _int_value(self.expect_kind("int").text)
        self.expect("..")
        hi = _int_value(self.expect_kind("int").text)
        return self._interval(lo, hi, token)

    def _interval(self, lo: object, hi: object, token: Token) -> IntervalDomain:
        if lo > hi:  # type: ignore[operator]
            raise self.error(f"empty domain {lo}..{hi}", token)
        return IntervalDomain(lo, hi)  # type: ignore[arg-type]

    def parse_set_elements(self) -> List[int]:
        self.expect("{")
        elements = []
        while not self.at("}"):
            elements.append(_int_value(self.expect_kind("int").text))
            if not self.at("}"):
                self.expect(",")
        self.expect("}")
        return elements

    def parse_constraint(self) -> FznConstraint:
        self.expect("constraint")
        name = self.expect_kind("ident").text
        self.expect("(")
        args = []
        while not self.at(")"):
            args.append(self.parse_expr())
            if not self.at(")"):
                self.expect(",")
        self.expect(")")
        annotations = self.parse_annotations()
        self.expect(";")
        return FznConstraint(name, tuple(args), annotations)

    def parse_solve(self) -> FznSolveGoal:
        self.expect("solve")
        annotations = self.parse_annotations()
        token = self.expect_kind("ident")
        try:
            kind = GoalKind(token.text)
        except ValueError:
            raise self.error(f"unknown solve goal '{token.text}'", token) from None
        objective = None
        if kind != GoalKind.SATISFY:
            objective = self.parse_expr()
        self.expect(";")
        return FznSolveGoal(kind, objective, annotations)

    # expressions

    def parse_expr(self) -> Expr:
        token = self.next()
        if token.kind == "int":
            value = _int_value(token.text)
            if self.at(".."):
                self.next()
                return RangeLit(value, _int_value(self.expect_kind("int").text))
            return IntLit(value)
        if token.kind == "float":
            return FloatLit(parse_decimal(token.text))
        if token.kind == "string":
            return StringLit(token.text[1:-1])
        if token.text == "{" and token.kind == "punct":
            self.position -= 1
            return SetLit(tuple(sorted(set(self.parse_set_elements()))))
        if token.text == "[" and token.kind == "punct":
            items = []
            while not self.at("]"):
                items.append(self.parse_expr())
                if not self.at("]"):
                    self.expect(",")
            self.expect("]")
            return ArrayLit(tuple(items))
        if token.kind == "ident":
            if token.text in ("true", "false"):
                return BoolLit(token.text == "true")
            if self.at("["):
                self.next()
                index = _int_value(self.expect_kind("int").text)
                self.expect("]")
                return ArrayAccess(token.text, index)
            return Ident(token.text)
        found = token.text or "end of input"
        raise self.error(f"unexpected '{found}' in expression", token)

    def parse_annotations(self) -> Tuple[Annotation, ...]:
        annotations = []
        while self.at("::"):
            self.next()
            annotations.append(self.parse_annotation())
        return tuple(annotations)

    def parse_annotation(self) -> Annotation:
        name = self.expect_kind("ident").text
        args = []
        if self.at("("):
            self.next()
            while not self.at(")"):
                args.append(self.parse_annotation_arg())
                if not self.at(")"):
                    self.expect(",")
            self.expect(")")
        return Annotation(name, tuple(args))

    def parse_annotation_arg(self) -> object:
        token = self.peek()
        if token.kind == "ident" and self.peek(1).text == "(":
            return self.parse_annotation()
        if token.kind == "punct" and token.text == "[":
            self.next()
            items = []
            while not self.at("]"):
                items.append(self.parse_annotation_arg())
                if not self.at("]"):
                    self.expect(",")
            self.expect("]")
            return ArrayLit(tuple(items))  # type: ignore[arg-type]
        return self.parse_expr()


def parse_fzn(text: str, allow_multi_objective: bool = False) -> FznModel:
    """Parse and validate a FlatZinc document.

    Args:
        text: the FlatZinc source.
        allow_multi_objective: accept several consecutive solve items.

    Returns:
        The validated model.
    """
    predicates, params, variables, constraints, goals = _Parser(text).parse()
    model = FznModel(
        params=tuple(params),
        vars=tuple(variables),
        constraints=tuple(constraints),
        solve_items=tuple(goals),
        predicates=tuple(predicates),
    )
    model = validate_model(model, allow_multi_objective)
    logger.debug(
        "Parsed FlatZinc model with %d variables and %d constraints",
        len(model.vars),
        len(model.constraints),
    )
    return model


