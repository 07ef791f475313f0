"""MiniZinc text for :mod:`zinc_bridge.minizinc.ast` models.

Parentheses are emitted only where operator precedence requires them. A float
constant without a short exact decimal form is written as a quotient of two
integral float literals, ``(n.0/d.0)``.
"""

from typing import List, Optional

from fractions import Fraction

from zinc_bridge.minizinc.ast import (
    MznArray,
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
from zinc_bridge.rational import format_float

MAX_DECIMAL_DIGITS = 25

PRECEDENCE = {
    "<->": 1200,
    "->": 1100,
    "<-": 1100,
    "\\/": 1000,
    "xor": 1000,
    "/\\": 900,
    "=": 800,
    "!=": 800,
    "<": 800,
    "<=": 800,
    ">": 800,
    ">=": 800,
    "+": 400,
    "-": 400,
    "*": 300,
    "/": 300,
    "div": 300,
    "mod": 300,
}
_NON_ASSOCIATIVE = {"=", "!=", "<", "<=", ">", ">=", "<->", "->", "<-"}
_TOP = 10_000


def format_number(value: Fraction) -> str:
    """A float literal, or a quotient of two when no short exact decimal exists.

    >>> format_number(Fraction(5, 2))
    '2.5'
    >>> format_number(Fraction(1, 3))
    '(1.0/3.0)'
    """
    text = format_float(value, max_digits=MAX_DECIMAL_DIGITS)
    if text is not None:
        return text
    numerator = format_float(Fraction(abs(value.numerator)))
    denominator = format_float(Fraction(value.denominator))
    sign = "-" if value < 0 else ""
    return f"({sign}{numerator}/{denominator})"


def _atom(text: str, negative: bool, limit: int) -> str:
    return f"({text})" if negative and limit < _TOP else text


def print_expr(expr: MznExpr, limit: int = _TOP) -> str:
    if isinstance(expr, MznBool):
        return "true" if expr.value else "false"
    if isinstance(expr, MznInt):
        return _atom(str(expr.value), expr.value < 0, limit)
    if isinstance(expr, MznFloat):
        text = format_number(expr.value)
        return _atom(text, expr.value < 0 and not text.startswith("("), limit)
    if isinstance(expr, MznIdent):
        return expr.name
    if isinstance(expr, MznUnary):
        operand = print_expr(expr.operand, 0)
        text = f"not {operand}" if expr.op == "not" else f"-{operand}"
        return f"({text})" if limit < _TOP else text
    if isinstance(expr, MznBinary):
        precedence = PRECEDENCE[expr.op]
        right_limit = precedence - 1
        left_limit = right_limit if expr.op in _NON_ASSOCIATIVE else precedence
        left = print_expr(expr.left, left_limit)
        text = f"{left} {expr.op} {print_expr(expr.right, right_limit)}"
        return f"({text})" if precedence > limit else text
    if isinstance(expr, MznIf):
        return (
            f"if {print_expr(expr.condition)} then {print_expr(expr.then)} "
            f"else {print_expr(expr.otherwise)} endif"
        )
    if isinstance(expr, MznCall):
        return f"{expr.name}({', '.join(print_expr(arg) for arg in expr.args)})"
    if isinstance(expr, MznArray):
        return f"[{', '.join(print_expr(item) for item in expr.items)}]"
    raise TypeError(f"not a MiniZinc expression: {expr!r}")


def _bound(expr: MznExpr) -> str:
    if isinstance(expr, MznInt):
        return str(expr.value)
    if isinstance(expr, MznFloat) and format_float(expr.value) is not None:
        return format_float(expr.value)  # type: ignore[return-value]
    return print_expr(expr, 0)


def _type(decl: MznVarDecl) -> str:
    if decl.lo is not None and decl.hi is not None:
        return f"{_bound(decl.lo)}..{_bound(decl.hi)}"
    return decl.base.value


def print_item(item: MznItem) -> str:
    if isinstance(item, MznInclude):
        return f'include "{item.file}";'
    if isinstance(item, MznVerbatim):
        return item.text
    if isinstance(item, MznVarDecl):
        value = f" = {print_expr(item.value)}" if item.value is not None else ""
        if item.is_array:
            head = f"array[1..{item.array_length}] of var {_type(item)}"
            return f"{head}: {item.name}{value};"
        return f"var {_type(item)}: {item.name}{value};"
    if isinstance(item, MznConstraint):
        return f"constraint {print_expr(item.expr)};"
    if isinstance(item, MznSolve):
        if item.kind == MznSolveKind.SATISFY:
            return "solve satisfy;"
        assert item.expr is not None
        return f"solve {item.kind.value} {print_expr(item.expr)};"
    raise TypeError(f"not a MiniZinc item: {item!r}")


def print_mzn(model: MznModel, header: Optional[List[str]] = None) -> str:
    lines = [f"% {line}" for line in header or ()]
    lines.extend(print_item(item) for item in model.items)
    return "\n".join(lines) + "\n"
