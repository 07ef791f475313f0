"""Exact evaluation of MiniZinc subset expressions.

Integer ``div``/``mod`` truncate toward zero. An undefined operation (division
by zero) makes the nearest enclosing Boolean context false, following the
relational semantics of MiniZinc.
"""

from typing import Any, Callable, Dict, Mapping, Tuple, Union

import operator
from fractions import Fraction

from zinc_bridge.minizinc.ast import (
    MznArray,
    MznBinary,
    MznBool,
    MznCall,
    MznExpr,
    MznFloat,
    MznIdent,
    MznIf,
    MznInt,
    MznUnary,
)
from zinc_bridge.rational import trunc_div, trunc_mod

MznValue = Union[bool, int, Fraction, Tuple[Any, ...]]


class Undefined(Exception):
    pass


def _div(a: int, b: int) -> int:
    if b == 0:
        raise Undefined()
    return trunc_div(a, b)


def _mod(a: int, b: int) -> int:
    if b == 0:
        raise Undefined()
    return trunc_mod(a, b)


def _divide(a: Any, b: Any) -> Fraction:
    if b == 0:
        raise Undefined()
    return Fraction(a) / Fraction(b)


_ARITHMETIC: Dict[str, Callable[[Any, Any], Any]] = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": _divide,
    "div": _div,
    "mod": _mod,
}
_COMPARISONS: Dict[str, Callable[[Any, Any], bool]] = {
    "=": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}
_CALLS: Dict[str, Callable[..., Any]] = {
    "int2float": Fraction,
    "bool2int": int,
    "abs": abs,
    "min": min,
    "max": max,
}


def _boolean(expr: MznExpr, assignment: Mapping[str, MznValue]) -> bool:
    try:
        return bool(evaluate(expr, assignment))
    except Undefined:
        return False


def evaluate(expr: MznExpr, assignment: Mapping[str, MznValue]) -> MznValue:
    """Value of ``expr``; identifiers are looked up in ``assignment``.

    Raises:
        Undefined: for a division by zero outside any Boolean context.
        KeyError: for an unassigned identifier.
    """
    if isinstance(expr, (MznBool, MznInt, MznFloat)):
        return expr.value
    if isinstance(expr, MznIdent):
        return assignment[expr.name]
    if isinstance(expr, MznUnary):
        if expr.op == "not":
            return not _boolean(expr.operand, assignment)
        return -evaluate(expr.operand, assignment)  # type: ignore[operator]
    if isinstance(expr, MznBinary):
        op = expr.op
        if op in _COMPARISONS:
            try:
                left = evaluate(expr.left, assignment)
                right = evaluate(expr.right, assignment)
            except Undefined:
                return False
            return _COMPARISONS[op](left, right)
        if op in _ARITHMETIC:
            left = evaluate(expr.left, assignment)
            right = evaluate(expr.right, assignment)
            return _ARITHMETIC[op](left, right)
        a = _boolean(expr.left, assignment)
        b = _boolean(expr.right, assignment)
        if op == "/\\":
            return a and b
        if op == "\\/":
            return a or b
        if op == "->":
            return (not a) or b
        if op == "<-":
            return a or not b
        if op == "<->":
            return a == b
        if op == "xor":
            return a != b
        raise ValueError(f"unknown operator {op!r}")
    if isinstance(expr, MznIf):
        branch = expr.then if _boolean(expr.condition, assignment) else expr.otherwise
        return evaluate(branch, assignment)
    if isinstance(expr, MznCall):
        function = _CALLS.get(expr.name)
        if function is None:
            raise ValueError(f"unknown function {expr.name!r}")
        return function(*(evaluate(arg, assignment) for arg in expr.args))
    if isinstance(expr, MznArray):
        return tuple(evaluate(item, assignment) for item in expr.items)
    raise TypeError(f"not a MiniZinc expression: {expr!r}")
