"""Bit-vectors as integers with modular semantics.

A bit-vector of width ``w`` is an int in ``0..2^w-1``. Arithmetic wraps modulo
``2^w``; signed operations reinterpret through ``s(x) = x - 2^w`` when
``x >= 2^(w-1)``. Bitwise operators and shifts by a variable amount are
expanded bit by bit and only accepted up to :data:`MAX_BITWISE_WIDTH`.
"""

from typing import Callable, List, Optional, Sequence

from zinc_bridge.errors import ScopeError, WidthError
from zinc_bridge.minizinc.ast import (
    MznBinary,
    MznBool,
    MznCall,
    MznExpr,
    MznIdent,
    MznIf,
    MznInt,
)
from zinc_bridge.rational import trunc_div, trunc_mod
from zinc_bridge.smtlib.terms import Term

MAX_WIDTH = 63
MAX_BITWISE_WIDTH = 16

_FOLD = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "div": trunc_div,
    "mod": trunc_mod,
}
_COMPARE = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def check_width(width: int) -> None:
    if width > MAX_WIDTH:
        raise WidthError(
            f"bit-vectors of width {width} are not supported (at most {MAX_WIDTH})"
        )


def _int(value: int) -> MznInt:
    return MznInt(value)


def _op(op: str, a: MznExpr, b: MznExpr) -> MznExpr:
    if isinstance(a, MznInt) and isinstance(b, MznInt):
        if op in _COMPARE:
            return MznBool(_COMPARE[op](a.value, b.value))
        if op not in ("div", "mod") or b.value != 0:
            return MznInt(_FOLD[op](a.value, b.value))
    if op == "*" and (a == MznInt(1) or b == MznInt(1)):
        return b if a == MznInt(1) else a
    if op in ("+", "-") and b == MznInt(0):
        return a
    if op == "+" and a == MznInt(0):
        return b
    return MznBinary(op, a, b)


def _ite(condition: MznExpr, then: MznExpr, otherwise: MznExpr) -> MznExpr:
    if isinstance(condition, MznBool):
        return then if condition.value else otherwise
    return MznIf(condition, then, otherwise)


def to_signed(x: MznExpr, width: int) -> MznExpr:
    half, modulus = 2 ** (width - 1), 2 ** width
    if isinstance(x, MznInt):
        return _int(x.value - modulus if x.value >= half else x.value)
    return MznIf(MznBinary(">=", x, _int(half)), MznBinary("-", x, _int(modulus)), x)


def to_unsigned(x: MznExpr, width: int) -> MznExpr:
    modulus = _int(2 ** width)
    return _op("mod", _op("+", x, modulus), modulus)


def _floor_div(x: MznExpr, divisor: int) -> MznExpr:
    """``floor(x / divisor)`` for a positive constant ``divisor``."""
    p = _int(divisor)
    remainder = _op("mod", _op("+", _op("mod", x, p), p), p)
    return _op("div", _op("-", x, remainder), p)


def _bit(x: MznExpr, i: int) -> MznExpr:
    return _op("mod", _op("div", x, _int(2 ** i)), _int(2))


def _weighted_sum(bits: Sequence[MznExpr]) -> MznExpr:
    total: MznExpr = _int(0)
    for i, bit in enumerate(bits):
        if bit != MznInt(0):
            total = _op("+", total, _op("*", _int(2 ** i), bit))
    return total


def _bit_and(x: MznExpr, y: MznExpr) -> MznExpr:
    for a, b in ((x, y), (y, x)):
        if isinstance(a, MznInt):
            return b if a.value else a
    return _op("*", x, y)


def _bit_or(x: MznExpr, y: MznExpr) -> MznExpr:
    for a, b in ((x, y), (y, x)):
        if isinstance(a, MznInt):
            return a if a.value else b
    return _op("-", _op("+", x, y), _op("*", x, y))


def _bit_xor(x: MznExpr, y: MznExpr) -> MznExpr:
    for a, b in ((x, y), (y, x)):
        if isinstance(a, MznInt):
            return _op("-", _int(1), b) if a.value else b
    return _op("mod", _op("+", x, y), _int(2))


_BITWISE = {"bvand": _bit_and, "bvor": _bit_or, "bvxor": _bit_xor}
_COMPLEMENTED = {"bvnand": "bvand", "bvnor": "bvor", "bvxnor": "bvxor"}


def _check_bitwise(op: str, width: int) -> None:
    if width > MAX_BITWISE_WIDTH:
        raise WidthError(
            f"'{op}' is only supported up to width {MAX_BITWISE_WIDTH}, got {width}"
        )


def _bitwise(op: str, a: MznExpr, b: MznExpr, width: int) -> MznExpr:
    _check_bitwise(op, width)
    complement = op in _COMPLEMENTED
    combine = _BITWISE[_COMPLEMENTED.get(op, op)]
    result = _weighted_sum([combine(_bit(a, i), _bit(b, i)) for i in range(width)])
    return _op("-", _int(2 ** width - 1), result) if complement else result


def _shift_by(op: str, a: MznExpr, k: int, width: int) -> MznExpr:
    modulus = 2 ** width
    if op == "bvshl":
        if k >= width:
            return _int(0)
        return _op("mod", _op("*", a, _int(2 ** k)), _int(modulus))
    if op == "bvlshr":
        return _int(0) if k >= width else _op("div", a, _int(2 ** k))
    # bvashr; shifting by w or more leaves only sign bits
    return to_unsigned(_floor_div(to_signed(a, width), 2 ** min(k, width)), width)


def _shift(op: str, a: MznExpr, b: MznExpr, width: int) -> MznExpr:
    if isinstance(b, MznInt):
        return _shift_by(op, a, b.value, width)
    _check_bitwise(op, width)
    result = _shift_by(op, a, width, width)
    for k in reversed(range(width)):
        result = MznIf(MznBinary("=", b, _int(k)), _shift_by(op, a, k, width), result)
    return result


def _rotate_left(a: MznExpr, k: int, width: int) -> MznExpr:
    r = k % width
    if r == 0:
        return a
    high = _op("mod", _op("*", a, _int(2 ** r)), _int(2 ** width))
    return _op("+", high, _op("div", a, _int(2 ** (width - r))))


def _nonzero(divisor: MznExpr, b: MznExpr) -> MznExpr:
    """``divisor`` with a zero ``b`` replaced so that no branch divides by zero."""
    if isinstance(b, MznInt):
        return divisor
    return MznBinary("+", divisor, MznCall("bool2int", (MznBinary("=", b, _int(0)),)))


def _division(op: str, a: MznExpr, b: MznExpr, width: int) -> MznExpr:
    modulus = 2 ** width
    if isinstance(b, MznInt) and b.value == 0:
        if op == "bvudiv":
            return _int(modulus - 1)
        if op == "bvsdiv":
            non_negative = _op(">=", to_signed(a, width), _int(0))
            return _ite(non_negative, _int(modulus - 1), _int(1))
        return a
    zero = _op("=", b, _int(0))
    if op in ("bvudiv", "bvurem"):
        divisor = b if isinstance(b, MznInt) else MznCall("max", (b, _int(1)))
        if op == "bvudiv":
            return _ite(zero, _int(modulus - 1), _op("div", a, divisor))
        return _ite(zero, a, _op("mod", a, divisor))
    sa = to_signed(a, width)
    sb = _nonzero(to_signed(b, width), b)
    if op == "bvsdiv":
        on_zero = _ite(_op(">=", sa, _int(0)), _int(modulus - 1), _int(1))
        return _ite(zero, on_zero, to_unsigned(_op("div", sa, sb), width))
    remainder = _op("mod", sa, sb)
    if op == "bvsrem":
        return _ite(zero, a, to_unsigned(remainder, width))
    # bvsmod takes the sign of the divisor
    differ = MznBinary(
        "/\\",
        MznBinary("!=", remainder, _int(0)),
        MznBinary(
            "!=", MznBinary("<", remainder, _int(0)), MznBinary("<", sb, _int(0))
        ),
    )
    adjusted = _ite(differ, _op("+", remainder, sb), remainder)
    return _ite(zero, a, to_unsigned(adjusted, width))


_UNSIGNED = {"bvult": "<", "bvule": "<=", "bvugt": ">", "bvuge": ">="}
_SIGNED = {"bvslt": "<", "bvsle": "<=", "bvsgt": ">", "bvsge": ">="}


def translate_bv_operation(term: Term, args: Sequence[MznExpr]) -> MznExpr:
    """Integer expression for the bit-vector application ``term``.

    ``args`` are the already translated arguments.

    Raises:
        WidthError: for widths of 64 or more, or bitwise operators beyond
            :data:`MAX_BITWISE_WIDTH`.
        ScopeError: for an operator that is not a bit-vector operator.
    """
    op = term.op
    width = term.args[0].sort.width
    assert width is not None
    check_width(width)
    if term.sort.is_bv:
        check_width(term.sort.width)  # type: ignore[arg-type]
    modulus = _int(2 ** width)
    if op in _UNSIGNED:
        return _op(_UNSIGNED[op], args[0], args[1])
    if op in _SIGNED:
        return _op(_SIGNED[op], to_signed(args[0], width), to_signed(args[1], width))
    if op in ("bvadd", "bvmul"):
        return _op("mod", _op("+" if op == "bvadd" else "*", args[0], args[1]), modulus)
    if op == "bvsub":
        return _op("mod", _op("+", _op("-", args[0], args[1]), modulus), modulus)
    if op == "bvneg":
        return _op("mod", _op("-", modulus, args[0]), modulus)
    if op == "bvnot":
        return _op("-", _int(2 ** width - 1), args[0])
    if op in _BITWISE or op in _COMPLEMENTED:
        return _bitwise(op, args[0], args[1], width)
    if op in ("bvshl", "bvlshr", "bvashr"):
        return _shift(op, args[0], args[1], width)
    if op in ("bvudiv", "bvurem", "bvsdiv", "bvsrem", "bvsmod"):
        return _division(op, args[0], args[1], width)
    if op == "concat":
        low = term.args[1].sort.width
        assert low is not None
        return _op("+", _op("*", args[0], _int(2 ** low)), args[1])
    if op == "extract":
        high, low = term.indices
        shifted = _op("div", args[0], _int(2 ** low)) if low else args[0]
        if high - low + 1 == width:
            return shifted
        return _op("mod", shifted, _int(2 ** (high - low + 1)))
    if op == "zero_extend":
        return args[0]
    if op == "sign_extend":
        grown = 2 ** (width + term.indices[0])
        negative = _op(">=", args[0], _int(2 ** (width - 1)))
        return _op("+", args[0], _ite(negative, _int(grown - 2 ** width), _int(0)))
    if op == "rotate_left":
        return _rotate_left(args[0], term.indices[0], width)
    if op == "rotate_right":
        return _rotate_left(args[0], width - term.indices[0] % width, width)
    if op == "bvcomp":
        return _ite(_op("=", args[0], args[1]), _int(1), _int(0))
    raise ScopeError(op, "not a bit-vector operator")


def translate_bv_term(
    term: Term, translate_arg: Optional[Callable[[Term], MznExpr]] = None
) -> MznExpr:
    """Translate a bit-vector term or bit-vector comparison to an int expression.

    Children go through ``translate_arg``; by default bit-vector children are
    translated recursively and variables keep their names.
    """
    if term.sort.is_bv:
        check_width(term.sort.width)  # type: ignore[arg-type]
    if term.is_var:
        assert term.name is not None
        return MznIdent(term.name)
    if term.is_const:
        if term.sort.is_bool:
            return MznBool(bool(term.value))
        return _int(term.value)  # type: ignore[arg-type]
    recurse = translate_arg or translate_bv_term
    if term.op in ("=", "distinct"):
        args = [recurse(arg) for arg in term.args]
        return pairwise(term.op, args)
    if term.op == "ite":
        condition, then, otherwise = (recurse(arg) for arg in term.args)
        return MznIf(condition, then, otherwise)
    return translate_bv_operation(term, [recurse(arg) for arg in term.args])


def pairwise(op: str, args: List[MznExpr]) -> MznExpr:
    if op == "=":
        return _op("=", args[0], args[1])
    parts = [_op("!=", a, b) for i, a in enumerate(args) for b in args[i + 1 :]]
    result = parts[0]
    for part in parts[1:]:
        result = MznBinary("/\\", result, part)
    return result
