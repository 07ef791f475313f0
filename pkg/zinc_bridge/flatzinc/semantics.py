"""FlatZinc standard semantics of the builtins in the signature table.

Values are ``bool``, ``int``, :class:`~fractions.Fraction` (floats), ``frozenset``
(sets of int) and tuples (arrays). :class:`Scope` resolves expressions against an
assignment; :data:`CHECKS` decides a constraint; :func:`functional_output`
computes a variable that a constraint defines from the rest of its arguments.
"""

from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import operator
from fractions import Fraction

from zinc_bridge.flatzinc.builtins import SIGNATURES
from zinc_bridge.flatzinc.model import (
    ArrayAccess,
    ArrayLit,
    BoolLit,
    Expr,
    FloatLit,
    FznConstraint,
    FznModel,
    Ident,
    IntLit,
    RangeLit,
    SetLit,
    set_elements,
)
from zinc_bridge.rational import trunc_div, trunc_mod

Value = Union[bool, int, Fraction, FrozenSet[int], Tuple[Any, ...]]


class NotEvaluable(Exception):
    """The builtin has no exact rational semantics (transcendental functions)."""


class Undefined(Exception):
    """No value of the defined variable satisfies the constraint."""


class Scope:
    """Resolves expressions of ``model`` under a (partial) assignment of its variables.

    Parameters, variable arrays and assigned (alias) variables are looked through.
    """

    def __init__(self, model: FznModel, assignment: Mapping[str, Value]) -> None:
        self.model = model
        self.assignment = assignment

    def lookup(self, name: str) -> Value:
        if name in self.assignment:
            return self.assignment[name]
        value = self.model.declarations[name].value
        if value is None:
            raise KeyError(name)
        return self.value(value)

    def value(self, expr: Expr) -> Value:
        if isinstance(expr, BoolLit):
            return expr.value
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, FloatLit):
            return expr.value
        if isinstance(expr, (SetLit, RangeLit)):
            return frozenset(set_elements(expr))
        if isinstance(expr, Ident):
            return self.lookup(expr.name)
        if isinstance(expr, ArrayAccess):
            array = self.lookup(expr.name)
            assert isinstance(array, tuple)
            return array[expr.index - 1]
        if isinstance(expr, ArrayLit):
            return tuple(self.value(item) for item in expr.items)
        raise TypeError(f"cannot evaluate {expr!r}")


def _element(index: int, array: Sequence[Value], result: Value) -> bool:
    return 1 <= index <= len(array) and array[index - 1] == result


def _lin(coefficients: Sequence[Any], values: Sequence[Any]) -> Any:
    return sum((c * v for c, v in zip(coefficients, values)), 0)


def _reified(check: Callable[..., bool]) -> Callable[..., bool]:
    def reified(*args: Any) -> bool:
        return check(*args[:-1]) == args[-1]

    return reified


def _int_div(a: int, b: int, c: int) -> bool:
    return b != 0 and trunc_div(a, b) == c


def _int_mod(a: int, b: int, c: int) -> bool:
    return b != 0 and trunc_mod(a, b) == c


def _int_pow(a: int, b: int, c: int) -> bool:
    if b < 0:
        return a in (1, -1) and a ** (-b) == c
    return a ** b == c


def _float_div(a: Fraction, b: Fraction, c: Fraction) -> bool:
    return b != 0 and Fraction(a) / Fraction(b) == c


def _float_pow(a: Fraction, b: Fraction, c: Fraction) -> bool:
    if Fraction(b).denominator != 1 or (a == 0 and b < 0):
        raise NotEvaluable("float_pow with a non-integral exponent")
    return Fraction(a) ** int(b) == c


def _table(variables: Sequence[Any], table: Sequence[Any]) -> bool:
    width = len(variables)
    if width == 0:
        return True
    rows = (tuple(table[i : i + width]) for i in range(0, len(table), width))
    return tuple(variables) in set(rows)


def _transcendental(*args: Any) -> bool:
    raise NotEvaluable("transcendental builtin")


_COMPARISONS: Dict[str, Callable[[Any, Any], bool]] = {
    "eq": operator.eq,
    "ne": operator.ne,
    "le": operator.le,
    "lt": operator.lt,
}

CHECKS: Dict[str, Callable[..., bool]] = {
    "array_bool_and": lambda xs, r: all(xs) == r,
    "array_bool_or": lambda xs, r: any(xs) == r,
    "array_bool_xor": lambda xs: sum(xs) % 2 == 1,
    "array_bool_element": _element,
    "array_var_bool_element": _element,
    "bool2int": lambda b, x: int(b) == x,
    "bool_and": lambda a, b, r: (a and b) == r,
    "bool_or": lambda a, b, r: (a or b) == r,
    "bool_not": lambda a, b: a != b,
    "bool_clause": lambda pos, neg: any(pos) or not all(neg),
    "bool_clause_reif": lambda pos, neg, r: (any(pos) or not all(neg)) == r,
    "bool_lin_eq": lambda cs, xs, c: _lin(cs, map(int, xs)) == c,
    "bool_lin_le": lambda cs, xs, c: _lin(cs, map(int, xs)) <= c,
    "array_int_element": _element,
    "array_var_int_element": _element,
    "int_abs": lambda a, b: abs(a) == b,
    "int_div": _int_div,
    "int_mod": _int_mod,
    "int_max": lambda a, b, c: max(a, b) == c,
    "int_min": lambda a, b, c: min(a, b) == c,
    "int_plus": lambda a, b, c: a + b == c,
    "int_times": lambda a, b, c: a * b == c,
    "int_pow": _int_pow,
    "int2float": lambda a, b: a == b,
    "array_float_element": _element,
    "array_var_float_element": _element,
    "float_abs": lambda a, b: abs(a) == b,
    "float_div": _float_div,
    "float_max": lambda a, b, c: max(a, b) == c,
    "float_min": lambda a, b, c: min(a, b) == c,
    "float_plus": lambda a, b, c: a + b == c,
    "float_times": lambda a, b, c: a * b == c,
    "float_pow": _float_pow,
    "array_set_element": _element,
    "array_var_set_element": _element,
    "set_card": lambda s, n: len(s) == n,
    "set_diff": lambda a, b, c: a - b == c,
    "set_intersect": lambda a, b, c: a & b == c,
    "set_symdiff": lambda a, b, c: a ^ b == c,
    "set_union": lambda a, b, c: a | b == c,
    "set_eq": lambda a, b: a == b,
    "set_ne": lambda a, b: a != b,
    "set_subset": lambda a, b: a <= b,
    "set_superset": lambda a, b: a >= b,
    "set_in": lambda x, s: x in s,
    "all_different_int": lambda xs: len(set(xs)) == len(xs),
    "table_int": _table,
    "table_bool": _table,
}

for _suffix, _compare in _COMPARISONS.items():
    for _prefix in ("bool", "int", "float"):
        if _prefix == "bool" and _suffix == "ne":
            continue
        CHECKS[f"{_prefix}_{_suffix}"] = _compare
    CHECKS[f"int_lin_{_suffix}"] = (
        lambda compare: lambda cs, xs, c: compare(_lin(cs, xs), c)
    )(_compare)
    CHECKS[f"float_lin_{_suffix}"] = CHECKS[f"int_lin_{_suffix}"]

CHECKS["bool_xor"] = lambda a, b, *r: (a != b) == r[0] if r else a != b

for _name in ("maximum", "minimum"):
    _pick = max if _name == "maximum" else min
    for _alias in (f"array_int_{_name}", f"{_name}_int", f"array_float_{_name}"):
        CHECKS[_alias] = (lambda pick: lambda m, xs: bool(xs) and pick(xs) == m)(_pick)

CHECKS["count"] = CHECKS["count_eq"] = lambda xs, y, c: sum(x == y for x in xs) == c

for _name in list(CHECKS):
    if _name.startswith(("all_different", "count", "table")):
        CHECKS[f"fzn_{_name}"] = CHECKS[_name]

for _name in SIGNATURES:
    if _name.endswith("_reif") and _name not in CHECKS:
        CHECKS[_name] = _reified(CHECKS[_name[: -len("_reif")]])

for _name in (
    "acos acosh asin asinh atan atanh cos cosh exp ln log10 log2 sin sinh sqrt tan tanh"
).split():
    CHECKS[f"float_{_name}"] = _transcendental


def check_constraint(constraint: FznConstraint, scope: Scope) -> bool:
    """Decide ``constraint`` under ``scope``.

    Raises:
        NotEvaluable: for builtins without exact semantics.
        KeyError: when an argument mentions an unassigned variable.
    """
    check = CHECKS.get(constraint.name)
    if check is None:
        raise NotEvaluable(constraint.name)
    return bool(check(*(scope.value(arg) for arg in constraint.args)))


# Functional outputs

Solver = Callable[[Scope], Value]

_LAST_ARGUMENT_FUNCTIONS: Dict[str, Callable[..., Value]] = {
    "array_bool_and": lambda xs: all(xs),
    "array_bool_or": lambda xs: any(xs),
    "bool2int": int,
    "bool_and": lambda a, b: a and b,
    "bool_or": lambda a, b: a or b,
    "bool_xor": lambda a, b: a != b,
    "bool_clause_reif": lambda pos, neg: any(pos) or not all(neg),
    "int_abs": abs,
    "int_max": max,
    "int_min": min,
    "int_plus": operator.add,
    "int_times": operator.mul,
    "float_abs": abs,
    "float_max": max,
    "float_min": min,
    "float_plus": operator.add,
    "float_times": operator.mul,
    "set_card": len,
    "set_diff": operator.sub,
    "set_intersect": operator.and_,
    "set_symdiff": operator.xor,
    "set_union": operator.or_,
    "count": lambda xs, y: sum(x == y for x in xs),
    "count_eq": lambda xs, y: sum(x == y for x in xs),
    "fzn_count_eq": lambda xs, y: sum(x == y for x in xs),
}


def _checked(function: Callable[..., Optional[Value]]) -> Callable[..., Value]:
    def wrapped(*args: Any) -> Value:
        result = function(*args)
        if result is None:
            raise Undefined()
        return result

    return wrapped


def _element_value(index: int, array: Sequence[Value]) -> Optional[Value]:
    return array[index - 1] if 1 <= index <= len(array) else None


_LAST_ARGUMENT_FUNCTIONS.update(
    {
        "int_div": _checked(lambda a, b: trunc_div(a, b) if b != 0 else None),
        "int_mod": _checked(lambda a, b: trunc_mod(a, b) if b != 0 else None),
        "int_pow": _checked(lambda a, b: a ** b if b >= 0 else None),
        "float_div": _checked(
            lambda a, b: Fraction(a) / Fraction(b) if b != 0 else None
        ),
    }
)
for _prefix in ("array", "array_var"):
    for _base in ("bool", "int", "float", "set"):
        _element_name = f"{_prefix}_{_base}_element"
        _LAST_ARGUMENT_FUNCTIONS[_element_name] = _checked(_element_value)


def _as_bool(check: Callable[..., Any]) -> Callable[..., bool]:
    return lambda *args: bool(check(*args))


for _name in SIGNATURES:
    if _name.endswith("_reif") and _name not in _LAST_ARGUMENT_FUNCTIONS:
        _LAST_ARGUMENT_FUNCTIONS[_name] = _as_bool(CHECKS[_name[: -len("_reif")]])

_SYMMETRIC_EQUALITIES = ("bool_eq", "int_eq", "float_eq", "set_eq", "int2float")


def _identifiers(expr: Expr) -> Tuple[str, ...]:
    if isinstance(expr, Ident):
        return (expr.name,)
    if isinstance(expr, ArrayAccess):
        return (expr.name,)
    if isinstance(expr, ArrayLit):
        return tuple(name for item in expr.items for name in _identifiers(item))
    return ()


def constraint_identifiers(constraint: FznConstraint) -> Tuple[str, ...]:
    return tuple(name for arg in constraint.args for name in _identifiers(arg))


def _linear_solver(constraint: FznConstraint, target: str) -> Optional[Solver]:
    coefficients_expr, variables_expr, constant_expr = constraint.args
    if not isinstance(variables_expr, ArrayLit):
        return None
    positions = [
        i
        for i, item in enumerate(variables_expr.items)
        if isinstance(item, Ident) and item.name == target
    ]
    if len(positions) != 1:
        return None
    position = positions[0]
    is_int = constraint.name.startswith("int")

    def solve(scope: Scope) -> Value:
        coefficients = scope.value(coefficients_expr)
        assert isinstance(coefficients, tuple)
        coefficient = coefficients[position]
        if coefficient == 0:
            raise Undefined()
        rest = sum(
            (
                c * scope.value(item)  # type: ignore[operator]
                for i, (c, item) in enumerate(zip(coefficients, variables_expr.items))
                if i != position
            ),
            0,
        )
        remainder = scope.value(constant_expr) - rest  # type: ignore[operator]
        value = Fraction(remainder) / coefficient
        if is_int:
            if value.denominator != 1:
                raise Undefined()
            return value.numerator
        return value

    return solve


def functional_output(constraint: FznConstraint, target: str) -> Optional[Solver]:
    """Return a function computing ``target`` from the other arguments, if any.

    ``None`` when ``constraint`` does not determine ``target`` functionally. The
    returned solver raises :class:`Undefined` when no value satisfies the
    constraint (division by zero, an element index out of range, a non-integral
    linear solution).
    """
    args = constraint.args
    name = constraint.name
    if not args:
        return None
    if constraint_identifiers(constraint).count(target) != 1:
        return None

    if name in ("int_lin_eq", "float_lin_eq"):
        return _linear_solver(constraint, target)

    if name in _SYMMETRIC_EQUALITIES or name == "bool_not":
        negate = name == "bool_not"
        if args[0] == Ident(target):
            source = args[1]
        elif args[1] == Ident(target):
            source = args[0]
        else:
            return None

        def solve_equality(scope: Scope) -> Value:
            value = scope.value(source)
            if negate:
                return not value
            if name == "int2float" and source is args[1]:
                if Fraction(value).denominator != 1:  # type: ignore[arg-type]
                    raise Undefined()
                return int(value)  # type: ignore[arg-type]
            if name == "int2float":
                return Fraction(value)  # type: ignore[arg-type]
            return value

        return solve_equality

    if name in (
        "array_int_maximum",
        "array_int_minimum",
        "maximum_int",
        "minimum_int",
        "array_float_maximum",
        "array_float_minimum",
    ):
        if args[0] != Ident(target):
            return None
        pick = max if "maximum" in name else min

        def solve_extremum(scope: Scope) -> Value:
            values = scope.value(args[1])
            if not values:
                raise Undefined()
            return pick(values)  # type: ignore[type-var,arg-type,return-value]

        return solve_extremum

    function = _LAST_ARGUMENT_FUNCTIONS.get(name)
    if function is None or args[-1] != Ident(target):
        return None
    if name == "bool_xor" and len(args) != 3:
        return None
    inputs = args[:-1]

    def solve(scope: Scope) -> Value:
        return function(*(scope.value(arg) for arg in inputs))

    return solve
