"""Flattening of the emitted MiniZinc subset to FlatZinc.

Linear arithmetic becomes ``*_lin_*`` constraints; every non-linear or
conditional subterm gets an auxiliary variable whose defining constraint
carries ``defines_var``. Conditionals select between their branches through
``array_var_*_element`` with a 1..2 index. A ``zb_lex_search`` combinator
becomes one solve item per objective, in priority order.
"""

from typing import Dict, List, Optional, Tuple

import logging
from fractions import Fraction

from zinc_bridge.errors import ValidationError
from zinc_bridge.flatzinc.model import (
    UNSAT_MARKER,
    Annotation,
    ArrayLit,
    BaseType,
    BoolLit,
    Expr,
    FloatLit,
    FznConstraint,
    FznModel,
    FznSolveGoal,
    FznType,
    FznVarDecl,
    GoalKind,
    Ident,
    IntervalDomain,
    IntLit,
)
from zinc_bridge.flatzinc.validate import validate_model
from zinc_bridge.minizinc.ast import (
    COMPARISON_OPS,
    MznArray,
    MznBaseType,
    MznBinary,
    MznBool,
    MznCall,
    MznExpr,
    MznFloat,
    MznIdent,
    MznIf,
    MznInt,
    MznModel,
    MznSolve,
    MznSolveKind,
    MznUnary,
    MznVarDecl,
)
from zinc_bridge.minizinc.evaluate import evaluate

logger = logging.getLogger(__name__)

LEX_SEARCH = "zb_lex_search"
AUX_PREFIX = "zb_f"

Linear = Tuple[Dict[str, Fraction], Fraction]

_BASES = {
    MznBaseType.BOOL: BaseType.BOOL,
    MznBaseType.INT: BaseType.INT,
    MznBaseType.FLOAT: BaseType.FLOAT,
}
_LOGICAL_OPS = frozenset({"<->", "->", "<-", "\\/", "/\\", "xor"})
_AUX_ANNOTATIONS = (Annotation("var_is_introduced"), Annotation("is_defined_var"))


def _merge(a: MznBaseType, b: MznBaseType) -> MznBaseType:
    return MznBaseType.FLOAT if MznBaseType.FLOAT in (a, b) else a


class _Flattener:
    def __init__(self, model: MznModel) -> None:
        self.model = model
        self.types: Dict[str, MznBaseType] = {}
        self.arrays: Dict[str, Tuple[MznExpr, ...]] = {}
        self.vars: List[FznVarDecl] = []
        self.constraints: List[FznConstraint] = []
        self.counter = 0

    # types

    def type_of(self, expr: MznExpr) -> MznBaseType:
        if isinstance(expr, MznBool):
            return MznBaseType.BOOL
        if isinstance(expr, MznInt):
            return MznBaseType.INT
        if isinstance(expr, MznFloat):
            return MznBaseType.FLOAT
        if isinstance(expr, MznIdent):
            return self.types[expr.name]
        if isinstance(expr, MznUnary):
            return MznBaseType.BOOL if expr.op == "not" else self.type_of(expr.operand)
        if isinstance(expr, MznBinary):
            if expr.op in COMPARISON_OPS or expr.op in _LOGICAL_OPS:
                return MznBaseType.BOOL
            if expr.op == "/":
                return MznBaseType.FLOAT
            if expr.op in ("div", "mod"):
                return MznBaseType.INT
            return _merge(self.type_of(expr.left), self.type_of(expr.right))
        if isinstance(expr, MznIf):
            return _merge(self.type_of(expr.then), self.type_of(expr.otherwise))
        if isinstance(expr, MznCall):
            if expr.name == "int2float":
                return MznBaseType.FLOAT
            if expr.name == "bool2int":
                return MznBaseType.INT
            result = self.type_of(expr.args[0])
            for arg in expr.args[1:]:
                result = _merge(result, self.type_of(arg))
            return result
        raise ValidationError(f"unsupported expression {expr!r}")

    # variables

    def fresh(
        self, base: MznBaseType, domain: Optional[IntervalDomain] = None
    ) -> Ident:
        while True:
            self.counter += 1
            name = f"{AUX_PREFIX}{self.counter}"
            if name not in self.types:
                break
        self.types[name] = base
        self.vars.append(
            FznVarDecl(
                name,
                FznType(_BASES[base], True),
                domain,
                annotations=_AUX_ANNOTATIONS,
            )
        )
        return Ident(name)

    def post(
        self, name: str, args: Tuple[Expr, ...], defines: Optional[Ident] = None
    ) -> None:
        annotations: Tuple[Annotation, ...] = ()
        if defines is not None:
            annotations = (Annotation("defines_var", (defines,)),)
        self.constraints.append(FznConstraint(name, args, annotations))

    # arithmetic

    def linear(self, expr: MznExpr) -> Linear:
        if isinstance(expr, (MznInt, MznFloat)):
            return {}, Fraction(expr.value)
        if isinstance(expr, MznIdent):
            return {expr.name: Fraction(1)}, Fraction(0)
        if isinstance(expr, MznUnary) and expr.op == "-":
            return _scale(self.linear(expr.operand), Fraction(-1))
        if isinstance(expr, MznBinary) and expr.op in ("+", "-"):
            sign = Fraction(1 if expr.op == "+" else -1)
            return _add(self.linear(expr.left), _scale(self.linear(expr.right), sign))
        if isinstance(expr, MznBinary) and expr.op == "*":
            left, right = self.linear(expr.left), self.linear(expr.right)
            if not left[0]:
                return _scale(right, left[1])
            if not right[0]:
                return _scale(left, right[1])
        if isinstance(expr, MznBinary) and expr.op == "/":
            right = self.linear(expr.right)
            if not right[0] and right[1] != 0:
                return _scale(self.linear(expr.left), 1 / right[1])
        return {self.auxiliary(expr).name: Fraction(1)}, Fraction(0)

    def auxiliary(self, expr: MznExpr) -> Ident:
        """A fresh variable defined as the value of a non-linear ``expr``."""
        base = self.type_of(expr)
        prefix = "float" if base == MznBaseType.FLOAT else "int"
        if isinstance(expr, MznBinary):
            left, right = self.value(expr.left), self.value(expr.right)
            if expr.op == "*":
                name = f"{prefix}_times"
            elif expr.op == "/":
                name = "float_div"
            elif expr.op in ("div", "mod"):
                name = f"int_{expr.op}"
            else:
                raise ValidationError(f"unsupported arithmetic operator '{expr.op}'")
            target = self.fresh(base)
            self.post(name, (left, right, target), target)
            return target
        if isinstance(expr, MznIf):
            return self.select(expr, base)
        if isinstance(expr, MznCall):
            return self.call(expr, base)
        raise ValidationError(f"unsupported arithmetic expression {expr!r}")

    def call(self, expr: MznCall, base: MznBaseType) -> Ident:
        prefix = "float" if base == MznBaseType.FLOAT else "int"
        if expr.name == "int2float":
            source = self.value(expr.args[0])
            target = self.fresh(MznBaseType.FLOAT)
            self.post("int2float", (source, target), target)
            return target
        if expr.name == "bool2int":
            source = self.boolean(expr.args[0])
            target = self.fresh(MznBaseType.INT, IntervalDomain(0, 1))
            self.post("bool2int", (source, target), target)
            return target
        if expr.name == "abs":
            source = self.value(expr.args[0])
            target = self.fresh(base)
            self.post(f"{prefix}_abs", (source, target), target)
            return target
        if expr.name in ("min", "max") and len(expr.args) == 2:
            a, b = (self.value(arg) for arg in expr.args)
            target = self.fresh(base)
            self.post(f"{prefix}_{expr.name}", (a, b, target), target)
            return target
        raise ValidationError(f"unsupported function '{expr.name}'")

    def selector(self, condition: MznExpr) -> Ident:
        """Index 2 when ``condition`` holds, else 1."""
        flag = self.call(MznCall("bool2int", (condition,)), MznBaseType.INT)
        index = self.fresh(MznBaseType.INT, IntervalDomain(1, 2))
        self.post(
            "int_lin_eq",
            (ArrayLit((IntLit(1), IntLit(-1))), ArrayLit((index, flag)), IntLit(1)),
            index,
        )
        return index

    def select(self, expr: MznIf, base: MznBaseType) -> Ident:
        index = self.selector(expr.condition)
        if base == MznBaseType.BOOL:
            branches = (self.boolean(expr.otherwise), self.boolean(expr.then))
        else:
            branches = (self.value(expr.otherwise), self.value(expr.then))
        target = self.fresh(base)
        args = (index, ArrayLit(branches), target)
        self.post(f"array_var_{base.value}_element", args, target)
        return target

    def value(self, expr: MznExpr) -> Expr:
        """A literal or variable holding the value of a numeric ``expr``."""
        base = self.type_of(expr)
        if base == MznBaseType.BOOL:
            return self.boolean(expr)
        coefficients, constant = self.linear(expr)
        if not coefficients:
            return _number(constant, base)
        if len(coefficients) == 1 and constant == 0:
            (name, coefficient), = coefficients.items()
            if coefficient == 1:
                return Ident(name)
        target = self.fresh(base)
        self.define_linear((coefficients, constant), target, base)
        return target

    def define_linear(self, linear: Linear, target: Ident, base: MznBaseType) -> None:
        coefficients, constant = linear
        coefficients = dict(coefficients)
        coefficients[target.name] = coefficients.get(target.name, Fraction(0)) - 1
        name = "float_lin_eq" if base == MznBaseType.FLOAT else "int_lin_eq"
        self.post(name, self.linear_args(coefficients, -constant, base), target)

    def linear_args(
        self, coefficients: Dict[str, Fraction], constant: Fraction, base: MznBaseType
    ) -> Tuple[Expr, ...]:
        return (
            ArrayLit(tuple(_number(c, base) for c in coefficients.values())),
            ArrayLit(tuple(Ident(name) for name in coefficients)),
            _number(constant, base),
        )

    # Booleans

    def boolean(self, expr: MznExpr) -> Expr:
        """A literal or variable holding the truth value of ``expr``."""
        if isinstance(expr, MznBool):
            return BoolLit(expr.value)
        if isinstance(expr, MznIdent):
            return Ident(expr.name)
        target = self.fresh(MznBaseType.BOOL)
        self.reify(expr, target)
        return target

    def comparison(
        self, expr: MznBinary
    ) -> Tuple[str, Tuple[Expr, ...], Optional[bool]]:
        """Builtin name and arguments of a numeric comparison, or its constant truth."""
        base = _merge(self.type_of(expr.left), self.type_of(expr.right))
        coefficients, constant = _add(
            self.linear(expr.left), _scale(self.linear(expr.right), Fraction(-1))
        )
        coefficients = {name: c for name, c in coefficients.items() if c != 0}
        op = expr.op
        if not coefficients:
            truth = evaluate(MznBinary(op, MznFloat(constant), MznInt(0)), {})
            return "", (), bool(truth)
        bound = -constant
        if op in (">", ">="):
            coefficients = {name: -c for name, c in coefficients.items()}
            bound = -bound
            op = "<" if op == ">" else "<="
        prefix = "float" if base == MznBaseType.FLOAT else "int"
        if op == "<" and prefix == "int":
            op, bound = "<=", bound - 1
        suffix = {"=": "eq", "!=": "ne", "<=": "le", "<": "lt"}[op]
        args = self.linear_args(coefficients, bound, base)
        return f"{prefix}_lin_{suffix}", args, None

    def is_numeric_comparison(self, expr: MznExpr) -> bool:
        return (
            isinstance(expr, MznBinary)
            and expr.op in COMPARISON_OPS
            and self.type_of(expr.left) != MznBaseType.BOOL
        )

    def reify(self, expr: MznExpr, target: Ident) -> None:
        if isinstance(expr, (MznBool, MznIdent)):
            self.post("bool_eq", (self.boolean(expr), target), target)
            return
        if isinstance(expr, MznUnary) and expr.op == "not":
            self.post("bool_not", (self.boolean(expr.operand), target), target)
            return
        if isinstance(expr, MznIf):
            index = self.selector(expr.condition)
            branches = (self.boolean(expr.otherwise), self.boolean(expr.then))
            args = (index, ArrayLit(branches), target)
            self.post("array_var_bool_element", args, target)
            return
        if not isinstance(expr, MznBinary):
            raise ValidationError(f"unsupported Boolean expression {expr!r}")
        op = expr.op
        if op in ("/\\", "\\/"):
            parts = _operands(expr, op)
            name = "array_bool_and" if op == "/\\" else "array_bool_or"
            literals = ArrayLit(tuple(self.boolean(p) for p in parts))
            self.post(name, (literals, target), target)
            return
        if self.is_numeric_comparison(expr):
            name, args, constant = self.comparison(expr)
            if constant is not None:
                self.post("bool_eq", (BoolLit(constant), target), target)
            else:
                self.post(f"{name}_reif", args + (target,), target)
            return
        a, b = self.boolean(expr.left), self.boolean(expr.right)
        if op in ("<->", "="):
            self.post("bool_eq_reif", (a, b, target), target)
        elif op in ("xor", "!="):
            self.post("bool_xor", (a, b, target), target)
        elif op == "->":
            self.post("bool_le_reif", (a, b, target), target)
        elif op == "<-":
            self.post("bool_le_reif", (b, a, target), target)
        else:
            raise ValidationError(f"unsupported Boolean operator '{op}'")

    def constrain(self, expr: MznExpr) -> None:
        """Post ``expr`` as a top-level constraint."""
        if isinstance(expr, MznBool):
            if not expr.value:
                self.constraints.append(UNSAT_MARKER)
            return
        if isinstance(expr, MznBinary) and expr.op == "/\\":
            for part in _operands(expr, "/\\"):
                self.constrain(part)
            return
        if self.is_numeric_comparison(expr):
            assert isinstance(expr, MznBinary)
            name, args, constant = self.comparison(expr)
            if constant is None:
                self.post(name, args)
            elif not constant:
                self.constraints.append(UNSAT_MARKER)
            return
        positive: List[Expr] = []
        negative: List[Expr] = []
        parts = _operands(expr, "\\/") if isinstance(expr, MznBinary) else [expr]
        if isinstance(expr, MznBinary) and expr.op == "->":
            parts = [MznUnary("not", expr.left), expr.right]
        for part in parts:
            if isinstance(part, MznUnary) and part.op == "not":
                negative.append(self.boolean(part.operand))
            else:
                positive.append(self.boolean(part))
        clause = (ArrayLit(tuple(positive)), ArrayLit(tuple(negative)))
        self.post("bool_clause", clause)

    # items

    def declare(self, decl: MznVarDecl) -> None:
        self.types[decl.name] = decl.base
        if decl.is_array:
            assert isinstance(decl.value, MznArray)
            self.arrays[decl.name] = decl.value.items
            return
        domain = None
        if decl.lo is not None and decl.hi is not None:
            lo, hi = evaluate(decl.lo, {}), evaluate(decl.hi, {})
            if decl.base == MznBaseType.INT:
                domain = IntervalDomain(int(lo), int(hi))  # type: ignore[call-overload]
            else:
                domain = IntervalDomain(
                    Fraction(lo), Fraction(hi)  # type: ignore[arg-type]
                )
        var_type = FznType(_BASES[decl.base], True)
        self.vars.append(FznVarDecl(decl.name, var_type, domain))
        if decl.value is None:
            return
        target = Ident(decl.name)
        if decl.base == MznBaseType.BOOL:
            self.reify(decl.value, target)
        else:
            self.define_linear(self.linear(decl.value), target, decl.base)

    def goals(self, solve: MznSolve) -> Tuple[FznSolveGoal, ...]:
        if solve.kind == MznSolveKind.SATISFY:
            return (FznSolveGoal(GoalKind.SATISFY),)
        assert solve.expr is not None
        if solve.kind == MznSolveKind.SEARCH:
            return self.lex_goals(solve.expr)
        minimize = solve.kind == MznSolveKind.MINIMIZE
        kind = GoalKind.MINIMIZE if minimize else GoalKind.MAXIMIZE
        return (FznSolveGoal(kind, self.value(solve.expr)),)

    def lex_goals(self, search: MznExpr) -> Tuple[FznSolveGoal, ...]:
        if not (
            isinstance(search, MznCall)
            and search.name == LEX_SEARCH
            and len(search.args) == 2
        ):
            raise ValidationError(
                f"only the {LEX_SEARCH} search combinator is supported"
            )
        objectives_expr, senses_expr = search.args
        if isinstance(objectives_expr, MznIdent):
            objectives = self.arrays[objectives_expr.name]
        else:
            assert isinstance(objectives_expr, MznArray)
            objectives = objectives_expr.items
        assert isinstance(senses_expr, MznArray)
        goals = []
        for objective, sense in zip(objectives, senses_expr.items):
            minimize = evaluate(sense, {})
            kind = GoalKind.MINIMIZE if minimize else GoalKind.MAXIMIZE
            goals.append(FznSolveGoal(kind, self.value(objective)))
        return tuple(goals)

    def run(self) -> FznModel:
        for decl in self.model.declarations:
            self.declare(decl)
        for constraint in self.model.constraints:
            self.constrain(constraint.expr)
        goals = self.goals(self.model.solve)
        model = FznModel(
            vars=tuple(self.vars),
            constraints=tuple(self.constraints),
            solve_items=goals,
        )
        return validate_model(model, allow_multi_objective=len(goals) > 1)


def _operands(expr: MznExpr, op: str) -> List[MznExpr]:
    if isinstance(expr, MznBinary) and expr.op == op:
        return _operands(expr.left, op) + _operands(expr.right, op)
    return [expr]


def _scale(linear: Linear, factor: Fraction) -> Linear:
    coefficients, constant = linear
    return {name: c * factor for name, c in coefficients.items()}, constant * factor


def _add(a: Linear, b: Linear) -> Linear:
    coefficients = dict(a[0])
    for name, c in b[0].items():
        coefficients[name] = coefficients.get(name, Fraction(0)) + c
    return coefficients, a[1] + b[1]


def _number(value: Fraction, base: MznBaseType) -> Expr:
    if base == MznBaseType.FLOAT:
        return FloatLit(Fraction(value))
    if value.denominator != 1:
        raise ValidationError(
            f"non-integral coefficient {value} in an integer expression"
        )
    return IntLit(int(value))


def flatten(model: MznModel) -> FznModel:
    """Flatten a model of the emitted subset into a validated FlatZinc model."""
    flat = _Flattener(model).run()
    logger.debug(
        "Flattened MiniZinc model into %d variables and %d constraints",
        len(flat.vars),
        len(flat.constraints),
    )
    return flat
