"""Exhaustive reference solver for FlatZinc models.

Variables that some constraint determines functionally are computed instead of
enumerated; everything else needs a finite domain, either declared or implied by
a unary bound constraint. All constraints are checked on every candidate.
"""

from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from zinc_bridge.flatzinc.inline import inline_arrays
from zinc_bridge.flatzinc.model import (
    ArrayLit,
    BaseType,
    Expr,
    FloatLit,
    FznConstraint,
    FznModel,
    FznVarDecl,
    GoalKind,
    Ident,
    IntervalDomain,
    IntLit,
    RangeLit,
    SetDomain,
    SetLit,
    set_elements,
)
from zinc_bridge.flatzinc.semantics import (
    CHECKS,
    NotEvaluable,
    Scope,
    Undefined,
    check_constraint,
    constraint_identifiers,
    functional_output,
)
from zinc_bridge.fzn2omt.config import ObjectiveMode
from zinc_bridge.oracle.search import (
    Definition,
    Inapplicable,
    Optimum,
    assignments,
    check_budget,
    order_definitions,
    subsets,
)
from zinc_bridge.oracle.verdict import OracleResult
from zinc_bridge.settings import Settings

logger = logging.getLogger(__name__)


@dataclass
class _Bounds:
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    elements: Optional[FrozenSet[int]] = None

    def upper(self, value: Fraction) -> None:
        self.hi = value if self.hi is None else min(self.hi, value)

    def lower(self, value: Fraction) -> None:
        self.lo = value if self.lo is None else max(self.lo, value)

    def restrict(self, elements: Sequence[int]) -> None:
        allowed = frozenset(elements)
        self.elements = allowed if self.elements is None else self.elements & allowed


def _number(expr: Expr) -> Optional[Fraction]:
    if isinstance(expr, (IntLit, FloatLit)):
        return Fraction(expr.value)
    return None


def _bound(bounds: _Bounds, relation: str, value: Fraction, integral: bool) -> None:
    """Record ``x <relation> value``."""
    if relation in ("<", "<="):
        if relation == "<" and integral:
            bounds.upper(Fraction(math.ceil(value) - 1))
        elif relation == "<=":
            bounds.upper(Fraction(math.floor(value)) if integral else value)
    elif relation in (">", ">="):
        if relation == ">" and integral:
            bounds.lower(Fraction(math.floor(value) + 1))
        elif relation == ">=":
            bounds.lower(Fraction(math.ceil(value)) if integral else value)
    else:
        bounds.upper(value)
        bounds.lower(value)


_FLIPPED = {"<": ">", "<=": ">=", "=": "="}
_COMPARISONS = {
    "int_le": "<=",
    "int_lt": "<",
    "int_eq": "=",
    "float_le": "<=",
    "float_lt": "<",
    "float_eq": "=",
}


def _unary_relation(constraint: FznConstraint) -> Optional[Tuple[str, str, Fraction]]:
    """``(name, relation, value)`` when ``constraint`` bounds a single variable."""
    name, args = constraint.name, constraint.args
    if name in _COMPARISONS:
        left, right = args
        relation = _COMPARISONS[name]
        if isinstance(left, Ident) and _number(right) is not None:
            return left.name, relation, _number(right)
        if isinstance(right, Ident) and _number(left) is not None:
            return right.name, _FLIPPED[relation], _number(left)
        return None
    if name in ("int_lin_le", "int_lin_eq", "float_lin_le", "float_lin_eq"):
        coefficients, variables, constant = args
        if not isinstance(coefficients, ArrayLit):
            return None
        if not isinstance(variables, ArrayLit):
            return None
        pairs = list(zip(coefficients.items, variables.items))
        idents = [(c, v) for c, v in pairs if isinstance(v, Ident)]
        rest = [(c, v) for c, v in pairs if not isinstance(v, Ident)]
        if len(idents) != 1 or _number(constant) is None:
            return None
        coefficient = _number(idents[0][0])
        if not coefficient:
            return None
        offset = Fraction(0)
        for c, v in rest:
            c_value, v_value = _number(c), _number(v)
            if c_value is None or v_value is None:
                return None
            offset += c_value * v_value
        value = (_number(constant) - offset) / coefficient  # type: ignore[operator]
        if name.endswith("_eq"):
            relation = "="
        else:
            relation = "<=" if coefficient > 0 else ">="
        return idents[0][1].name, relation, value
    return None


def harvest_bounds(model: FznModel) -> Dict[str, _Bounds]:
    """Bounds implied by unary constraints of an array-inlined ``model``."""
    table: Dict[str, _Bounds] = {}
    for constraint in model.constraints:
        if constraint.name == "set_in":
            var, values = constraint.args
            if isinstance(var, Ident) and isinstance(values, (SetLit, RangeLit)):
                table.setdefault(var.name, _Bounds()).restrict(set_elements(values))
            continue
        found = _unary_relation(constraint)
        if found is None:
            continue
        name, relation, value = found
        declaration = model.declarations.get(name)
        if not isinstance(declaration, FznVarDecl):
            continue
        integral = declaration.type.base == BaseType.INT
        _bound(table.setdefault(name, _Bounds()), relation, value, integral)
    return table


def _int_values(var: FznVarDecl, bounds: _Bounds) -> List[int]:
    lo, hi = bounds.lo, bounds.hi
    if var.domain is not None:
        lo = Fraction(var.domain.lo) if lo is None else max(lo, Fraction(var.domain.lo))
        hi = Fraction(var.domain.hi) if hi is None else min(hi, Fraction(var.domain.hi))
    if bounds.elements is not None:
        candidates: Sequence[int] = sorted(bounds.elements)
    elif lo is None or hi is None:
        raise Inapplicable(f"variable {var.name} has an unbounded domain")
    else:
        candidates = range(math.ceil(lo), math.floor(hi) + 1)
    return [
        value
        for value in candidates
        if (lo is None or lo <= value)
        and (hi is None or value <= hi)
        and (var.domain is None or var.domain.contains(value))
    ]


def _float_values(var: FznVarDecl, bounds: _Bounds) -> List[Fraction]:
    lo, hi = bounds.lo, bounds.hi
    if isinstance(var.domain, IntervalDomain):
        lo = Fraction(var.domain.lo) if lo is None else max(lo, Fraction(var.domain.lo))
        hi = Fraction(var.domain.hi) if hi is None else min(hi, Fraction(var.domain.hi))
    if lo is not None and hi is not None:
        if lo > hi:
            return []
        if lo == hi:
            return [lo]
    raise Inapplicable(f"float variable {var.name} is neither fixed nor defined")


def finite_domain(var: FznVarDecl, bounds: Optional[_Bounds] = None) -> List[Any]:
    """Every value the oracle tries for ``var``.

    Raises:
        Inapplicable: when the domain is infinite (or a float interval).
    """
    bounds = bounds or _Bounds()
    base = var.type.base
    if base == BaseType.BOOL:
        return [False, True]
    if base == BaseType.INT:
        return _int_values(var, bounds)
    if base == BaseType.FLOAT:
        return _float_values(var, bounds)
    if var.domain is None:
        raise Inapplicable(f"set variable {var.name} has no universe")
    return subsets(list(var.domain.values()))


def _in_domain(var: FznVarDecl, value: Any) -> bool:
    if var.domain is None:
        return True
    if var.type.base == BaseType.SET:
        return value <= frozenset(var.domain.values())
    if isinstance(var.domain, SetDomain):
        return var.domain.contains(value)
    return var.domain.lo <= value <= var.domain.hi


def _free_inputs(
    model: FznModel, names: Sequence[str], free: Mapping[str, FznVarDecl]
) -> List[str]:
    """Free variables behind ``names``, looking through alias variables."""
    found: List[str] = []
    for name in names:
        declaration = model.declarations.get(name)
        while isinstance(declaration, FznVarDecl):
            if not isinstance(declaration.value, Ident):
                break
            name = declaration.value.name
            declaration = model.declarations.get(name)
        if name in free and name not in found:
            found.append(name)
    return found


def _definitions(model: FznModel, free: Mapping[str, FznVarDecl]) -> List[Definition]:
    annotated: List[Definition] = []
    fallback: List[Definition] = []
    for constraint in model.constraints:
        identifiers = _free_inputs(model, constraint_identifiers(constraint), free)
        declared = constraint.defined_variables()
        for target in identifiers:
            solver = functional_output(constraint, target)
            if solver is None:
                continue
            definition = Definition(
                target,
                frozenset(identifiers) - {target},
                lambda assignment, solver=solver: solver(Scope(model, assignment)),
            )
            (annotated if target in declared else fallback).append(definition)
    return annotated + fallback


class _Search:
    def __init__(self, model: FznModel, budget: int, mode: ObjectiveMode) -> None:
        self.model = inline_arrays(model)
        self.budget = budget
        self.mode = mode
        self.free = {
            var.name: var
            for var in self.model.vars
            if not var.type.is_array and var.value is None
        }
        self.bounds = harvest_bounds(self.model)

    def _enumerable(self, name: str) -> bool:
        try:
            finite_domain(self.free[name], self.bounds.get(name))
        except Inapplicable:
            return False
        return True

    def run(self) -> OracleResult:
        for constraint in self.model.constraints:
            if constraint.name not in CHECKS:
                raise Inapplicable(f"no exact semantics for {constraint.name}")
        definitions = _definitions(self.model, self.free)
        defined = {definition.target for definition in definitions}
        known = [name for name in self.free if name not in defined]
        search, ordered = order_definitions(known, definitions, self._enumerable)
        domains = [
            finite_domain(self.free[name], self.bounds.get(name)) for name in search
        ]
        check_budget(domains, self.budget)
        logger.debug("Searching %s, computing %s", search, [d.target for d in ordered])

        goals = [
            goal for goal in self.model.solve_items if goal.kind != GoalKind.SATISFY
        ]
        optimum = Optimum([goal.kind == GoalKind.MINIMIZE for goal in goals], self.mode)
        for assignment in assignments(search, domains):
            if not self._complete(assignment, ordered):
                continue
            scope = Scope(self.model, assignment)
            if not all(check_constraint(c, scope) for c in self.model.constraints):
                continue
            values = [
                scope.value(goal.objective)  # type: ignore[arg-type]
                for goal in goals
            ]
            optimum.offer(values, assignment)  # type: ignore[arg-type]
            if optimum.done:
                break
        return optimum.result()

    def _complete(
        self, assignment: Dict[str, Any], ordered: Sequence[Definition]
    ) -> bool:
        for definition in ordered:
            try:
                value = definition.compute(assignment)
            except Undefined:
                return False
            if not _in_domain(self.free[definition.target], value):
                return False
            assignment[definition.target] = value
        return True


def solve_fzn(
    model: FznModel,
    budget: Optional[int] = None,
    objective_mode: ObjectiveMode = ObjectiveMode.INDEPENDENT,
) -> OracleResult:
    """Decide ``model`` exactly by enumeration.

    Returns the exact optimum of every solve goal (each on its own, or as a
    lexicographic vector), ``unsat``, or ``inapplicable`` with a reason when the
    search space is infinite, exceeds ``budget`` or mentions a builtin without
    exact semantics.
    """
    if budget is None:
        budget = Settings().oracle_budget
    if model.is_trivially_unsat:
        return OracleResult.unsat()
    try:
        return _Search(model, budget, objective_mode).run()
    except Inapplicable as error:
        logger.info("FlatZinc oracle inapplicable: %s", error.reason)
        return OracleResult.inapplicable(error.reason)
    except NotEvaluable as error:
        return OracleResult.inapplicable(f"no exact semantics for {error}")
