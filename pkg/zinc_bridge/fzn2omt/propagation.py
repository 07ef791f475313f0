"""Constant and alias propagation over a FlatZinc model.

Variables equated to each other collapse into one representative (the first
declared), variables with a single possible value are replaced by literals,
and constraints whose arguments are all fixed are decided and dropped.
"""

from typing import Dict, Iterator, List, Mapping, Optional

import dataclasses
import logging
from fractions import Fraction

from zinc_bridge.flatzinc.inline import inline_arrays
from zinc_bridge.flatzinc.model import (
    ArrayLit,
    BaseType,
    BoolLit,
    Domain,
    Expr,
    FloatLit,
    FznConstraint,
    FznModel,
    FznVarDecl,
    Ident,
    IntervalDomain,
    IntLit,
    LITERAL_TYPES,
    SetDomain,
    SetLit,
    UNSAT_MARKER,
)
from zinc_bridge.flatzinc.semantics import (
    NotEvaluable,
    Scope,
    Undefined,
    Value,
    check_constraint,
    constraint_identifiers,
    functional_output,
)
from zinc_bridge.flatzinc.validate import validate_model

logger = logging.getLogger(__name__)

_ALIASING = ("bool_eq", "int_eq", "float_eq", "set_eq")


class _Unsat(Exception):
    pass


def literal(value: Value, base: BaseType) -> Expr:
    """The FlatZinc literal of ``value`` for a variable of type ``base``."""
    if base == BaseType.BOOL:
        return BoolLit(bool(value))
    if base == BaseType.INT:
        return IntLit(int(value))  # type: ignore[arg-type]
    if base == BaseType.FLOAT:
        return FloatLit(Fraction(value))  # type: ignore[arg-type]
    return SetLit(tuple(sorted(value)))  # type: ignore[arg-type]


def _intersect(a: Optional[Domain], b: Optional[Domain]) -> Optional[Domain]:
    if a is None:
        return b
    if b is None:
        return a
    if isinstance(a, IntervalDomain) and isinstance(b, IntervalDomain):
        lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
        if lo > hi:
            raise _Unsat()
        return IntervalDomain(lo, hi)
    if isinstance(a, IntervalDomain):
        a, b = b, a
    elements = tuple(e for e in a.values() if b.contains(e))
    if not elements:
        raise _Unsat()
    return SetDomain(elements)


def _fits(value: Value, var: FznVarDecl, domain: Optional[Domain]) -> bool:
    base = var.type.base
    if base == BaseType.INT and not isinstance(value, int):
        if Fraction(value).denominator != 1:  # type: ignore[arg-type]
            return False
    if domain is None:
        return True
    if base == BaseType.SET:
        return all(domain.contains(e) for e in value)  # type: ignore[union-attr]
    return domain.contains(value)


class _Constants(Mapping):
    """Scope assignment view: a variable's value is its class constant."""

    def __init__(self, propagator: "_Propagator") -> None:
        self.propagator = propagator

    def __getitem__(self, name: str) -> Value:
        return self.propagator.constant[self.propagator.find(name)]

    def __contains__(self, name: object) -> bool:
        p = self.propagator
        return isinstance(name, str) and name in p.parent and p.find(name) in p.constant

    def __iter__(self) -> Iterator[str]:
        return (name for name in self.propagator.parent if name in self)

    def __len__(self) -> int:
        return sum(1 for _ in self)


class _Propagator:
    def __init__(self, model: FznModel) -> None:
        self.model = model
        self.order = {var.name: i for i, var in enumerate(model.vars)}
        self.parent: Dict[str, str] = {
            var.name: var.name for var in model.vars if not var.type.is_array
        }
        self.domain: Dict[str, Optional[Domain]] = {
            var.name: var.domain for var in model.vars if not var.type.is_array
        }
        self.constant: Dict[str, Value] = {}
        self.scope = Scope(model, _Constants(self))

    def find(self, name: str) -> str:
        root = name
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[name] != root:
            self.parent[name], name = root, self.parent[name]
        return root

    def fix(self, name: str, value: Value) -> bool:
        root = self.find(name)
        var = self.model.var(root)
        if not _fits(value, var, self.domain[root]):
            raise _Unsat()
        if var.type.base == BaseType.INT:
            value = int(value)  # type: ignore[arg-type]
        elif var.type.base == BaseType.FLOAT:
            value = Fraction(value)  # type: ignore[arg-type]
        if root in self.constant:
            if self.constant[root] != value:
                raise _Unsat()
            return False
        self.constant[root] = value
        return True

    def union(self, a: str, b: str) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.order[rb] < self.order[ra]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.domain[ra] = _intersect(self.domain[ra], self.domain[rb])
        if rb in self.constant:
            self.fix(ra, self.constant.pop(rb))
        elif ra in self.constant:
            self.fix(ra, self.constant[ra])
        return True

    def is_scalar_var(self, name: str) -> bool:
        return name in self.parent

    def resolve(self, expr: Expr) -> Expr:
        if isinstance(expr, Ident) and self.is_scalar_var(expr.name):
            root = self.find(expr.name)
            if root in self.constant:
                return literal(self.constant[root], self.model.var(root).type.base)
            return Ident(root)
        if isinstance(expr, ArrayLit):
            return ArrayLit(tuple(self.resolve(item) for item in expr.items))
        return expr

    def resolved(self, constraint: FznConstraint) -> FznConstraint:
        return dataclasses.replace(
            constraint, args=tuple(self.resolve(arg) for arg in constraint.args)
        )

    def seed(self) -> None:
        for var in self.model.vars:
            if var.type.is_array:
                continue
            if isinstance(var.value, Ident) and self.is_scalar_var(var.value.name):
                self.union(var.name, var.value.name)
            elif isinstance(var.value, LITERAL_TYPES + (Ident,)):
                self.fix(var.name, self.scope.value(var.value))
            domain = var.domain
            fixed = domain is not None and domain.lo == domain.hi
            if var.type.base != BaseType.SET and fixed:
                self.fix(var.name, domain.lo)

    def step(self, constraint: FznConstraint) -> bool:
        c = self.resolved(constraint)
        if c.name in _ALIASING and all(isinstance(arg, Ident) for arg in c.args):
            a, b = c.args
            return self.union(a.name, b.name)  # type: ignore[union-attr]
        unknown = [
            name for name in constraint_identifiers(c) if self.is_scalar_var(name)
        ]
        if len(unknown) != 1:
            return False
        target = unknown[0]
        if c.name == "bool_clause":
            return self.unit_clause(c, target)
        solver = functional_output(c, target)
        if solver is None:
            return False
        try:
            value = solver(self.scope)
        except Undefined:
            raise _Unsat() from None
        return self.fix(target, value)

    def unit_clause(self, clause: FznConstraint, target: str) -> bool:
        positive, negative = clause.args
        assert isinstance(positive, ArrayLit) and isinstance(negative, ArrayLit)
        fixed = [
            item
            for item in positive.items + negative.items
            if isinstance(item, BoolLit)
        ]
        satisfied = any(
            item.value for item in positive.items if isinstance(item, BoolLit)
        ) or any(not item.value for item in negative.items if isinstance(item, BoolLit))
        if satisfied or len(fixed) + 1 != len(positive.items) + len(negative.items):
            return False
        return self.fix(target, Ident(target) in positive.items)

    def run(self) -> None:
        self.seed()
        changed = True
        while changed:
            changed = False
            for constraint in self.model.constraints:
                changed |= self.step(constraint)

    def remaining_constraints(self) -> List[FznConstraint]:
        kept: List[FznConstraint] = []
        for constraint in self.model.constraints:
            c = self.resolved(constraint)
            if c.name in _ALIASING and c.args[0] == c.args[1]:
                continue
            if not any(self.is_scalar_var(name) for name in constraint_identifiers(c)):
                try:
                    holds = check_constraint(c, self.scope)
                except NotEvaluable:
                    holds = None
                if holds is False:
                    raise _Unsat()
                if holds:
                    continue
            kept.append(self.rewrite_annotations(c))
        return kept

    def survives(self, name: str) -> bool:
        return self.find(name) == name and name not in self.constant

    def rewrite_annotations(self, constraint: FznConstraint) -> FznConstraint:
        annotations = tuple(
            a
            for a in constraint.annotations
            if not (
                a.name == "defines_var"
                and a.args
                and isinstance(a.args[0], Ident)
                and self.is_scalar_var(a.args[0].name)
                and not self.survives(a.args[0].name)
            )
        )
        return dataclasses.replace(constraint, annotations=annotations)

    def remaining_vars(self) -> List[FznVarDecl]:
        variables = []
        for var in self.model.vars:
            if var.type.is_array:
                assert var.value is not None
                resolved = self.resolve(var.value)
                variables.append(dataclasses.replace(var, value=resolved))
            elif self.survives(var.name):
                variables.append(
                    dataclasses.replace(
                        var, domain=self.domain[var.name], value=None, defined_by=None
                    )
                )
        return variables


def _unsat_model(model: FznModel) -> FznModel:
    return dataclasses.replace(model, constraints=(UNSAT_MARKER,))


def propagate_constants_and_aliases(model: FznModel) -> FznModel:
    """Collapse aliases, substitute fixed variables and drop decided constraints.

    The result is equisatisfiable with ``model`` and has at most as many
    variables. A constraint that evaluates to false makes the result the
    single unsatisfiable marker constraint.
    """
    model = inline_arrays(model)
    propagator = _Propagator(model)
    try:
        propagator.run()
        constraints = propagator.remaining_constraints()
    except _Unsat:
        logger.info("Propagation proved the model unsatisfiable")
        return _unsat_model(model)
    goals = tuple(
        goal
        if goal.objective is None
        else dataclasses.replace(goal, objective=propagator.resolve(goal.objective))
        for goal in model.solve_items
    )
    result = dataclasses.replace(
        model,
        vars=tuple(propagator.remaining_vars()),
        constraints=tuple(constraints),
        solve_items=goals,
    )
    logger.debug(
        "Propagation kept %d of %d variables and %d of %d constraints",
        len(result.vars),
        len(model.vars),
        len(result.constraints),
        len(model.constraints),
    )
    return validate_model(result, allow_multi_objective=True)

