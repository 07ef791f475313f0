from typing import Dict, Iterator, Optional, Tuple, Union

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from zinc_bridge.rational import Number


class BaseType(str, enum.Enum):
    BOOL = "bool"
    INT = "int"
    FLOAT = "float"
    SET = "set of int"


@dataclass(frozen=True)
class FznType:
    base: BaseType
    is_var: bool
    array_length: Optional[int] = None

    @property
    def is_array(self) -> bool:
        return self.array_length is not None

    def element(self) -> "FznType":
        return FznType(self.base, self.is_var)


@dataclass(frozen=True)
class IntervalDomain:
    lo: Number
    hi: Number

    def contains(self, value: object) -> bool:
        return self.lo <= value <= self.hi  # type: ignore[operator]

    def values(self) -> Iterator[int]:
        return iter(range(int(self.lo), int(self.hi) + 1))

    @property
    def size(self) -> int:
        return int(self.hi) - int(self.lo) + 1


@dataclass(frozen=True)
class SetDomain:
    elements: Tuple[int, ...]

    def contains(self, value: object) -> bool:
        return value in self.elements

    def values(self) -> Iterator[int]:
        return iter(self.elements)

    @property
    def lo(self) -> int:
        return self.elements[0]

    @property
    def hi(self) -> int:
        return self.elements[-1]

    @property
    def size(self) -> int:
        return len(self.elements)


Domain = Union[IntervalDomain, SetDomain]


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class FloatLit:
    value: Fraction


@dataclass(frozen=True)
class SetLit:
    elements: Tuple[int, ...]


@dataclass(frozen=True)
class RangeLit:
    lo: int
    hi: int


@dataclass(frozen=True)
class StringLit:
    text: str


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class ArrayAccess:
    name: str
    index: int


@dataclass(frozen=True)
class ArrayLit:
    items: Tuple["Expr", ...]


@dataclass(frozen=True)
class Annotation:
    name: str
    args: Tuple[object, ...] = ()


Literal = Union[BoolLit, IntLit, FloatLit, SetLit, RangeLit]
Expr = Union[
    BoolLit, IntLit, FloatLit, SetLit, RangeLit, StringLit, Ident, ArrayAccess, ArrayLit
]
LITERAL_TYPES = (BoolLit, IntLit, FloatLit, SetLit, RangeLit)


def set_elements(expr: Union[SetLit, RangeLit]) -> Tuple[int, ...]:
    if isinstance(expr, RangeLit):
        return tuple(range(expr.lo, expr.hi + 1))
    return expr.elements


@dataclass(frozen=True)
class FznParam:
    name: str
    type: FznType
    value: Expr


@dataclass(frozen=True)
class FznVarDecl:
    name: str
    type: FznType
    domain: Optional[Domain] = None
    value: Optional[Expr] = None
    annotations: Tuple[Annotation, ...] = ()
    defined_by: Optional[str] = None

    def has_annotation(self, name: str) -> bool:
        return any(annotation.name == name for annotation in self.annotations)


@dataclass(frozen=True)
class FznConstraint:
    name: str
    args: Tuple[Expr, ...]
    annotations: Tuple[Annotation, ...] = ()

    def defined_variables(self) -> Tuple[str, ...]:
        names = []
        for annotation in self.annotations:
            if annotation.name == "defines_var" and annotation.args:
                target = annotation.args[0]
                if isinstance(target, Ident):
                    names.append(target.name)
        return tuple(names)


class GoalKind(str, enum.Enum):
    SATISFY = "satisfy"
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


@dataclass(frozen=True)
class FznSolveGoal:
    kind: GoalKind
    objective: Optional[Expr] = None
    annotations: Tuple[Annotation, ...] = ()


Declaration = Union[FznParam, FznVarDecl]


@dataclass(frozen=True)
class FznModel:
    params: Tuple[FznParam, ...] = ()
    vars: Tuple[FznVarDecl, ...] = ()
    constraints: Tuple[FznConstraint, ...] = ()
    solve_items: Tuple[FznSolveGoal, ...] = (FznSolveGoal(GoalKind.SATISFY),)
    output_annotations: Tuple[str, ...] = ()
    predicates: Tuple[str, ...] = field(default=())

    @cached_property
    def declarations(self) -> Dict[str, Declaration]:
        table: Dict[str, Declaration] = {param.name: param for param in self.params}
        table.update((var.name, var) for var in self.vars)
        return table

    def declaration(self, name: str) -> Declaration:
        return self.declarations[name]

    def param(self, name: str) -> FznParam:
        declaration = self.declarations[name]
        assert isinstance(declaration, FznParam)
        return declaration

    def var(self, name: str) -> FznVarDecl:
        declaration = self.declarations[name]
        assert isinstance(declaration, FznVarDecl)
        return declaration

    def is_var(self, name: str) -> bool:
        return isinstance(self.declarations.get(name), FznVarDecl)

    @property
    def is_optimization(self) -> bool:
        return any(goal.kind != GoalKind.SATISFY for goal in self.solve_items)

    @property
    def is_trivially_unsat(self) -> bool:
        return UNSAT_MARKER in self.constraints


# The empty clause, FlatZinc's canonical `false` constraint.
UNSAT_MARKER = FznConstraint("bool_clause", (ArrayLit(()), ArrayLit(())))
