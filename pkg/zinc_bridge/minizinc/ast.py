"""AST of the MiniZinc subset emitted by ``omt2mzn``.

Expressions are immutable dataclasses. Items are variable declarations (scalar
or array, optionally defined by an expression), constraints, one solve item,
includes and verbatim items (predicate/function definitions the subset carries
through without interpreting them).
"""

from typing import Iterator, Optional, Tuple, Union

import enum
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class MznBool:
    value: bool


@dataclass(frozen=True)
class MznInt:
    value: int


@dataclass(frozen=True)
class MznFloat:
    value: Fraction


@dataclass(frozen=True)
class MznIdent:
    name: str


@dataclass(frozen=True)
class MznUnary:
    op: str
    operand: "MznExpr"


@dataclass(frozen=True)
class MznBinary:
    op: str
    left: "MznExpr"
    right: "MznExpr"


@dataclass(frozen=True)
class MznIf:
    condition: "MznExpr"
    then: "MznExpr"
    otherwise: "MznExpr"


@dataclass(frozen=True)
class MznCall:
    name: str
    args: Tuple["MznExpr", ...]


@dataclass(frozen=True)
class MznArray:
    items: Tuple["MznExpr", ...]


MznExpr = Union[
    MznBool,
    MznInt,
    MznFloat,
    MznIdent,
    MznUnary,
    MznBinary,
    MznIf,
    MznCall,
    MznArray,
]

BOOLEAN_OPS = ("<->", "->", "<-", "\\/", "xor", "/\\")
COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")
ARITHMETIC_OPS = ("+", "-", "*", "/", "div", "mod")


def children(expr: MznExpr) -> Tuple[MznExpr, ...]:
    if isinstance(expr, MznUnary):
        return (expr.operand,)
    if isinstance(expr, MznBinary):
        return (expr.left, expr.right)
    if isinstance(expr, MznIf):
        return (expr.condition, expr.then, expr.otherwise)
    if isinstance(expr, MznCall):
        return expr.args
    if isinstance(expr, MznArray):
        return expr.items
    return ()


def walk(expr: MznExpr) -> Iterator[MznExpr]:
    """Every node of ``expr`` as a tree (shared subtrees are visited once per use)."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def node_count(expr: MznExpr) -> int:
    return sum(1 for _ in walk(expr))


class MznBaseType(str, enum.Enum):
    BOOL = "bool"
    INT = "int"
    FLOAT = "float"


@dataclass(frozen=True)
class MznVarDecl:
    name: str
    base: MznBaseType
    lo: Optional[MznExpr] = None
    hi: Optional[MznExpr] = None
    value: Optional[MznExpr] = None
    array_length: Optional[int] = None

    @property
    def is_array(self) -> bool:
        return self.array_length is not None


@dataclass(frozen=True)
class MznConstraint:
    expr: MznExpr


class MznSolveKind(str, enum.Enum):
    SATISFY = "satisfy"
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"
    SEARCH = "search"


@dataclass(frozen=True)
class MznSolve:
    kind: MznSolveKind
    expr: Optional[MznExpr] = None


@dataclass(frozen=True)
class MznInclude:
    file: str


@dataclass(frozen=True)
class MznVerbatim:
    """An item kept as source text (``predicate``/``function``/``output``)."""

    text: str


MznItem = Union[MznInclude, MznVerbatim, MznVarDecl, MznConstraint, MznSolve]


@dataclass(frozen=True)
class MznModel:
    items: Tuple[MznItem, ...]

    @property
    def solve(self) -> MznSolve:
        for item in self.items:
            if isinstance(item, MznSolve):
                return item
        return MznSolve(MznSolveKind.SATISFY)

    @property
    def declarations(self) -> Tuple[MznVarDecl, ...]:
        return tuple(item for item in self.items if isinstance(item, MznVarDecl))

    @property
    def constraints(self) -> Tuple[MznConstraint, ...]:
        return tuple(item for item in self.items if isinstance(item, MznConstraint))


def conjunction(parts: Tuple[MznExpr, ...]) -> MznExpr:
    if not parts:
        return MznBool(True)
    result = parts[0]
    for part in parts[1:]:
        result = MznBinary("/\\", result, part)
    return result


def disjunction(parts: Tuple[MznExpr, ...]) -> MznExpr:
    if not parts:
        return MznBool(False)
    result = parts[0]
    for part in parts[1:]:
        result = MznBinary("\\/", result, part)
    return result
