"""FlatZinc frontend: model, parser, validator, printer and builtin semantics."""

from zinc_bridge.flatzinc.inline import inline_arrays
from zinc_bridge.flatzinc.model import (
    UNSAT_MARKER,
    Annotation,
    ArrayAccess,
    ArrayLit,
    BaseType,
    BoolLit,
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
from zinc_bridge.flatzinc.parser import parse_fzn
from zinc_bridge.flatzinc.printer import print_fzn

__all__ = [
    "UNSAT_MARKER",
    "Annotation",
    "ArrayAccess",
    "ArrayLit",
    "BaseType",
    "BoolLit",
    "FloatLit",
    "FznConstraint",
    "FznModel",
    "FznParam",
    "FznSolveGoal",
    "FznType",
    "FznVarDecl",
    "GoalKind",
    "Ident",
    "IntervalDomain",
    "IntLit",
    "RangeLit",
    "SetDomain",
    "SetLit",
    "StringLit",
    "inline_arrays",
    "parse_fzn",
    "print_fzn",
]
