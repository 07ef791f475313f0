"""The MiniZinc subset emitted by :mod:`zinc_bridge.omt2mzn`."""

from zinc_bridge.minizinc.ast import (
    MznArray,
    MznBaseType,
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
    MznModel,
    MznSolve,
    MznSolveKind,
    MznUnary,
    MznVarDecl,
    MznVerbatim,
    node_count,
)
from zinc_bridge.minizinc.evaluate import Undefined, evaluate
from zinc_bridge.minizinc.flatten import flatten
from zinc_bridge.minizinc.parser import parse_mzn
from zinc_bridge.minizinc.printer import print_expr, print_mzn

__all__ = [
    "MznArray",
    "MznBaseType",
    "MznBinary",
    "MznBool",
    "MznCall",
    "MznConstraint",
    "MznExpr",
    "MznFloat",
    "MznIdent",
    "MznIf",
    "MznInclude",
    "MznInt",
    "MznModel",
    "MznSolve",
    "MznSolveKind",
    "MznUnary",
    "MznVarDecl",
    "MznVerbatim",
    "Undefined",
    "evaluate",
    "flatten",
    "node_count",
    "parse_mzn",
    "print_expr",
    "print_mzn",
]
