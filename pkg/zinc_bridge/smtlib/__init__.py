"""SMT-LIB v2 frontend with the optimization extensions.

Covers ``minimize``, ``maximize`` and ``assert-soft`` on top of the core language.
"""

from zinc_bridge.smtlib.dag import count_fathers, father_counts, structure
from zinc_bridge.smtlib.parser import parse_smt2
from zinc_bridge.smtlib.printer import DIALECTS, print_smt2
from zinc_bridge.smtlib.script import (
    Combination,
    Direction,
    Objective,
    SmtScript,
    SoftAssertion,
)
from zinc_bridge.smtlib.sorts import BOOL, INT, REAL, Sort, SortKind, bitvec
from zinc_bridge.smtlib.terms import Term, TermManager, iter_dag

__all__ = [
    "BOOL",
    "DIALECTS",
    "INT",
    "REAL",
    "Combination",
    "Direction",
    "Objective",
    "SmtScript",
    "SoftAssertion",
    "Sort",
    "SortKind",
    "Term",
    "TermManager",
    "bitvec",
    "count_fathers",
    "father_counts",
    "iter_dag",
    "parse_smt2",
    "print_smt2",
    "structure",
]
