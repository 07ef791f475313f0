from typing import Dict, Iterator, List, Optional, Tuple

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction

from zinc_bridge.smtlib.sorts import Sort
from zinc_bridge.smtlib.terms import Term, TermManager

DEFAULT_SOFT_GROUP = "I"


class Direction(str, enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class Combination(str, enum.Enum):
    """Script-level objective combination, spelled as the ``:opt.priority`` value."""

    INDEPENDENT = "box"
    LEXICOGRAPHIC = "lex"


@dataclass(frozen=True)
class Objective:
    direction: Direction
    term: Term
    combination: Combination = Combination.INDEPENDENT
    id: Optional[str] = None
    lower: Optional[Term] = None
    upper: Optional[Term] = None
    signed: bool = False

    @property
    def is_minimize(self) -> bool:
        return self.direction == Direction.MINIMIZE


@dataclass(frozen=True)
class SoftAssertion:
    term: Term
    weight: Fraction
    group: str = DEFAULT_SOFT_GROUP


@dataclass(frozen=True)
class SmtScript:
    """An ordered optimization-extended SMT-LIB script over one :class:`TermManager`.

    ``cost_symbols`` maps soft-group ids that are used as terms to the symbol
    standing for the group's violated weight.
    """

    manager: TermManager
    declarations: Dict[str, Sort] = field(default_factory=dict)
    assertions: Tuple[Term, ...] = ()
    soft_assertions: Tuple[SoftAssertion, ...] = ()
    objectives: Tuple[Objective, ...] = ()
    logic: Optional[str] = None
    combination: Combination = Combination.INDEPENDENT
    cost_symbols: Dict[str, Term] = field(default_factory=dict)
    inert_commands: Tuple[str, ...] = ()

    def symbol(self, name: str) -> Term:
        return self.manager.var(name, self.declarations[name])

    def soft_groups(self) -> Dict[str, List[SoftAssertion]]:
        groups: Dict[str, List[SoftAssertion]] = {}
        for soft in self.soft_assertions:
            groups.setdefault(soft.group, []).append(soft)
        return groups

    def roots(self) -> Iterator[Term]:
        """Assertions, soft assertions and objective terms, in script order."""
        yield from self.assertions
        for soft in self.soft_assertions:
            yield soft.term
        for objective in self.objectives:
            yield objective.term

    def with_combination(self, combination: Combination) -> "SmtScript":
        return replace(
            self,
            combination=combination,
            objectives=tuple(
                replace(o, combination=combination) for o in self.objectives
            ),
        )
