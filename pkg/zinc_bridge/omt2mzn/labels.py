"""Shared-subterm labeling.

The assertions of a script form one conjunction. A root ``and`` whose fathers
are all part of that conjunction is flattened into its conjuncts, in every mode.
A compound node then counts one father per place it is emitted: a parent slot,
a top-level conjunct, or an objective and its bounds. Nodes with at least two
fathers get a fresh label; everything else is inlined at its single use site.
``all`` labels every compound node except those emitted once at the top level,
and ``none`` labels nothing. Both are comparison baselines.
"""

from typing import Dict, Iterable, List, Set, Tuple

import enum
import logging
from collections import Counter
from dataclasses import dataclass

from zinc_bridge.smtlib.dag import count_fathers
from zinc_bridge.smtlib.script import SmtScript
from zinc_bridge.smtlib.terms import Term, iter_dag

logger = logging.getLogger(__name__)

LABEL_PREFIX = "zb_n"


class LabelMode(str, enum.Enum):
    TWO_FATHERS = "two-fathers"
    ALL = "all"
    NONE = "none"


@dataclass(frozen=True)
class LabelPlan:
    """Label name per node id, labeled nodes children-first, top-level conjuncts."""

    labels: Dict[int, str]
    order: Tuple[Term, ...]
    conjuncts: Tuple[Term, ...] = ()

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, term: object) -> bool:
        return isinstance(term, Term) and term.id in self.labels

    def label(self, term: Term) -> str:
        return self.labels[term.id]


def label_name(term: Term) -> str:
    return f"{LABEL_PREFIX}{term.id}"


def _flatten(assertions: Tuple[Term, ...], flattened: Set[int]) -> List[Term]:
    conjuncts: List[Term] = []
    stack = list(reversed(assertions))
    while stack:
        term = stack.pop()
        if term.id in flattened:
            stack.extend(reversed(term.args))
        else:
            conjuncts.append(term)
    return conjuncts


def plan_labels(
    assertions: Iterable[Term],
    emitted: Iterable[Term] = (),
    mode: LabelMode = LabelMode.TWO_FATHERS,
) -> LabelPlan:
    """Plan labels for ``assertions`` plus the standalone ``emitted`` terms.

    ``emitted`` lists every other place a root is printed, once per occurrence.
    """
    assertions, emitted = tuple(assertions), tuple(emitted)
    nodes = list(iter_dag(assertions + emitted))
    fathers = count_fathers(assertions + emitted)
    top = Counter(term.id for term in assertions)
    standalone = Counter(term.id for term in emitted)
    absorbed: Dict[int, int] = Counter()
    flattened: Set[int] = set()
    for term in reversed(nodes):
        if (
            term.op == "and"
            and top[term.id]
            and not standalone[term.id]
            and absorbed[term.id] == fathers[term.id]
        ):
            flattened.add(term.id)
            for arg in term.args:
                top[arg.id] += top[term.id]
                absorbed[arg.id] += 1

    order = []
    if mode != LabelMode.NONE:
        for term in nodes:
            if term.is_leaf or term.id in flattened:
                continue
            inner = fathers[term.id] - absorbed[term.id]
            uses = inner + top[term.id] + standalone[term.id]
            if uses >= 2 or (mode == LabelMode.ALL and inner >= 1):
                order.append(term)
    return LabelPlan(
        {term.id: label_name(term) for term in order},
        tuple(order),
        tuple(_flatten(assertions, flattened)),
    )


def emitted_roots(script: SmtScript) -> List[Term]:
    """Soft assertions, objectives and objective bounds, once per printed copy."""
    terms = [soft.term for soft in script.soft_assertions]
    for objective in script.objectives:
        terms.append(objective.term)
        for bound in (objective.lower, objective.upper):
            if bound is not None:
                terms.extend((objective.term, bound))
    return terms


def daggify(script: SmtScript, mode: LabelMode = LabelMode.TWO_FATHERS) -> LabelPlan:
    """Label the compound nodes of ``script`` that have at least two fathers.

    Leaves are never labeled: a variable or constant is as short as its label.
    """
    plan = plan_labels(script.assertions, emitted_roots(script), mode)
    logger.debug("Labeled %d shared nodes (%s)", len(plan), LabelMode(mode).value)
    return plan
