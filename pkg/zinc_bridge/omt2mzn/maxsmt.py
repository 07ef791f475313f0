from typing import List

import logging
from dataclasses import replace

from zinc_bridge.smtlib.script import Direction, Objective, SmtScript, SoftAssertion
from zinc_bridge.smtlib.sorts import INT, REAL
from zinc_bridge.smtlib.terms import Term

logger = logging.getLogger(__name__)


def _cost(script: SmtScript, softs: List[SoftAssertion]) -> Term:
    manager = script.manager
    integral = all(soft.weight.denominator == 1 for soft in softs)
    sort = INT if integral else REAL
    zero = manager.const(0, sort)
    penalties = [
        manager.app("ite", [soft.term, zero, manager.const(soft.weight, sort)])
        for soft in softs
    ]
    if len(penalties) == 1:
        return penalties[0]
    return manager.app("+", penalties)


def maxsmt_to_pb(script: SmtScript) -> SmtScript:
    """Replace soft assertions by one minimized violation cost per soft group.

    The cost of a group is the sum of the weights of its violated soft
    assertions. A group id that is used as a term is declared and defined as
    that cost. Hard assertions and existing objectives are kept.
    """
    groups = script.soft_groups()
    if not groups:
        return script
    declarations = dict(script.declarations)
    assertions = list(script.assertions)
    objectives = list(script.objectives)
    explicit = {objective.term.id for objective in objectives}
    for group, softs in groups.items():
        cost = _cost(script, softs)
        symbol = script.cost_symbols.get(group)
        if symbol is not None:
            declarations[group] = symbol.sort
            assertions.append(script.manager.app("=", [symbol, cost]))
            cost = symbol
        if cost.id not in explicit:
            objectives.append(
                Objective(
                    Direction.MINIMIZE,
                    cost,
                    combination=script.combination,
                    id=group,
                )
            )
    logger.debug("Rewrote %d soft groups into minimized costs", len(groups))
    return replace(
        script,
        declarations=declarations,
        assertions=tuple(assertions),
        soft_assertions=(),
        objectives=tuple(objectives),
        cost_symbols={},
    )
