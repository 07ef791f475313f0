"""Decompositions of the supported global constraints."""

from typing import Callable, Dict, List

from itertools import combinations

from zinc_bridge.errors import UnsupportedConstraintError
from zinc_bridge.flatzinc.model import FznConstraint
from zinc_bridge.fzn2omt.context import EncodingContext
from zinc_bridge.smtlib.terms import Term

Decomposition = Callable[[FznConstraint, EncodingContext], List[Term]]


def _element(constraint: FznConstraint, context: EncodingContext) -> List[Term]:
    index_expr, array_expr, value_expr = constraint.args
    index = context.term(index_expr)
    items = context.items(array_expr)
    if constraint.name.endswith("set_element"):
        target = context.set_members(value_expr)
        equal = [
            _set_equal(context, context.set_members(item), target) for item in items
        ]
    else:
        value = context.term(value_expr)
        equal = [context.eq(value, context.term(item)) for item in items]
    if not items:
        return [context.manager.bool_const(False)]
    choices = [
        context.all_of([context.eq(index, context.int_term(position)), same])
        for position, same in enumerate(equal, start=1)
    ]
    return [
        context.any_of(choices),
        context.le(context.int_term(1), index),
        context.le(index, context.int_term(len(items))),
    ]


def _set_equal(
    context: EncodingContext, a: Dict[int, Term], b: Dict[int, Term]
) -> Term:
    elements = sorted(set(a) | set(b))
    return context.all_of(
        [context.eq(context.member(a, e), context.member(b, e)) for e in elements]
    )


def _extremum(constraint: FznConstraint, context: EncodingContext) -> List[Term]:
    target = context.term(constraint.args[0])
    values = context.terms(constraint.args[1])
    if not values:
        return [context.manager.bool_const(False)]
    if "maximum" in constraint.name:
        bounds = [context.le(value, target) for value in values]
    else:
        bounds = [context.le(target, value) for value in values]
    return bounds + [context.any_of([context.eq(target, value) for value in values])]


def _all_different(constraint: FznConstraint, context: EncodingContext) -> List[Term]:
    values = context.terms(constraint.args[0])
    return [context.manager.app("distinct", [a, b]) for a, b in combinations(values, 2)]


def _count(constraint: FznConstraint, context: EncodingContext) -> List[Term]:
    array_expr, value_expr, count_expr = constraint.args
    value = context.term(value_expr)
    pairs = [
        (1, context.indicator(context.eq(item, value)))
        for item in context.terms(array_expr)
    ]
    pairs.append((-1, context.term(count_expr)))
    return [context.linear(pairs, "=", 0)]


def _table(constraint: FznConstraint, context: EncodingContext) -> List[Term]:
    values = context.terms(constraint.args[0])
    table = context.terms(constraint.args[1])
    if not values:
        return []
    width = len(values)
    rows = [table[start : start + width] for start in range(0, len(table), width)]
    matches = [
        context.all_of([context.eq(v, cell) for v, cell in zip(values, row)])
        for row in rows
    ]
    return [context.any_of(matches)]


GLOBALS: Dict[str, Decomposition] = {}
for _prefix in ("array", "array_var"):
    for _base in ("bool", "int", "float", "set"):
        GLOBALS[f"{_prefix}_{_base}_element"] = _element
for _name in (
    "array_int_maximum",
    "array_int_minimum",
    "maximum_int",
    "minimum_int",
    "array_float_maximum",
    "array_float_minimum",
):
    GLOBALS[_name] = _extremum
for _name in ("all_different_int", "fzn_all_different_int"):
    GLOBALS[_name] = _all_different
for _name in ("count", "count_eq", "fzn_count_eq"):
    GLOBALS[_name] = _count
for _name in ("table_int", "fzn_table_int", "table_bool", "fzn_table_bool"):
    GLOBALS[_name] = _table


def is_global(name: str) -> bool:
    return name in GLOBALS


def encode_global(constraint: FznConstraint, context: EncodingContext) -> List[Term]:
    """Decompose a global constraint into assertions over ``context``'s terms.

    ``all_different_int`` becomes pairwise disequalities, element constraints a
    disjunction over the index plus index bounds, ``maximum``/``minimum`` upper
    (lower) bounds plus a disjunction of equalities, ``count`` a sum of
    indicators, and tables a disjunction of rows.

    Raises:
        UnsupportedConstraintError: for a name outside :data:`GLOBALS`.
    """
    decomposition = GLOBALS.get(constraint.name)
    if decomposition is None:
        raise UnsupportedConstraintError(
            constraint.name, "no decomposition for this global"
        )
    return decomposition(constraint, context)
