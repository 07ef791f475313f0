"""SMT-LIB emission with a small dialect table.

Dialects differ only in objective and trailer surface syntax. ``default`` keeps
the objective attributes and ends with ``(check-sat) (get-objectives)``. ``z3``
drops them, asserts ``:lower``/``:upper`` and turns a ``:signed`` bit-vector
objective into an unsigned one over the sign-flipped term. ``bclt`` behaves like
``z3`` but ends with ``(check-sat) (get-model)``.
"""

from typing import Dict, List, Tuple

import re
from dataclasses import dataclass
from fractions import Fraction

from zinc_bridge.rational import format_float
from zinc_bridge.smtlib.script import Combination, Objective, SmtScript, SoftAssertion
from zinc_bridge.smtlib.sorts import SortKind
from zinc_bridge.smtlib.terms import Term, TermManager

_SIMPLE_SYMBOL = re.compile(r"[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*")
_RESERVED = frozenset(
    {"let", "forall", "exists", "!", "_", "as", "par", "true", "false"}
)


@dataclass(frozen=True)
class Dialect:
    name: str
    objective_attributes: bool
    trailer: Tuple[str, ...]


DIALECTS: Dict[str, Dialect] = {
    "default": Dialect("default", True, ("(check-sat)", "(get-objectives)")),
    "z3": Dialect("z3", False, ("(check-sat)", "(get-objectives)")),
    "bclt": Dialect("bclt", False, ("(check-sat)", "(get-model)")),
}


def quote_symbol(name: str) -> str:
    if _SIMPLE_SYMBOL.fullmatch(name) and name not in _RESERVED:
        return name
    return f"|{name}|"


def format_const(term: Term) -> str:
    value = term.value
    kind = term.sort.kind
    if kind == SortKind.BOOL:
        return "true" if value else "false"
    if kind == SortKind.BITVEC:
        assert term.sort.width is not None
        return "#b" + format(value, f"0{term.sort.width}b")
    if kind == SortKind.INT:
        assert isinstance(value, int)
        return str(value) if value >= 0 else f"(- {-value})"
    assert isinstance(value, Fraction)
    magnitude = abs(value)
    if magnitude.denominator == 1:
        text = f"{magnitude.numerator}.0"
    else:
        text = f"(/ {magnitude.numerator} {magnitude.denominator})"
    return text if value >= 0 else f"(- {text})"


def format_weight(weight: Fraction) -> str:
    if weight.denominator == 1:
        return str(weight.numerator)
    decimal = format_float(weight, max_digits=25)
    return decimal or f"(/ {weight.numerator} {weight.denominator})"


class TermPrinter:
    """Prints terms as trees, caching the text of every node."""

    def __init__(self) -> None:
        self._cache: Dict[int, str] = {}

    def __call__(self, term: Term) -> str:
        cached = self._cache.get(term.id)
        if cached is not None:
            return cached
        if term.is_var:
            assert term.name is not None
            text = quote_symbol(term.name)
        elif term.is_const:
            text = format_const(term)
        else:
            op = term.op
            if term.indices:
                op = f"(_ {op} {' '.join(map(str, term.indices))})"
            text = f"({op} {' '.join(self(arg) for arg in term.args)})"
        self._cache[term.id] = text
        return text


def _sign_flip(manager: TermManager, term: Term) -> Term:
    width = term.sort.width
    assert width is not None
    return manager.app("bvxor", [term, manager.bv_const(2 ** (width - 1), width)])


def _bound_assertion(
    manager: TermManager, objective: Objective, bound: Term, lower: bool
) -> Term:
    term = objective.term
    if term.sort.is_bv:
        op = "bvsle" if objective.signed else "bvule"
    else:
        op = "<="
    pair = [bound, term] if lower else [term, bound]
    return manager.app(op, pair)


def _soft(printer: TermPrinter, soft: SoftAssertion) -> str:
    weight = format_weight(soft.weight)
    group = quote_symbol(soft.group)
    return f"(assert-soft {printer(soft.term)} :weight {weight} :id {group})"


def print_smt2(script: SmtScript, dialect: str = "default") -> str:
    """Emit ``script`` as optimization-extended SMT-LIB.

    Raises:
        KeyError: for an unknown dialect name.
    """
    table = DIALECTS[dialect]
    printer = TermPrinter()
    lines: List[str] = []
    if script.logic:
        lines.append(f"(set-logic {script.logic})")
    if script.combination == Combination.LEXICOGRAPHIC:
        lines.append("(set-option :opt.priority lex)")
    for name, sort in script.declarations.items():
        lines.append(f"(declare-fun {quote_symbol(name)} () {sort})")
    for assertion in script.assertions:
        lines.append(f"(assert {printer(assertion)})")
    for soft in script.soft_assertions:
        lines.append(_soft(printer, soft))

    for objective in script.objectives:
        command = objective.direction.value
        if table.objective_attributes:
            attributes = ""
            if objective.id is not None:
                attributes += f" :id {quote_symbol(objective.id)}"
            if objective.lower is not None:
                attributes += f" :lower {printer(objective.lower)}"
            if objective.upper is not None:
                attributes += f" :upper {printer(objective.upper)}"
            if objective.signed:
                attributes += " :signed"
            lines.append(f"({command} {printer(objective.term)}{attributes})")
            continue
        for bound, is_lower in ((objective.lower, True), (objective.upper, False)):
            if bound is not None:
                assertion = _bound_assertion(script.manager, objective, bound, is_lower)
                lines.append(f"(assert {printer(assertion)})")
        term = objective.term
        if objective.signed:
            term = _sign_flip(script.manager, term)
        lines.append(f"({command} {printer(term)})")

    lines.extend(table.trailer)
    return "\n".join(lines) + "\n"
