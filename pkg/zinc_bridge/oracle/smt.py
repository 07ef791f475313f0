"""Exhaustive reference solver for optimization-extended SMT-LIB scripts.

Top-level equalities ``(= x t)`` define ``x`` from ``t``; Bool and bit-vector
variables are enumerated over their full range, Int variables over bounds
implied by top-level comparisons. Real variables must be defined. Division by
zero evaluates to 0 for ``/``, ``div`` and ``mod``; bit-vector operations are
exact modular arithmetic with the SMT-LIB conventions for division by zero.
"""

from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Iterator,
    List,
    Mapping,
    Optional,
    Set,
    Tuple,
)

import logging
import math
from fractions import Fraction

from zinc_bridge.fzn2omt.config import ObjectiveMode
from zinc_bridge.omt2mzn.maxsmt import maxsmt_to_pb
from zinc_bridge.oracle.search import (
    Definition,
    Inapplicable,
    Optimum,
    assignments,
    check_budget,
    order_definitions,
)
from zinc_bridge.oracle.verdict import Number, OracleResult
from zinc_bridge.rational import euclid_div, euclid_mod, trunc_div, trunc_mod
from zinc_bridge.settings import Settings
from zinc_bridge.smtlib.script import Combination, Objective, SmtScript
from zinc_bridge.smtlib.sorts import SortKind
from zinc_bridge.smtlib.terms import Term, iter_dag

logger = logging.getLogger(__name__)

Value = Any


def to_signed(value: int, width: int) -> int:
    """Two's complement reading of an unsigned ``width``-bit value.

    >>> to_signed(6, 3)
    -2
    """
    return value - (1 << width) if value >> (width - 1) else value


def _mask(width: int) -> int:
    return (1 << width) - 1


def _bv_division(op: str, a: int, b: int, width: int) -> int:
    if op == "bvudiv":
        return _mask(width) if b == 0 else a // b
    if op == "bvurem":
        return a if b == 0 else a % b
    sa, sb = to_signed(a, width), to_signed(b, width)
    if op == "bvsdiv":
        if b == 0:
            return _mask(width) if sa >= 0 else 1
        return trunc_div(sa, sb) & _mask(width)
    if b == 0:
        return a
    if op == "bvsrem":
        return trunc_mod(sa, sb) & _mask(width)
    # bvsmod takes the sign of the divisor
    return (sa % sb) & _mask(width)


def _bv_shift(op: str, a: int, b: int, width: int) -> int:
    if op == "bvshl":
        return (a << b) & _mask(width) if b < width else 0
    if op == "bvlshr":
        return a >> b if b < width else 0
    return (to_signed(a, width) >> min(b, width)) & _mask(width)


def _rotate_left(a: int, k: int, width: int) -> int:
    k %= width
    return ((a << k) | (a >> (width - k))) & _mask(width)


_BV_BINARY: Dict[str, Callable[[int, int, int], int]] = {
    "bvadd": lambda a, b, w: (a + b) & _mask(w),
    "bvsub": lambda a, b, w: (a - b) & _mask(w),
    "bvmul": lambda a, b, w: (a * b) & _mask(w),
    "bvand": lambda a, b, w: a & b,
    "bvor": lambda a, b, w: a | b,
    "bvxor": lambda a, b, w: a ^ b,
    "bvnand": lambda a, b, w: ~(a & b) & _mask(w),
    "bvnor": lambda a, b, w: ~(a | b) & _mask(w),
    "bvxnor": lambda a, b, w: ~(a ^ b) & _mask(w),
}

_BV_COMPARISONS: Dict[str, Tuple[bool, Callable[[int, int], bool]]] = {
    "bvult": (False, lambda a, b: a < b),
    "bvule": (False, lambda a, b: a <= b),
    "bvugt": (False, lambda a, b: a > b),
    "bvuge": (False, lambda a, b: a >= b),
    "bvslt": (True, lambda a, b: a < b),
    "bvsle": (True, lambda a, b: a <= b),
    "bvsgt": (True, lambda a, b: a > b),
    "bvsge": (True, lambda a, b: a >= b),
}

_COMPARISONS: Dict[str, Callable[[Any, Any], bool]] = {
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


def _bitvector(term: Term, args: List[Value]) -> Value:
    op = term.op
    width = term.args[0].sort.width
    assert width is not None
    if op in _BV_COMPARISONS:
        signed, compare = _BV_COMPARISONS[op]
        a, b = args
        if signed:
            a, b = to_signed(a, width), to_signed(b, width)
        return compare(a, b)
    if op in _BV_BINARY:
        result = args[0]
        for arg in args[1:]:
            result = _BV_BINARY[op](result, arg, width)
        return result
    if op in ("bvudiv", "bvurem", "bvsdiv", "bvsrem", "bvsmod"):
        return _bv_division(op, args[0], args[1], width)
    if op in ("bvshl", "bvlshr", "bvashr"):
        return _bv_shift(op, args[0], args[1], width)
    if op == "bvneg":
        return -args[0] & _mask(width)
    if op == "bvnot":
        return ~args[0] & _mask(width)
    if op == "concat":
        low_width = term.args[1].sort.width
        assert low_width is not None
        return (args[0] << low_width) | args[1]
    if op == "bvcomp":
        return int(args[0] == args[1])
    if op == "extract":
        high, low = term.indices
        return (args[0] >> low) & _mask(high - low + 1)
    if op == "zero_extend":
        return args[0]
    if op == "sign_extend":
        return to_signed(args[0], width) & _mask(width + term.indices[0])
    if op == "rotate_left":
        return _rotate_left(args[0], term.indices[0], width)
    if op == "rotate_right":
        return _rotate_left(args[0], width - term.indices[0] % width, width)
    raise Inapplicable(f"no exact semantics for {op}")


def _arithmetic(op: str, args: List[Value]) -> Value:
    if op == "+":
        return sum(args[1:], args[0])
    if op == "-":
        if len(args) == 1:
            return -args[0]
        result = args[0]
        for arg in args[1:]:
            result -= arg
        return result
    if op == "*":
        result = args[0]
        for arg in args[1:]:
            result *= arg
        return result
    if op == "/":
        a, b = args
        return Fraction(0) if b == 0 else Fraction(a) / b
    if op == "div":
        return 0 if args[1] == 0 else euclid_div(args[0], args[1])
    if op == "mod":
        return 0 if args[1] == 0 else euclid_mod(args[0], args[1])
    if op == "abs":
        return abs(args[0])
    assert op == "to_real"
    return Fraction(args[0])


def apply(term: Term, args: List[Value]) -> Value:
    """Value of the operator node ``term`` over its argument values."""
    op = term.op
    if op == "not":
        return not args[0]
    if op == "and":
        return all(args)
    if op == "or":
        return any(args)
    if op == "xor":
        return args[0] != args[1]
    if op == "=>":
        return not args[0] or args[1]
    if op == "ite":
        return args[1] if args[0] else args[2]
    if op == "=":
        return all(a == b for a, b in zip(args, args[1:]))
    if op == "distinct":
        return len(set(args)) == len(args)
    if op in _COMPARISONS:
        return _COMPARISONS[op](args[0], args[1])
    if term.args[0].sort.is_bv:
        return _bitvector(term, args)
    return _arithmetic(op, args)


def evaluate(nodes: List[Term], assignment: Mapping[str, Value]) -> Dict[int, Value]:
    """Values of ``nodes`` under ``assignment``, keyed by term id.

    ``nodes`` lists children before their parents.
    """
    values: Dict[int, Value] = {}
    for node in nodes:
        if node.is_var:
            values[node.id] = assignment[node.name]  # type: ignore[index]
        elif node.is_const:
            values[node.id] = node.value
        else:
            values[node.id] = apply(node, [values[arg.id] for arg in node.args])
    return values


def evaluate_term(term: Term, assignment: Mapping[str, Value]) -> Value:
    return evaluate(list(iter_dag([term])), assignment)[term.id]


def _conjuncts(terms: Tuple[Term, ...]) -> Iterator[Term]:
    for term in terms:
        if term.op == "and":
            yield from _conjuncts(term.args)
        else:
            yield term


def _free_vars(term: Term) -> FrozenSet[str]:
    return frozenset(node.name for node in iter_dag([term]) if node.is_var)


def _definition(target: Term, source: Term) -> Optional[Definition]:
    if not target.is_var or target.name in _free_vars(source):
        return None
    nodes = list(iter_dag([source]))
    assert target.name is not None
    return Definition(
        target.name,
        _free_vars(source),
        lambda assignment: evaluate(nodes, assignment)[source.id],
    )


def _strip_to_real(term: Term) -> Term:
    return term.args[0] if term.op == "to_real" else term


_FLIPPED = {
    "<=": ">=",
    "<": ">",
    ">=": "<=",
    ">": "<",
    "bvule": "bvuge",
    "bvult": "bvugt",
    "bvuge": "bvule",
    "bvugt": "bvult",
}


class _Bounds:
    def __init__(self) -> None:
        self.lo: Dict[str, Number] = {}
        self.hi: Dict[str, Number] = {}

    def add(self, name: str, relation: str, value: Number) -> None:
        if relation in ("<", "bvult"):
            self.add(name, "<=", value - 1 if isinstance(value, int) else value)
        elif relation in (">", "bvugt"):
            self.add(name, ">=", value + 1 if isinstance(value, int) else value)
        elif relation in ("<=", "bvule"):
            self.hi[name] = min(self.hi.get(name, value), value)
        elif relation in (">=", "bvuge"):
            self.lo[name] = max(self.lo.get(name, value), value)

    def harvest(self, conjunct: Term) -> None:
        if conjunct.op not in _FLIPPED or len(conjunct.args) != 2:
            return
        left, right = (_strip_to_real(arg) for arg in conjunct.args)
        if left.is_var and right.is_const:
            self.add(left.name, conjunct.op, right.value)  # type: ignore[arg-type]
        elif right.is_var and left.is_const:
            flipped = _FLIPPED[conjunct.op]
            self.add(right.name, flipped, left.value)  # type: ignore[arg-type]


_UNUSED: Dict[SortKind, Value] = {
    SortKind.BOOL: False,
    SortKind.INT: 0,
    SortKind.REAL: Fraction(0),
    SortKind.BITVEC: 0,
}

class _Search:
    def __init__(self, script: SmtScript, budget: int, mode: ObjectiveMode) -> None:
        self.script = maxsmt_to_pb(script)
        self.budget = budget
        self.mode = mode
        self.bounds = _Bounds()
        self.used: Set[str] = set()

    def _domain(self, name: str) -> List[Value]:
        sort = self.script.declarations[name]
        lo, hi = self.bounds.lo.get(name), self.bounds.hi.get(name)
        if name not in self.used:
            return [_UNUSED[sort.kind]]
        if sort.kind == SortKind.BOOL:
            return [False, True]
        if sort.kind == SortKind.BITVEC:
            assert sort.width is not None
            low = 0 if lo is None else max(0, int(lo))
            high = _mask(sort.width) if hi is None else min(_mask(sort.width), int(hi))
            return list(range(low, high + 1))
        if sort.kind == SortKind.INT:
            if lo is None or hi is None:
                raise Inapplicable(f"Int variable {name} is unbounded")
            return list(range(math.ceil(lo), math.floor(hi) + 1))
        if lo is not None and lo == hi:
            return [Fraction(lo)]
        raise Inapplicable(f"Real variable {name} is neither fixed nor defined")

    def _enumerable(self, name: str) -> bool:
        try:
            self._domain(name)
        except Inapplicable:
            return False
        return True

    def _objective_value(
        self, objective: Objective, values: Dict[int, Value]
    ) -> Optional[Number]:
        value = values[objective.term.id]
        width = objective.term.sort.width
        if objective.signed and width is not None:
            value = to_signed(value, width)
        for bound, is_lower in ((objective.lower, True), (objective.upper, False)):
            if bound is None:
                continue
            limit = values[bound.id]
            if objective.signed and width is not None:
                limit = to_signed(limit, width)
            if (value < limit) if is_lower else (value > limit):
                return None
        return value

    def run(self) -> OracleResult:
        script = self.script
        roots = list(script.assertions)
        for objective in script.objectives:
            roots.append(objective.term)
            roots.extend(bound for bound in (objective.lower, objective.upper) if bound)
        nodes = list(iter_dag(roots))
        self.used = {node.name for node in nodes if node.is_var}

        candidates: List[Definition] = []
        for conjunct in _conjuncts(script.assertions):
            self.bounds.harvest(conjunct)
            if conjunct.op == "=" and len(conjunct.args) == 2:
                left, right = conjunct.args
                for target, source in ((left, right), (right, left)):
                    definition = _definition(target, source)
                    if definition is not None:
                        candidates.append(definition)
        defined = {definition.target for definition in candidates}
        known = [name for name in script.declarations if name not in defined]
        search, ordered = order_definitions(known, candidates, self._enumerable)
        domains = [self._domain(name) for name in search]
        check_budget(domains, self.budget)

        optimum = Optimum([o.is_minimize for o in script.objectives], self.mode)
        for assignment in assignments(search, domains):
            for definition in ordered:
                assignment[definition.target] = definition.compute(assignment)
            values = evaluate(nodes, assignment)
            if not all(values[assertion.id] for assertion in script.assertions):
                continue
            objectives = [self._objective_value(o, values) for o in script.objectives]
            optimum.offer(objectives, assignment)
            if optimum.done:
                break
        return optimum.result()


def solve_smt(
    script: SmtScript,
    budget: Optional[int] = None,
    objective_mode: Optional[ObjectiveMode] = None,
) -> OracleResult:
    """Decide ``script`` exactly by enumeration.

    Soft assertions count as a minimized violation cost per group. Objectives
    combine as the script's ``:opt.priority`` says unless ``objective_mode``
    overrides it.
    """
    if budget is None:
        budget = Settings().oracle_budget
    if objective_mode is None:
        lexicographic = script.combination == Combination.LEXICOGRAPHIC
        objective_mode = (
            ObjectiveMode.LEXICOGRAPHIC if lexicographic else ObjectiveMode.INDEPENDENT
        )
    try:
        return _Search(script, budget, objective_mode).run()
    except Inapplicable as error:
        logger.info("SMT-LIB oracle inapplicable: %s", error.reason)
        return OracleResult.inapplicable(error.reason)
