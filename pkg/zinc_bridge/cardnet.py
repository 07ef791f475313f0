"""Cardinality networks and pseudo-Boolean encodings.

Networks are odd-even merge sorters over Boolean literals, truncated to the
first ``m`` outputs: output ``j`` is true iff at least ``j`` inputs are true.
Every comparator output is a full equivalence (``c1 = a or b``, ``c2 = a and
b``), so each input assignment has exactly one consistent extension.

>>> pool = VariablePool(4)
>>> network = build_cardinality_network([Literal(1), Literal(2), Literal(3)], 1, pool)
>>> len(network.output_literals)
2
"""

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import logging
from dataclasses import dataclass, field
from itertools import groupby

from zinc_bridge.errors import CardinalityError

logger = logging.getLogger(__name__)

RELATIONS = ("<=", ">=", "=")


@dataclass(frozen=True, order=True)
class Literal:
    var: int
    positive: bool = True

    def __neg__(self) -> "Literal":
        return Literal(self.var, not self.positive)

    def value(self, assignment: Dict[int, bool]) -> bool:
        return assignment[self.var] == self.positive


Clause = Tuple[Literal, ...]

# the empty clause
FALSE_CLAUSE: Clause = ()


class VariablePool:
    """Hands out consecutive variable ids starting at ``start``."""

    def __init__(self, start: int = 1) -> None:
        self.start = start
        self.next = start

    @classmethod
    def after(cls, literals: Iterable[Literal]) -> "VariablePool":
        return cls(max((literal.var for literal in literals), default=0) + 1)

    def fresh(self) -> Literal:
        literal = Literal(self.next)
        self.next += 1
        return literal

    @property
    def count(self) -> int:
        return self.next - self.start


@dataclass(frozen=True)
class Gate:
    """``output = a or b`` (kind ``or``) or ``output = a and b`` (kind ``and``)."""

    output: Literal
    kind: str
    a: Literal
    b: Literal

    def clauses(self) -> Tuple[Clause, ...]:
        out, a, b = self.output, self.a, self.b
        if self.kind == "or":
            return ((-a, out), (-b, out), (a, b, -out))
        return ((-a, -b, out), (a, -out), (b, -out))


@dataclass(frozen=True)
class NetworkResult:
    output_literals: Tuple[Literal, ...]
    aux_variable_count: int
    gates: Tuple[Gate, ...] = ()
    # constraints on the outputs, on top of the gate definitions
    bound_clauses: Tuple[Clause, ...] = ()
    clauses: Tuple[Clause, ...] = field(init=False)

    def __post_init__(self) -> None:
        gate_clauses = tuple(c for gate in self.gates for c in gate.clauses())
        object.__setattr__(self, "clauses", gate_clauses + self.bound_clauses)


class _Builder:
    def __init__(self, pool: VariablePool) -> None:
        self.pool = pool
        self.gates: List[Gate] = []

    def gate(self, kind: str, a: Literal, b: Literal) -> Literal:
        output = self.pool.fresh()
        self.gates.append(Gate(output, kind, a, b))
        return output

    def comparator(self, a: Literal, b: Literal, outputs: int) -> List[Literal]:
        if outputs <= 0:
            return []
        high = self.gate("or", a, b)
        if outputs == 1:
            return [high]
        return [high, self.gate("and", a, b)]

    def sort(self, inputs: Sequence[Literal], m: int) -> List[Literal]:
        if m <= 0:
            return []
        if len(inputs) <= 1:
            return list(inputs[:m])
        half = len(inputs) // 2
        left = self.sort(inputs[:half], m)
        right = self.sort(inputs[half:], m)
        return self.merge(left, right, m)

    def merge(
        self, a: Sequence[Literal], b: Sequence[Literal], m: int
    ) -> List[Literal]:
        a, b = a[:m], b[:m]
        if m <= 0:
            return []
        if not a:
            return list(b)
        if not b:
            return list(a)
        if len(a) == 1 and len(b) == 1:
            return self.comparator(a[0], b[0], m)
        v = self.merge(a[0::2], b[0::2], m // 2 + 1)
        w = self.merge(a[1::2], b[1::2], m // 2)
        result = [v[0]]
        pairs = min(len(w), len(v) - 1)
        for i in range(pairs):
            room = m - len(result)
            result.extend(self.comparator(w[i], v[i + 1], room))
        result.extend(w[pairs:])
        result.extend(v[pairs + 1 :])
        return result[:m]


def _check_bound(inputs: Sequence[Literal], k: int) -> None:
    if not inputs:
        raise CardinalityError("cardinality constraints need at least one input")
    if not 0 <= k <= len(inputs):
        raise CardinalityError(f"bound {k} out of range 0..{len(inputs)}")


def _network(
    inputs: Sequence[Literal], m: int, pool: Optional[VariablePool]
) -> Tuple[List[Literal], List[Gate], int]:
    pool = pool or VariablePool.after(inputs)
    start = pool.next
    builder = _Builder(pool)
    outputs = builder.sort(list(inputs), min(m, len(inputs)))
    return outputs, builder.gates, pool.next - start


def build_cardinality_network(
    inputs: Sequence[Literal], k: int, pool: Optional[VariablePool] = None
) -> NetworkResult:
    """Sort ``inputs`` far enough to decide any bound up to ``k``: ``k + 1`` outputs.

    Raises:
        CardinalityError: if ``inputs`` is empty or ``k`` is outside ``0..len(inputs)``.
    """
    _check_bound(inputs, k)
    outputs, gates, aux = _network(inputs, k + 1, pool)
    return NetworkResult(tuple(outputs), aux, tuple(gates))


def encode_atmost_k(
    inputs: Sequence[Literal], k: int, pool: Optional[VariablePool] = None
) -> NetworkResult:
    _check_bound(inputs, k)
    if k == len(inputs):
        return NetworkResult((), 0)
    outputs, gates, aux = _network(inputs, k + 1, pool)
    return NetworkResult(tuple(outputs), aux, tuple(gates), ((-outputs[k],),))


def encode_atleast_k(
    inputs: Sequence[Literal], k: int, pool: Optional[VariablePool] = None
) -> NetworkResult:
    _check_bound(inputs, k)
    if k == 0:
        return NetworkResult((), 0)
    outputs, gates, aux = _network(inputs, k, pool)
    return NetworkResult(tuple(outputs), aux, tuple(gates), ((outputs[k - 1],),))


def encode_exactly_k(
    inputs: Sequence[Literal], k: int, pool: Optional[VariablePool] = None
) -> NetworkResult:
    _check_bound(inputs, k)
    outputs, gates, aux = _network(inputs, k + 1, pool)
    units: List[Clause] = []
    if k > 0:
        units.append((outputs[k - 1],))
    if k < len(inputs):
        units.append((-outputs[k],))
    return NetworkResult(tuple(outputs), aux, tuple(gates), tuple(units))


@dataclass(frozen=True)
class LinearLink:
    """A weighted sum of network outputs compared against ``bound``.

    The constraint reads
    ``sum(weight * count_true(outputs) for weight, outputs in groups) <relation>
    bound``. Each output list is a truncated sorted network output, so its true count is
    the (capped) number of true literals of that weight group.
    """

    groups: Tuple[Tuple[int, Tuple[Literal, ...]], ...]
    relation: str
    bound: int

    def holds(self, assignment: Dict[int, bool]) -> bool:
        total = sum(
            weight * sum(literal.value(assignment) for literal in outputs)
            for weight, outputs in self.groups
        )
        return _compare(total, self.relation, self.bound)


@dataclass(frozen=True)
class PbEncoding:
    clauses: Tuple[Clause, ...] = ()
    gates: Tuple[Gate, ...] = ()
    bound_clauses: Tuple[Clause, ...] = ()
    link: Optional[LinearLink] = None
    aux_variable_count: int = 0

    @property
    def is_unsat(self) -> bool:
        return FALSE_CLAUSE in self.clauses


def _compare(total: int, relation: str, bound: int) -> bool:
    if relation == "<=":
        return total <= bound
    if relation == ">=":
        return total >= bound
    return total == bound


def normalize_pb(
    terms: Sequence[Tuple[Literal, int]], bound: int
) -> Tuple[List[Tuple[Literal, int]], int]:
    """Merge duplicate variables and make every weight positive.

    Returns the normalized terms (sorted by variable) and the shifted bound;
    ``w * x`` with ``w < 0`` becomes ``|w| * not x`` and moves ``w`` into the bound.
    """
    coefficient: Dict[int, int] = {}
    constant = 0
    for literal, weight in terms:
        if literal.positive:
            coefficient[literal.var] = coefficient.get(literal.var, 0) + weight
        else:
            # w * not x = w - w * x
            constant += weight
            coefficient[literal.var] = coefficient.get(literal.var, 0) - weight
    normalized = []
    for var in sorted(coefficient):
        weight = coefficient[var]
        if weight > 0:
            normalized.append((Literal(var), weight))
        elif weight < 0:
            # w * x = w + |w| * not x
            constant += weight
            normalized.append((Literal(var, False), -weight))
    return normalized, bound - constant


def _unsat() -> PbEncoding:
    return PbEncoding(clauses=(FALSE_CLAUSE,), bound_clauses=(FALSE_CLAUSE,))


def _from_network(result: NetworkResult) -> PbEncoding:
    return PbEncoding(
        clauses=result.clauses,
        gates=result.gates,
        bound_clauses=result.bound_clauses,
        aux_variable_count=result.aux_variable_count,
    )


def encode_pb_sum(
    terms: Sequence[Tuple[Literal, int]],
    relation: str,
    bound: int,
    pool: Optional[VariablePool] = None,
) -> PbEncoding:
    """Encode ``sum(w * l) <relation> bound`` over Boolean literals.

    Literals are grouped by weight and each group gets its own network. A single
    group reduces to a cardinality constraint; several groups are related by a
    :class:`LinearLink` over the network outputs. An unsatisfiable constraint is
    encoded as the empty clause.
    """
    if relation not in RELATIONS:
        raise ValueError(f"unknown relation {relation!r}")
    if any(weight == 0 for _, weight in terms):
        raise ValueError("pseudo-Boolean weights must be non-zero")
    normalized, bound = normalize_pb(terms, bound)
    total = sum(weight for _, weight in normalized)
    pool = pool or VariablePool.after(literal for literal, _ in terms)

    if relation in ("<=", "=") and bound < 0:
        return _unsat()
    if relation in (">=", "=") and bound > total:
        return _unsat()
    if relation == "<=" and bound >= total:
        return PbEncoding()
    if relation == ">=" and bound <= 0:
        return PbEncoding()

    ordered = sorted(normalized, key=lambda term: term[1])
    groups = [
        (weight, [literal for literal, _ in members])
        for weight, members in groupby(ordered, key=lambda term: term[1])
    ]

    if len(groups) == 1:
        weight, literals = groups[0]
        if relation == "<=":
            k = min(bound // weight, len(literals))
            return _from_network(encode_atmost_k(literals, k, pool))
        if relation == ">=":
            return _from_network(encode_atleast_k(literals, -(-bound // weight), pool))
        if bound % weight:
            return _unsat()
        return _from_network(encode_exactly_k(literals, bound // weight, pool))

    start = pool.next
    builder = _Builder(pool)
    linked = []
    for weight, literals in groups:
        if relation == "<=":
            cap = bound // weight + 1
        elif relation == ">=":
            cap = -(-bound // weight)
        else:
            cap = len(literals)
        outputs = builder.sort(literals, min(cap, len(literals)))
        linked.append((weight, tuple(outputs)))
    gates = tuple(builder.gates)
    link = LinearLink(tuple(linked), relation, bound)
    logger.debug(
        "Encoded PB sum over %d weight groups with %d gates", len(groups), len(gates)
    )
    return PbEncoding(
        clauses=tuple(c for gate in gates for c in gate.clauses()),
        gates=gates,
        link=link,
        aux_variable_count=pool.next - start,
    )

