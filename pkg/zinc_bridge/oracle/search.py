"""Enumeration machinery shared by the FlatZinc and SMT-LIB oracles."""

from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import itertools
import logging
import math
from dataclasses import dataclass

from zinc_bridge.fzn2omt.config import ObjectiveMode
from zinc_bridge.oracle.verdict import Number, OracleResult

logger = logging.getLogger(__name__)


class Inapplicable(Exception):
    """The instance is outside what exhaustive search can decide."""

    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class Definition:
    """``target`` is computed by ``compute`` once all of ``inputs`` are known."""

    target: str
    inputs: FrozenSet[str]
    compute: Callable[[Mapping[str, Any]], Any]


def order_definitions(
    known: Sequence[str],
    candidates: Sequence[Definition],
    enumerable: Callable[[str], bool] = lambda name: True,
) -> Tuple[List[str], List[Definition]]:
    """Order ``candidates`` so that each one only reads earlier values.

    Returns the names to enumerate (``known`` plus the target of any definition
    dropped to break a cycle, preferring ``enumerable`` ones) and the
    definitions in evaluation order. The first candidate for a target wins.
    """
    pending: Dict[str, Definition] = {}
    for definition in candidates:
        pending.setdefault(definition.target, definition)
    for name in known:
        pending.pop(name, None)
    search = list(known)
    ordered: List[Definition] = []
    while pending:
        batch = [
            d
            for d in pending.values()
            if not (d.inputs - {d.target}) & pending.keys()
        ]
        if not batch:
            name = next((n for n in pending if enumerable(n)), next(iter(pending)))
            logger.debug("Breaking definition cycle at %s", name)
            del pending[name]
            search.append(name)
            continue
        for definition in batch:
            del pending[definition.target]
            ordered.append(definition)
    return search, ordered


def check_budget(domains: Sequence[Sequence[Any]], budget: int) -> int:
    size = math.prod(len(domain) for domain in domains)
    if size > budget:
        raise Inapplicable(
            f"search space of {size} assignments exceeds budget {budget}"
        )
    logger.info("Enumerating %d assignments over %d variables", size, len(domains))
    return size


def assignments(
    names: Sequence[str], domains: Sequence[Sequence[Any]]
) -> Iterator[Dict[str, Any]]:
    for values in itertools.product(*domains):
        yield dict(zip(names, values))


def subsets(elements: Sequence[int]) -> List[FrozenSet[int]]:
    """Every subset of ``elements``; ``2 ** len(elements)`` of them."""
    return [
        frozenset(combination)
        for size in range(len(elements) + 1)
        for combination in itertools.combinations(elements, size)
    ]


class Optimum:
    """Tracks the best objective values seen during enumeration.

    ``minimize`` has one flag per objective. In independent mode each objective
    keeps its own optimum; an objective value of ``None`` means the assignment
    is infeasible for that objective only. In lexicographic mode the value
    vectors are compared as tuples.
    """

    def __init__(self, minimize: Sequence[bool], mode: ObjectiveMode) -> None:
        self.minimize = tuple(minimize)
        self.mode = mode
        self.best: List[Optional[Number]] = [None] * len(self.minimize)
        self.witness: Optional[Dict[str, Any]] = None
        self.feasible = False

    @property
    def done(self) -> bool:
        """A satisfaction problem is decided by its first solution."""
        return self.feasible and not self.minimize

    def _better(self, index: int, value: Number) -> bool:
        best = self.best[index]
        if best is None:
            return True
        return value < best if self.minimize[index] else value > best

    def _key(self, values: Sequence[Number]) -> Tuple[Number, ...]:
        return tuple(v if low else -v for v, low in zip(values, self.minimize))

    def offer(
        self, values: Sequence[Optional[Number]], witness: Mapping[str, Any]
    ) -> None:
        if not self.minimize:
            if not self.feasible:
                self.witness = dict(witness)
            self.feasible = True
            return
        if self.mode == ObjectiveMode.LEXICOGRAPHIC:
            if any(value is None for value in values):
                return
            key = self._key(values)  # type: ignore[arg-type]
            improves = not self.feasible
            improves = improves or key < self._key(self.best)  # type: ignore
            if improves:
                self.best = list(values)
                self.witness = dict(witness)
            self.feasible = True
            return
        for index, value in enumerate(values):
            if value is not None and self._better(index, value):
                self.best[index] = value
                if self.witness is None or index == 0:
                    self.witness = dict(witness)
            self.feasible = self.feasible or value is not None

    def result(self) -> OracleResult:
        if not self.feasible or any(best is None for best in self.best):
            return OracleResult.unsat()
        return OracleResult.sat(self.best, self.witness)  # type: ignore[arg-type]
