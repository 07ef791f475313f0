"""Oracle results and the correct / incorrect / unverified classification.

``Δ = |reference - candidate| / |reference|``, falling back to the absolute
error when the reference optimum is 0. A candidate is incorrect when it reports
unsat for a satisfiable reference, or when ``Δ >= 1e-6`` on some objective.

>>> classify(
...     OracleResult.sat([1]), OracleResult.sat([Fraction(10000009, 10**7)])
... ).classification
<Classification.CORRECT: 'correct'>
"""

from typing import Any, Dict, Optional, Sequence, Tuple, Union

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from pydantic import BaseModel

Number = Union[int, Fraction]

DELTA_THRESHOLD = Fraction(1, 10 ** 6)
ERROR_BANDS: Tuple[Tuple[str, Fraction], ...] = (
    (">=10", Fraction(10)),
    (">=1", Fraction(1)),
    (">=1e-1", Fraction(1, 10)),
    (">=1e-3", Fraction(1, 10 ** 3)),
    (">=1e-6", DELTA_THRESHOLD),
)


class OracleStatus(str, enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    INAPPLICABLE = "inapplicable"


@dataclass(frozen=True)
class OracleResult:
    """Outcome of an exhaustive search.

    ``optima`` has one exact value per objective (empty for satisfaction
    problems) and is only set for ``sat``.
    """

    status: OracleStatus
    optima: Tuple[Number, ...] = ()
    reason: Optional[str] = None
    witness: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.optima and self.status != OracleStatus.SAT:
            raise ValueError("optima are only reported for sat results")

    @classmethod
    def sat(
        cls, optima: Sequence[Number] = (), witness: Optional[Dict[str, Any]] = None
    ) -> "OracleResult":
        return cls(OracleStatus.SAT, tuple(optima), witness=dict(witness or {}))

    @classmethod
    def unsat(cls) -> "OracleResult":
        return cls(OracleStatus.UNSAT)

    @classmethod
    def inapplicable(cls, reason: str) -> "OracleResult":
        return cls(OracleStatus.INAPPLICABLE, reason=reason)

    @property
    def is_sat(self) -> bool:
        return self.status == OracleStatus.SAT


class Classification(str, enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    UNVERIFIED = "unverified"


class Verdict(BaseModel):
    classification: Classification
    reason: Optional[str] = None
    delta: Optional[Fraction] = None
    error: Optional[Fraction] = None
    band: Optional[str] = None

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True
        json_encoders = {Fraction: str}

    @property
    def is_correct(self) -> bool:
        return self.classification == Classification.CORRECT


def error_band(error: Fraction) -> Optional[str]:
    """The coarsest band reached by ``error``, ``None`` below 1e-6.

    >>> error_band(Fraction(1, 200))
    '>=1e-3'
    """
    for name, threshold in ERROR_BANDS:
        if error >= threshold:
            return name
    return None


def relative_error(reference: Number, candidate: Number) -> Optional[Fraction]:
    if reference == 0:
        return None
    return abs(Fraction(reference) - Fraction(candidate)) / abs(Fraction(reference))


def classify(reference: OracleResult, candidate: OracleResult) -> Verdict:
    """Classify a candidate result against the reference for the same problem."""
    if reference.status == OracleStatus.INAPPLICABLE:
        return Verdict(
            classification=Classification.UNVERIFIED, reason="reference inapplicable"
        )
    if candidate.status == OracleStatus.INAPPLICABLE:
        return Verdict(
            classification=Classification.UNVERIFIED, reason=candidate.reason
        )
    if reference.status == OracleStatus.UNSAT:
        if candidate.status == OracleStatus.UNSAT:
            return Verdict(classification=Classification.CORRECT)
        return Verdict(classification=Classification.INCORRECT, reason="sat-on-unsat")
    if candidate.status == OracleStatus.UNSAT:
        return Verdict(classification=Classification.INCORRECT, reason="unsat-on-sat")
    if len(reference.optima) != len(candidate.optima):
        return Verdict(
            classification=Classification.INCORRECT, reason="objective count differs"
        )
    if not reference.optima:
        return Verdict(classification=Classification.CORRECT)

    worst_error = worst_delta = None
    for expected, actual in zip(reference.optima, candidate.optima):
        delta = relative_error(expected, actual)
        error = delta
        if error is None:
            error = abs(Fraction(expected) - Fraction(actual))
        if worst_error is None or error > worst_error:
            worst_error, worst_delta = error, delta
    assert worst_error is not None
    if worst_error >= DELTA_THRESHOLD:
        return Verdict(
            classification=Classification.INCORRECT,
            reason="delta",
            delta=worst_delta,
            error=worst_error,
            band=error_band(worst_error),
        )
    return Verdict(
        classification=Classification.CORRECT, delta=worst_delta, error=worst_error
    )
