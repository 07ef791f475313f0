from typing import Dict, Iterable, List, Optional, TextIO

from collections import Counter
from fractions import Fraction

from pydantic import BaseModel

from zinc_bridge.oracle.verdict import (
    Classification,
    OracleResult,
    OracleStatus,
    Verdict,
)


class InstanceReport(BaseModel):
    """One checked (instance, translation) pair; optima are exact strings."""

    instance: str
    translation: str
    reference: OracleStatus
    candidate: OracleStatus
    reference_optima: List[str] = []
    candidate_optima: List[str] = []
    verdict: Classification
    reason: Optional[str] = None
    delta: Optional[str] = None
    band: Optional[str] = None

    class Config:
        allow_mutation = False

    @classmethod
    def build(
        cls,
        instance: str,
        translation: str,
        reference: OracleResult,
        candidate: OracleResult,
        verdict: Verdict,
    ) -> "InstanceReport":
        return cls(
            instance=instance,
            translation=translation,
            reference=reference.status,
            candidate=candidate.status,
            reference_optima=[str(Fraction(value)) for value in reference.optima],
            candidate_optima=[str(Fraction(value)) for value in candidate.optima],
            verdict=verdict.classification,
            reason=verdict.reason,
            delta=None if verdict.delta is None else str(verdict.delta),
            band=verdict.band,
        )


def write_reports(reports: Iterable[InstanceReport], stream: TextIO) -> int:
    """Write one JSON object per line; returns the number of records."""
    count = 0
    for report in reports:
        stream.write(report.json() + "\n")
        count += 1
    return count


def summarize(reports: Iterable[InstanceReport]) -> Dict[str, int]:
    """Counts per verdict, plus per error band for the incorrect ones.

    >>> summarize([])
    {'correct': 0, 'incorrect': 0, 'unverified': 0}
    """
    counts: Dict[str, int] = {member.value: 0 for member in Classification}
    bands: Counter = Counter()
    for report in reports:
        counts[report.verdict.value] += 1
        if report.band is not None:
            bands[f"incorrect {report.band}"] += 1
    counts.update(bands)
    return counts
