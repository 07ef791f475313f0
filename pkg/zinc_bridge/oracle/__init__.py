"""Exact brute-force reference solvers and the differential verdict."""

from zinc_bridge.oracle.fzn import solve_fzn
from zinc_bridge.oracle.mzn import solve_mzn, solve_translation
from zinc_bridge.oracle.report import InstanceReport, summarize, write_reports
from zinc_bridge.oracle.smt import solve_smt
from zinc_bridge.oracle.verdict import (
    DELTA_THRESHOLD,
    Classification,
    OracleResult,
    OracleStatus,
    Verdict,
    classify,
)

__all__ = [
    "DELTA_THRESHOLD",
    "Classification",
    "InstanceReport",
    "OracleResult",
    "OracleStatus",
    "Verdict",
    "classify",
    "solve_fzn",
    "solve_mzn",
    "solve_smt",
    "solve_translation",
    "summarize",
    "write_reports",
]
