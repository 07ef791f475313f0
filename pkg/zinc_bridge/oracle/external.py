"""Adapter for an external FlatZinc solver, configured by command template.

The solver's standard output uses the usual framing: each solution is a block
of ``name = value;`` lines closed by ``----------``; ``==========`` marks a
completed search, ``=====UNSATISFIABLE=====`` and ``=====UNKNOWN=====`` speak
for themselves.
"""

from typing import Dict, List, Optional

import logging
import re
import shlex
import subprocess
from fractions import Fraction
from pathlib import Path

from zinc_bridge.errors import ExternalToolError, UsageError
from zinc_bridge.flatzinc.model import FloatLit, FznModel, GoalKind, Ident, IntLit
from zinc_bridge.oracle.verdict import Number, OracleResult
from zinc_bridge.rational import parse_decimal
from zinc_bridge.settings import Settings

logger = logging.getLogger(__name__)

SOLUTION_SEPARATOR = "----------"
SEARCH_COMPLETE = "=========="
UNSATISFIABLE = "=====UNSATISFIABLE====="
UNKNOWN = "=====UNKNOWN====="

_ASSIGNMENT = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*;\s*$")
_NUMBER = re.compile(r"-?\d+(\.\d+)?([eE][-+]?\d+)?")


def _value(text: str) -> object:
    if text in ("true", "false"):
        return text == "true"
    if _NUMBER.fullmatch(text):
        value = parse_decimal(text)
        return value.numerator if value.denominator == 1 and "." not in text else value
    return text


def parse_solutions(text: str) -> List[Dict[str, object]]:
    """Every solution block of ``text``, in output order."""
    solutions: List[Dict[str, object]] = []
    current: Dict[str, object] = {}
    for line in text.splitlines():
        stripped = line.strip()
        if stripped == SOLUTION_SEPARATOR:
            solutions.append(current)
            current = {}
            continue
        match = _ASSIGNMENT.match(line)
        if match:
            current[match.group(1)] = _value(match.group(2))
    return solutions


def _objective(goal_objective: object, solution: Dict[str, object]) -> Optional[Number]:
    if isinstance(goal_objective, (IntLit, FloatLit)):
        return goal_objective.value
    if isinstance(goal_objective, Ident):
        value = solution.get(goal_objective.name)
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            return None
        return value
    return None


def parse_solver_output(text: str, model: FznModel) -> OracleResult:
    """Read solver output for ``model`` as an oracle candidate.

    An optimization run only counts when the search completed; the objective
    must be printed by the solver (``output_var``) unless it is a constant.
    """
    lines = {line.strip() for line in text.splitlines()}
    if UNSATISFIABLE in lines:
        return OracleResult.unsat()
    if UNKNOWN in lines:
        return OracleResult.inapplicable("solver reported unknown")
    solutions = parse_solutions(text)
    if not solutions:
        return OracleResult.inapplicable("solver printed no solution")
    goals = [goal for goal in model.solve_items if goal.kind != GoalKind.SATISFY]
    if not goals:
        return OracleResult.sat((), solutions[0])
    if SEARCH_COMPLETE not in lines:
        return OracleResult.inapplicable("optimization did not complete")
    last = solutions[-1]
    optima = []
    for goal in goals:
        value = _objective(goal.objective, last)
        if value is None:
            return OracleResult.inapplicable("objective missing from solver output")
        optima.append(value)
    return OracleResult.sat(optima, last)


def run_fzn_solver(
    fzn_path: Path, model: FznModel, command: Optional[str] = None
) -> OracleResult:
    """Run the configured FlatZinc solver on ``fzn_path``.

    Raises:
        UsageError: when no solver command is configured.
        ExternalToolError: when the solver cannot be started or fails.
    """
    template = command or Settings().fzn_solver_command
    if not template:
        raise UsageError(
            "no FlatZinc solver configured (ZINC_BRIDGE_FZN_SOLVER_COMMAND)"
        )
    argv = [word.format(fzn=fzn_path) for word in shlex.split(template)]
    logger.info("Running FlatZinc solver: %s", " ".join(argv))
    try:
        completed = subprocess.run(argv, capture_output=True, text=True, check=False)
    except OSError as error:
        reason = error.strerror or error
        raise ExternalToolError(f"cannot run {argv[0]}: {reason}") from error
    if completed.returncode != 0:
        raise ExternalToolError(
            f"{argv[0]} exited with status {completed.returncode}: "
            f"{completed.stderr.strip()}"
        )
    return parse_solver_output(completed.stdout, model)
