"""Reference results for MiniZinc models, through the in-house flattener."""

from typing import List, Optional

import logging

from zinc_bridge.errors import ValidationError
from zinc_bridge.fzn2omt.config import ObjectiveMode
from zinc_bridge.minizinc import MznModel, flatten
from zinc_bridge.minizinc.ast import MznSolveKind
from zinc_bridge.omt2mzn.translator import MznOutput, OutputKind
from zinc_bridge.oracle.fzn import solve_fzn
from zinc_bridge.oracle.verdict import OracleResult, OracleStatus

logger = logging.getLogger(__name__)


def solve_mzn(model: MznModel, budget: Optional[int] = None) -> OracleResult:
    """Flatten ``model`` and decide it; a search solve item is lexicographic."""
    try:
        flat = flatten(model)
    except ValidationError as error:
        return OracleResult.inapplicable(f"cannot flatten: {error}")
    solve = model.solve
    lexicographic = solve is not None and solve.kind == MznSolveKind.SEARCH
    mode = ObjectiveMode.LEXICOGRAPHIC if lexicographic else ObjectiveMode.INDEPENDENT
    return solve_fzn(flat, budget, mode)


def solve_translation(output: MznOutput, budget: Optional[int] = None) -> OracleResult:
    """Decide every document of a translation and combine them.

    Independent documents contribute one optimum each, in objective order.
    """
    if output.kind != OutputKind.INDEPENDENT:
        return solve_mzn(output.models[0], budget)
    results: List[OracleResult] = [solve_mzn(model, budget) for model in output.models]
    for result in results:
        if result.status == OracleStatus.INAPPLICABLE:
            return result
    if any(result.status == OracleStatus.UNSAT for result in results):
        return OracleResult.unsat()
    optima = [optimum for result in results for optimum in result.optima]
    logger.debug("Combined %d independent documents", len(results))
    return OracleResult.sat(optima, results[0].witness)
