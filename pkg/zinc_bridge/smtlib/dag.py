from typing import Dict, Iterable, Tuple

from zinc_bridge.smtlib.script import SmtScript
from zinc_bridge.smtlib.terms import Term, iter_dag


def count_fathers(roots: Iterable[Term]) -> Dict[int, int]:
    """Incoming edges per node of the DAG below ``roots``.

    Every distinct node is visited once and each of its child slots counts once,
    so ``(or X X)`` gives ``X`` two fathers. Roots that are nobody's child get 0.
    """
    counts: Dict[int, int] = {}
    for term in iter_dag(roots):
        counts.setdefault(term.id, 0)
        for arg in term.args:
            counts[arg.id] = counts.get(arg.id, 0) + 1
    return counts


def father_counts(script: SmtScript) -> Dict[int, int]:
    """Father counts over all assertions, soft assertions and objectives."""
    return count_fathers(script.roots())


def structure(term: Term) -> Tuple[object, ...]:
    """A manager-independent nested tuple describing ``term``."""
    if term.is_var:
        return ("var", term.name, str(term.sort))
    if term.is_const:
        return ("const", term.value, str(term.sort))
    return (term.op, term.indices) + tuple(structure(arg) for arg in term.args)
