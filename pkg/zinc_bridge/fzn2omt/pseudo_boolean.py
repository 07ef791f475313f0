"""Detection of pseudo-Boolean constraints hidden behind ``bool2int``.

Compilers turn ``sum(b_i) <= k`` into ``bool2int(b_i, x_i)`` channels plus an
``int_lin_*`` over the ``x_i``. When every variable of a linear constraint is
such a 0/1 image, the constraint is rewritten to ``bool_lin_eq`` or
``bool_lin_le`` over the Booleans, and channels nobody else reads are dropped.
An image fed by several ``bool2int`` channels keeps all of them.
"""

from typing import Dict, List, Optional, Set, Tuple

import dataclasses
import logging
from collections import Counter

from zinc_bridge.flatzinc.model import (
    ArrayLit,
    BoolLit,
    Expr,
    FznConstraint,
    FznModel,
    Ident,
    IntLit,
)
from zinc_bridge.flatzinc.semantics import constraint_identifiers

logger = logging.getLogger(__name__)

PB_MARKERS = ("bool_lin_eq", "bool_lin_le")

_REWRITES = {"int_lin_eq": "bool_lin_eq", "int_lin_le": "bool_lin_le"}


def _images(model: FznModel) -> Dict[str, Expr]:
    images: Dict[str, Expr] = {}
    for constraint in model.constraints:
        if constraint.name != "bool2int":
            continue
        source, image = constraint.args
        if not (isinstance(image, Ident) and model.is_var(image.name)):
            continue
        domain = model.var(image.name).domain
        # a narrower domain also constrains the Boolean
        if domain is None or (domain.contains(0) and domain.contains(1)):
            images.setdefault(image.name, source)
    return images


def _rewrite(
    constraint: FznConstraint, images: Dict[str, Expr]
) -> Optional[FznConstraint]:
    coefficients, variables, constant = constraint.args
    assert isinstance(coefficients, ArrayLit) and isinstance(variables, ArrayLit)
    assert isinstance(constant, IntLit)
    weights: List[Expr] = []
    literals: List[Expr] = []
    bound = constant.value
    for weight, item in zip(coefficients.items, variables.items):
        assert isinstance(weight, IntLit)
        if isinstance(item, IntLit):
            bound -= weight.value * item.value
            continue
        if not isinstance(item, Ident) or item.name not in images:
            return None
        source = images[item.name]
        if isinstance(source, BoolLit):
            bound -= weight.value * int(source.value)
            continue
        weights.append(weight)
        literals.append(source)
    if not literals:
        return None
    return FznConstraint(
        _REWRITES[constraint.name],
        (ArrayLit(tuple(weights)), ArrayLit(tuple(literals)), IntLit(bound)),
    )


def _readers(model: FznModel, skip: Set[int]) -> Set[str]:
    names: Set[str] = set()
    for index, constraint in enumerate(model.constraints):
        if index not in skip:
            names.update(constraint_identifiers(constraint))
    for goal in model.solve_items:
        if isinstance(goal.objective, Ident):
            names.add(goal.objective.name)
    for var in model.vars:
        if var.type.is_array and isinstance(var.value, ArrayLit):
            items = var.value.items
            names.update(item.name for item in items if isinstance(item, Ident))
    return names


def detect_and_rewrite_pb(model: FznModel) -> FznModel:
    """Rewrite every ``int_lin_eq``/``int_lin_le`` over 0/1 images to a PB builtin.

    Constraints mixing an image with a genuine integer variable are left alone,
    as are reified linear constraints.
    """
    images = _images(model)
    if not images:
        return model
    constraints: List[FznConstraint] = []
    rewritten = 0
    for constraint in model.constraints:
        replacement = None
        if constraint.name in _REWRITES:
            replacement = _rewrite(constraint, images)
        if replacement is not None:
            rewritten += 1
        constraints.append(replacement or constraint)
    if not rewritten:
        return model

    candidate = dataclasses.replace(model, constraints=tuple(constraints))
    channels: Dict[int, str] = {
        index: c.args[1].name  # type: ignore[union-attr]
        for index, c in enumerate(candidate.constraints)
        if c.name == "bool2int" and isinstance(c.args[1], Ident)
    }
    # an image with several sources keeps its channels, they equate the sources
    sources = Counter(channels.values())
    readers = _readers(candidate, set(channels))
    dropped: Tuple[str, ...] = tuple(
        name
        for name in sources
        if sources[name] == 1 and name not in readers and not _is_output(model, name)
    )
    keep = [
        c
        for index, c in enumerate(candidate.constraints)
        if channels.get(index) not in dropped
    ]
    variables = tuple(var for var in model.vars if var.name not in dropped)
    logger.debug(
        "Rewrote %d linear constraints as pseudo-Boolean, dropped %d channels",
        rewritten,
        len(dropped),
    )
    return dataclasses.replace(candidate, vars=variables, constraints=tuple(keep))


def _is_output(model: FznModel, name: str) -> bool:
    return model.var(name).has_annotation("output_var")


def is_pb_constraint(constraint: FznConstraint) -> bool:
    return constraint.name in PB_MARKERS
