import dataclasses

from zinc_bridge.flatzinc.model import (
    ArrayAccess,
    ArrayLit,
    Expr,
    FznModel,
    FznParam,
    FznVarDecl,
    Ident,
)


class _Inliner:
    def __init__(self, model: FznModel) -> None:
        self.model = model

    def expr(self, expr: Expr) -> Expr:
        if isinstance(expr, Ident):
            declaration = self.model.declarations.get(expr.name)
            if isinstance(declaration, FznParam) or (
                isinstance(declaration, FznVarDecl) and declaration.type.is_array
            ):
                assert declaration.value is not None
                return self.expr(declaration.value)
            return expr
        if isinstance(expr, ArrayAccess):
            array = self.expr(Ident(expr.name))
            assert isinstance(array, ArrayLit)
            return self.expr(array.items[expr.index - 1])
        if isinstance(expr, ArrayLit):
            return ArrayLit(tuple(self.expr(item) for item in expr.items))
        return expr


def inline_arrays(model: FznModel) -> FznModel:
    """Replace parameter and variable-array references by their values.

    Afterwards constraint arguments and objectives mention scalar variables only.
    """
    inliner = _Inliner(model)
    constraints = tuple(
        dataclasses.replace(c, args=tuple(inliner.expr(arg) for arg in c.args))
        for c in model.constraints
    )
    goals = tuple(
        goal
        if goal.objective is None
        else dataclasses.replace(goal, objective=inliner.expr(goal.objective))
        for goal in model.solve_items
    )
    return dataclasses.replace(model, constraints=constraints, solve_items=goals)
