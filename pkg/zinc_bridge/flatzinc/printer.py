from typing import List, Optional

from zinc_bridge.errors import LossyEmissionError
from zinc_bridge.flatzinc.model import (
    Annotation,
    ArrayAccess,
    ArrayLit,
    BaseType,
    BoolLit,
    Domain,
    FloatLit,
    FznModel,
    FznType,
    GoalKind,
    Ident,
    IntervalDomain,
    IntLit,
    RangeLit,
    SetDomain,
    SetLit,
    StringLit,
)
from zinc_bridge.rational import format_float, format_float_approx


class _Printer:
    def __init__(self, lossless: bool) -> None:
        self.lossless = lossless

    def number(self, value: object, is_float: bool) -> str:
        if not is_float:
            return str(value)
        text = format_float(value)  # type: ignore[arg-type]
        if text is None:
            if self.lossless:
                raise LossyEmissionError(
                    f"{value} has no exact decimal representation"
                )
            return format_float_approx(value)  # type: ignore[arg-type]
        return text

    def expr(self, expr: object) -> str:
        if isinstance(expr, BoolLit):
            return "true" if expr.value else "false"
        if isinstance(expr, IntLit):
            return str(expr.value)
        if isinstance(expr, FloatLit):
            return self.number(expr.value, True)
        if isinstance(expr, SetLit):
            return "{" + ", ".join(map(str, expr.elements)) + "}"
        if isinstance(expr, RangeLit):
            return f"{expr.lo}..{expr.hi}"
        if isinstance(expr, StringLit):
            return f'"{expr.text}"'
        if isinstance(expr, Ident):
            return expr.name
        if isinstance(expr, ArrayAccess):
            return f"{expr.name}[{expr.index}]"
        if isinstance(expr, ArrayLit):
            return "[" + ", ".join(self.expr(item) for item in expr.items) + "]"
        if isinstance(expr, Annotation):
            return self.annotation(expr)
        raise TypeError(f"cannot print {expr!r}")

    def annotation(self, annotation: Annotation) -> str:
        if not annotation.args:
            return annotation.name
        args = ", ".join(self.expr(arg) for arg in annotation.args)
        return f"{annotation.name}({args})"

    def annotations(self, annotations: "tuple[Annotation, ...]") -> str:
        return "".join(f" :: {self.annotation(a)}" for a in annotations)

    def domain(self, domain: Domain, is_float: bool) -> str:
        if isinstance(domain, SetDomain):
            return "{" + ", ".join(map(str, domain.elements)) + "}"
        assert isinstance(domain, IntervalDomain)
        return f"{self.number(domain.lo, is_float)}..{self.number(domain.hi, is_float)}"

    def type(self, fzn_type: FznType, domain: Optional[Domain]) -> str:
        if fzn_type.base == BaseType.SET:
            element = "set of " + (self.domain(domain, False) if domain else "int")
        elif domain is not None:
            element = self.domain(domain, fzn_type.base == BaseType.FLOAT)
        else:
            element = fzn_type.base.value
        if fzn_type.is_var:
            element = "var " + element
        if fzn_type.is_array:
            return f"array [1..{fzn_type.array_length}] of {element}"
        return element

    def model(self, model: FznModel) -> str:
        lines: List[str] = list(model.predicates)
        for param in model.params:
            head = f"{self.type(param.type, None)}: {param.name}"
            lines.append(f"{head} = {self.expr(param.value)};")
        for var in model.vars:
            line = f"{self.type(var.type, var.domain)}: {var.name}"
            line += self.annotations(var.annotations)
            if var.value is not None:
                line += f" = {self.expr(var.value)}"
            lines.append(line + ";")
        for constraint in model.constraints:
            args = ", ".join(self.expr(arg) for arg in constraint.args)
            lines.append(
                f"constraint {constraint.name}({args})"
                f"{self.annotations(constraint.annotations)};"
            )
        for goal in model.solve_items:
            head = f"solve{self.annotations(goal.annotations)}"
            if goal.kind == GoalKind.SATISFY:
                lines.append(f"{head} satisfy;")
            else:
                lines.append(f"{head} {goal.kind.value} {self.expr(goal.objective)};")
        return "\n".join(lines) + "\n"


def print_fzn(model: FznModel, lossless: bool = True) -> str:
    """Emit FlatZinc text.

    With ``lossless`` a float literal without a terminating decimal expansion
    is an error.
    """
    return _Printer(lossless).model(model)
