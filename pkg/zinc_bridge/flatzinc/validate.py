from typing import Dict, List, Optional, Tuple

import dataclasses

from zinc_bridge.errors import (
    UnknownSymbolError,
    UnsupportedConstraintError,
    ValidationError,
)
from zinc_bridge.flatzinc.builtins import BuiltinSignature, ParamKind, lookup
from zinc_bridge.flatzinc.model import (
    LITERAL_TYPES,
    ArrayAccess,
    ArrayLit,
    BaseType,
    BoolLit,
    Declaration,
    Expr,
    FloatLit,
    FznConstraint,
    FznModel,
    FznVarDecl,
    GoalKind,
    Ident,
    IntervalDomain,
    IntLit,
    RangeLit,
    SetDomain,
    SetLit,
    StringLit,
)

# (base, is_array, is_var); base None for the empty array literal
_Inferred = Tuple[Optional[str], bool, bool]

_BASE_NAMES = {
    BaseType.BOOL: "bool",
    BaseType.INT: "int",
    BaseType.FLOAT: "float",
    BaseType.SET: "set",
}

_OUTPUT_ANNOTATIONS = ("output_var", "output_array")


class _Validator:
    def __init__(self, model: FznModel) -> None:
        self.model = model
        self.declarations: Dict[str, Declaration] = {}

    def declare(self, declaration: Declaration) -> None:
        if declaration.name in self.declarations:
            raise ValidationError(f"identifier '{declaration.name}' declared twice")
        self.declarations[declaration.name] = declaration

    def infer(self, expr: Expr, where: str) -> _Inferred:
        if isinstance(expr, BoolLit):
            return ("bool", False, False)
        if isinstance(expr, IntLit):
            return ("int", False, False)
        if isinstance(expr, FloatLit):
            return ("float", False, False)
        if isinstance(expr, (SetLit, RangeLit)):
            return ("set", False, False)
        if isinstance(expr, StringLit):
            raise ValidationError(f"{where}: string literal not allowed here")
        if isinstance(expr, Ident):
            declaration = self.lookup(expr.name, where)
            return (
                _BASE_NAMES[declaration.type.base],
                declaration.type.is_array,
                declaration.type.is_var,
            )
        if isinstance(expr, ArrayAccess):
            declaration = self.lookup(expr.name, where)
            length = declaration.type.array_length
            if length is None:
                raise ValidationError(f"{where}: '{expr.name}' is not an array")
            if not 1 <= expr.index <= length:
                raise ValidationError(
                    f"{where}: index {expr.index} out of bounds "
                    f"for '{expr.name}' (1..{length})"
                )
            return (_BASE_NAMES[declaration.type.base], False, declaration.type.is_var)
        if isinstance(expr, ArrayLit):
            base: Optional[str] = None
            is_var = False
            for item in expr.items:
                item_base, item_is_array, item_is_var = self.infer(item, where)
                if item_is_array:
                    raise ValidationError(f"{where}: nested arrays are not allowed")
                if base is not None and item_base != base:
                    raise ValidationError(
                        f"{where}: mixed element types in array literal"
                    )
                base = item_base
                is_var = is_var or item_is_var
            return (base, True, is_var)
        raise ValidationError(f"{where}: unexpected expression {expr!r}")

    def lookup(self, name: str, where: str) -> Declaration:
        declaration = self.declarations.get(name)
        if declaration is None:
            raise UnknownSymbolError(name, "identifier", where)
        return declaration

    @staticmethod
    def matches(kind: ParamKind, inferred: _Inferred) -> bool:
        base, is_array, is_var = inferred
        if kind.is_array != is_array:
            return False
        if is_var and not kind.is_var:
            return False
        return base is None or base == kind.base

    def check_constraint(self, index: int, constraint: FznConstraint) -> None:
        where = f"constraint #{index + 1} {constraint.name}"
        candidates = lookup(constraint.name)
        if not candidates:
            raise UnsupportedConstraintError(constraint.name, "unknown builtin")
        inferred = [self.infer(arg, where) for arg in constraint.args]
        signature: Optional[BuiltinSignature] = None
        for candidate in candidates:
            if len(candidate.params) != len(inferred):
                continue
            if all(self.matches(k, i) for k, i in zip(candidate.params, inferred)):
                signature = candidate
                break
        if signature is None:
            arities = sorted({len(c.params) for c in candidates})
            if len(inferred) not in arities:
                raise ValidationError(
                    f"{where}: expected {' or '.join(map(str, arities))} arguments, "
                    f"got {len(inferred)}"
                )
            raise ValidationError(f"{where}: argument types do not match the signature")

    def check_var(self, var: FznVarDecl) -> None:
        where = f"variable '{var.name}'"
        domain = var.domain
        if isinstance(domain, IntervalDomain) and domain.lo > domain.hi:
            raise ValidationError(f"{where}: empty domain")
        if isinstance(domain, SetDomain) and (
            not domain.elements or list(domain.elements) != sorted(set(domain.elements))
        ):
            raise ValidationError(f"{where}: set domain must be non-empty and sorted")
        if var.type.is_array:
            if not isinstance(var.value, ArrayLit):
                raise ValidationError(f"{where}: arrays of variables must be assigned")
            if len(var.value.items) != var.type.array_length:
                raise ValidationError(f"{where}: array literal has the wrong length")
        if var.value is not None:
            base, is_array, _ = self.infer(var.value, where)
            if base is not None and base != _BASE_NAMES[var.type.base]:
                raise ValidationError(f"{where}: assigned value has the wrong type")
            if is_array != var.type.is_array:
                raise ValidationError(f"{where}: assigned value has the wrong shape")

    def run(self, allow_multi_objective: bool) -> FznModel:
        model = self.model
        for param in model.params:
            if not isinstance(param.value, LITERAL_TYPES + (ArrayLit,)):
                raise ValidationError(
                    f"parameter '{param.name}' must have a literal value"
                )
            self.declare(param)
        for var in model.vars:
            self.declare(var)
        for var in model.vars:
            self.check_var(var)

        defined_by: Dict[str, str] = {}
        for index, constraint in enumerate(model.constraints):
            self.check_constraint(index, constraint)
            for name in constraint.defined_variables():
                where = f"constraint #{index + 1} {constraint.name}"
                if not isinstance(self.lookup(name, where), FznVarDecl):
                    raise ValidationError(
                        f"{where}: defines_var of a parameter '{name}'"
                    )
                defined_by.setdefault(name, f"{constraint.name}#{index + 1}")

        if not model.solve_items:
            raise ValidationError("missing solve item")
        if len(model.solve_items) > 1 and not allow_multi_objective:
            raise ValidationError(
                "more than one solve item (enable the multi-objective extension)"
            )
        for number, goal in enumerate(model.solve_items, start=1):
            where = f"solve item #{number}"
            if goal.kind == GoalKind.SATISFY:
                if goal.objective is not None:
                    raise ValidationError(f"{where}: satisfy takes no objective")
                continue
            if goal.objective is None:
                raise ValidationError(f"{where}: missing objective")
            base, is_array, _ = self.infer(goal.objective, where)
            if is_array or base not in ("int", "float"):
                raise ValidationError(f"{where}: objective must be numeric")

        variables: List[FznVarDecl] = []
        outputs: List[str] = []
        for var in model.vars:
            origin = defined_by.get(var.name)
            if var.value is not None and not var.type.is_array:
                origin = "assignment"
            if origin != var.defined_by:
                var = dataclasses.replace(var, defined_by=origin)
            variables.append(var)
            if any(var.has_annotation(name) for name in _OUTPUT_ANNOTATIONS):
                outputs.append(var.name)
        return dataclasses.replace(
            model, vars=tuple(variables), output_annotations=tuple(outputs)
        )


def validate_model(model: FznModel, allow_multi_objective: bool = False) -> FznModel:
    """Check the model invariants and fill in derived fields.

    Raises:
        ValidationError: naming the offending item.
    """
    return _Validator(model).run(allow_multi_objective)


