"""FlatZinc to optimization-extended SMT-LIB.

The model is inlined, propagated and (optionally) scanned for pseudo-Boolean
constraints before every builtin is translated to assertions. Integers become
``Int`` (``la`` mode) or signed bit-vectors of one width (``bv`` mode); floats
become ``Real``; a ``set of int`` variable becomes one Boolean per element of
its domain. Operations that could overflow the bit-vector width are computed
at a wider width.
"""

from typing import Callable, Dict, List, Optional, Sequence, Tuple

import logging
from fractions import Fraction

from zinc_bridge.cardnet import build_cardinality_network, encode_pb_sum
from zinc_bridge.errors import ModeError, UnsupportedConstraintError
from zinc_bridge.flatzinc.builtins import lookup
from zinc_bridge.flatzinc.model import (
    ArrayLit,
    BaseType,
    BoolLit,
    Expr,
    FloatLit,
    FznConstraint,
    FznModel,
    GoalKind,
    Ident,
    IntLit,
    RangeLit,
    SetLit,
    set_elements,
)
from zinc_bridge.fzn2omt.config import (
    MAX_BV_WIDTH,
    MIN_BV_WIDTH,
    EncodeConfig,
    IntMode,
    ObjectiveMode,
)
from zinc_bridge.fzn2omt.context import EncodingContext, signed_bits
from zinc_bridge.fzn2omt.globals import encode_global, is_global
from zinc_bridge.fzn2omt.propagation import propagate_constants_and_aliases
from zinc_bridge.fzn2omt.pseudo_boolean import detect_and_rewrite_pb, is_pb_constraint
from zinc_bridge.smtlib.script import Combination, Direction, Objective, SmtScript
from zinc_bridge.smtlib.sorts import INT, REAL
from zinc_bridge.smtlib.terms import Term, iter_dag

logger = logging.getLogger(__name__)

_RELATIONS = {"eq": "=", "ne": "!=", "le": "<=", "lt": "<"}

Encoding = Callable[[FznConstraint], Term]


def _is_lin(name: str) -> bool:
    return "_lin_" in name


def _literal_ints(expr: Expr) -> List[int]:
    if isinstance(expr, IntLit):
        return [expr.value]
    if isinstance(expr, (SetLit, RangeLit)):
        return list(set_elements(expr))
    if isinstance(expr, ArrayLit):
        values = [value for item in expr.items for value in _literal_ints(item)]
        return values + [len(expr.items)]
    return []


def choose_bv_width(model: FznModel, requested: Optional[int] = None) -> int:
    """Smallest signed width holding every integer domain bound and constant.

    With ``requested`` set, check that the declared domains fit instead.

    Raises:
        ModeError: on a float variable, an unbounded integer without
            ``requested``, a domain that does not fit, or a needed width
            above the maximum.
    """
    needed = MIN_BV_WIDTH
    for var in model.vars:
        if var.type.is_array or var.type.base == BaseType.BOOL:
            continue
        if var.type.base == BaseType.FLOAT:
            raise ModeError(f"float variable '{var.name}' cannot be encoded in bv mode")
        if var.domain is None:
            if var.type.base == BaseType.INT and requested is None:
                raise ModeError(
                    f"unbounded integer variable '{var.name}' "
                    "needs an explicit bit-vector width"
                )
            continue
        bits = max(signed_bits(int(var.domain.lo)), signed_bits(int(var.domain.hi)))
        is_int = var.type.base == BaseType.INT
        if requested is not None and is_int and bits > requested:
            raise ModeError(
                f"domain of '{var.name}' does not fit in {requested} signed bits"
            )
        needed = max(needed, bits)
    if requested is not None:
        return requested
    for constraint in model.constraints:
        if _is_lin(constraint.name):
            continue
        for arg in constraint.args:
            for value in _literal_ints(arg):
                needed = max(needed, signed_bits(value))
    for goal in model.solve_items:
        if isinstance(goal.objective, IntLit):
            needed = max(needed, signed_bits(goal.objective.value))
    if needed > MAX_BV_WIDTH:
        raise ModeError(
            f"bv mode needs {needed} bits, more than the maximum {MAX_BV_WIDTH}"
        )
    return needed


def _number(expr: Expr) -> Fraction:
    if isinstance(expr, (IntLit, FloatLit)):
        return Fraction(expr.value)
    raise UnsupportedConstraintError(
        "linear", f"expected a numeric constant, got {expr!r}"
    )


class _BuiltinEncoder:
    """Translates one constraint at a time into assertions over the context."""

    def __init__(self, context: EncodingContext) -> None:
        self.context = context
        self.manager = context.manager
        self.functions: Dict[str, Encoding] = {
            "array_bool_and": self.array_bool_and,
            "array_bool_or": self.array_bool_or,
            "array_bool_xor": self.array_bool_xor,
            "bool_and": self.bool_gate,
            "bool_or": self.bool_gate,
            "bool_xor": self.bool_xor,
            "bool_not": self.bool_not,
            "bool2int": self.bool2int,
            "int_plus": self.int_plus,
            "int_times": self.int_times,
            "int_div": self.int_division,
            "int_mod": self.int_division,
            "int_abs": self.abs,
            "int_max": self.extremum,
            "int_min": self.extremum,
            "int2float": self.int2float,
            "float_plus": self.float_plus,
            "float_times": self.float_times,
            "float_div": self.float_div,
            "float_abs": self.abs,
            "float_max": self.extremum,
            "float_min": self.extremum,
            "set_union": self.set_operation,
            "set_intersect": self.set_operation,
            "set_diff": self.set_operation,
            "set_symdiff": self.set_operation,
        }

    def encode(self, constraint: FznConstraint) -> List[Term]:
        name = constraint.name
        if any(signature.nonlinear for signature in lookup(name)):
            raise UnsupportedConstraintError(name, "non-linear builtin")
        if is_pb_constraint(constraint):
            return self.pseudo_boolean(constraint)
        if name == "set_card":
            return self.set_card(constraint)
        if is_global(name):
            return encode_global(constraint, self.context)
        definition = self.definition(constraint)
        if definition is not None:
            return [definition]
        relation = self.relation(name, constraint.args)
        if relation is not None:
            return [relation]
        if name.endswith("_reif"):
            relation = self.relation(name[: -len("_reif")], constraint.args[:-1])
            if relation is not None:
                flag = self.context.term(constraint.args[-1])
                return [self.context.eq(flag, relation)]
        function = self.functions.get(name)
        if function is None:
            raise UnsupportedConstraintError(name, "no encoding for this builtin")
        return [function(constraint)]

    # relations, also usable in reified form

    def relation(self, name: str, args: Sequence[Expr]) -> Optional[Term]:
        context = self.context
        prefix, _, suffix = name.partition("_")
        if name in ("bool_eq", "bool_le", "bool_lt"):
            a, b = (context.term(arg) for arg in args)
            if suffix == "eq":
                return context.eq(a, b)
            if suffix == "le":
                return self.manager.app("=>", [a, b])
            return context.all_of([context.not_(a), b])
        if prefix in ("int", "float") and suffix in _RELATIONS:
            a, b = (context.term(arg) for arg in args)
            return context.relate(a, _RELATIONS[suffix], b)
        if _is_lin(name) and prefix in ("int", "float"):
            relation = _RELATIONS[name.rsplit("_", 1)[1]]
            return self.linear(args, relation, prefix == "int")
        if name == "bool_clause":
            positive, negative = (context.terms(arg) for arg in args)
            return context.any_of(positive + [context.not_(b) for b in negative])
        if name == "set_in":
            return self.set_in(args)
        if name in ("set_eq", "set_ne", "set_subset", "set_superset"):
            return self.set_relation(name, args)
        return None

    def linear_pairs(
        self, args: Sequence[Expr], integral: bool
    ) -> Tuple[List[Tuple[object, Expr]], object]:
        coefficients_expr, variables_expr, constant_expr = args
        convert = (lambda x: int(x)) if integral else (lambda x: x)
        constant = _number(constant_expr)
        pairs = []
        for coefficient_expr, item in zip(
            self.context.items(coefficients_expr), self.context.items(variables_expr)
        ):
            coefficient = _number(coefficient_expr)
            if isinstance(item, (IntLit, FloatLit)):
                constant -= coefficient * _number(item)
            else:
                pairs.append((convert(coefficient), item))
        return pairs, convert(constant)

    def linear(self, args: Sequence[Expr], relation: str, integral: bool) -> Term:
        pairs, constant = self.linear_pairs(args, integral)
        terms = [(c, self.context.term(item)) for c, item in pairs]
        return self.context.linear(terms, relation, constant)  # type: ignore[arg-type]

    def definition(self, constraint: FznConstraint) -> Optional[Term]:
        """``(= x t)`` for a linear equation annotated as defining ``x``."""
        linear_eq = constraint.name in ("int_lin_eq", "float_lin_eq")
        if not linear_eq or self.context.bv_mode:
            return None
        integral = constraint.name == "int_lin_eq"
        pairs, constant = self.linear_pairs(constraint.args, integral)
        for target in constraint.defined_variables():
            positions = [
                i for i, (_, item) in enumerate(pairs) if item == Ident(target)
            ]
            if len(positions) != 1:
                continue
            scale = pairs[positions[0]][0]
            if integral and scale not in (1, -1):
                continue
            sort = INT if integral else REAL
            others = [
                self.scaled(
                    -Fraction(c) / scale,  # type: ignore[arg-type]
                    self.context.term(item),
                    integral,
                )
                for i, (c, item) in enumerate(pairs)
                if i != positions[0]
            ]
            offset = Fraction(constant) / scale  # type: ignore[arg-type]
            if offset or not others:
                others.append(self.context.number(offset, sort))
            value = others[0] if len(others) == 1 else self.manager.app("+", others)
            return self.context.eq(self.context.term(Ident(target)), value)
        return None

    def scaled(self, coefficient: Fraction, term: Term, integral: bool) -> Term:
        if coefficient == 1:
            return term
        sort = INT if integral else REAL
        return self.manager.app("*", [self.context.number(coefficient, sort), term])

    # pseudo-Boolean constraints

    def pseudo_boolean(self, constraint: FznConstraint) -> List[Term]:
        context = self.context
        weights_expr, literals_expr, bound_expr = constraint.args
        relation = "=" if constraint.name == "bool_lin_eq" else "<="
        weights = [int(_number(w)) for w in context.items(weights_expr)]
        literals = context.items(literals_expr)
        if not context.config.pb_rewrite or not isinstance(bound_expr, IntLit):
            pairs = [
                (w, context.indicator(context.term(b)))
                for w, b in zip(weights, literals)
            ]
            constant = 0
            if isinstance(bound_expr, IntLit):
                constant = bound_expr.value
            else:
                pairs.append((-1, context.term(bound_expr)))
            return [context.linear(pairs, relation, constant)]

        bound = bound_expr.value
        terms = []
        for weight, item in zip(weights, literals):
            if isinstance(item, BoolLit):
                bound -= weight * int(item.value)
            elif weight:
                terms.append((context.atom(context.term(item)), weight))
        if not terms:
            return [context.linear([], relation, bound)]
        network = encode_pb_sum(terms, relation, bound, context.pool)
        return context.pb_assertions(network)

    # functional builtins

    def array_bool_and(self, constraint: FznConstraint) -> Term:
        values, result = constraint.args
        conjunction = self.context.all_of(self.context.terms(values))
        return self.context.eq(self.context.term(result), conjunction)

    def array_bool_or(self, constraint: FznConstraint) -> Term:
        values, result = constraint.args
        disjunction = self.context.any_of(self.context.terms(values))
        return self.context.eq(self.context.term(result), disjunction)

    def array_bool_xor(self, constraint: FznConstraint) -> Term:
        values = self.context.terms(constraint.args[0])
        if not values:
            return self.manager.bool_const(False)
        return values[0] if len(values) == 1 else self.manager.app("xor", values)

    def bool_gate(self, constraint: FznConstraint) -> Term:
        a, b, r = (self.context.term(arg) for arg in constraint.args)
        op = constraint.name[len("bool_") :]
        return self.context.eq(r, self.manager.app(op, [a, b]))

    def bool_xor(self, constraint: FznConstraint) -> Term:
        terms = [self.context.term(arg) for arg in constraint.args]
        if len(terms) == 2:
            return self.manager.app("xor", terms)
        a, b, r = terms
        return self.context.eq(r, self.manager.app("xor", [a, b]))

    def bool_not(self, constraint: FznConstraint) -> Term:
        a, b = (self.context.term(arg) for arg in constraint.args)
        return self.context.eq(b, self.context.not_(a))

    def bool2int(self, constraint: FznConstraint) -> Term:
        b, x = (self.context.term(arg) for arg in constraint.args)
        return self.context.eq(x, self.context.indicator(b))

    def _wide(self, terms: Sequence[Term], extra: int) -> List[Term]:
        return [self.context.extend(term, extra) for term in terms]

    def int_plus(self, constraint: FznConstraint) -> Term:
        a, b, c = (self.context.term(arg) for arg in constraint.args)
        if not self.context.bv_mode:
            return self.context.eq(c, self.manager.app("+", [a, b]))
        a, b, c = self._wide([a, b, c], 1)
        return self.context.eq(c, self.manager.app("bvadd", [a, b]))

    def int_times(self, constraint: FznConstraint) -> Term:
        a, b, c = (self.context.term(arg) for arg in constraint.args)
        if self.context.bv_mode:
            assert self.context.width is not None
            a, b, c = self._wide([a, b, c], self.context.width)
            return self.context.eq(c, self.manager.app("bvmul", [a, b]))
        if not (a.is_const or b.is_const):
            raise UnsupportedConstraintError(
                "int_times", "product of two variables in la mode"
            )
        return self.context.eq(c, self.manager.app("*", [a, b]))

    def int_division(self, constraint: FznConstraint) -> Term:
        """Truncating ``int_div``/``int_mod``; a zero divisor falsifies it."""
        is_div = constraint.name == "int_div"
        a, b, c = (self.context.term(arg) for arg in constraint.args)
        if self.context.bv_mode:
            a, b, c = self._wide([a, b, c], 1)
            op = "bvsdiv" if is_div else "bvsrem"
            zero = self.context.int_term(0, a.sort.width)
            nonzero = self.context.not_(self.context.eq(b, zero))
            defined = self.context.eq(c, self.manager.app(op, [a, b]))
            return self.context.all_of([nonzero, defined])
        if not b.is_const:
            raise UnsupportedConstraintError(
                constraint.name, "non-constant divisor in la mode"
            )
        divisor = b.value
        assert isinstance(divisor, int)
        if divisor == 0:
            return self.manager.bool_const(False)
        magnitude = self.manager.int_const(abs(divisor))
        op = "div" if is_div else "mod"
        negate = self.manager.app("-", [a])
        nonnegative = self.manager.app(op, [a, magnitude])
        negative = self.manager.app("-", [self.manager.app(op, [negate, magnitude])])
        zero = self.manager.int_const(0)
        result = self.context.ite(self.context.le(zero, a), nonnegative, negative)
        if is_div and divisor < 0:
            result = self.manager.app("-", [result])
        return self.context.eq(c, result)

    def abs(self, constraint: FznConstraint) -> Term:
        a, b = (self.context.term(arg) for arg in constraint.args)
        if a.sort.is_bv:
            a, b = self._wide([a, b], 1)
            negated = self.manager.app("bvneg", [a])
            zero = self.context.int_term(0, a.sort.width)
        else:
            negated = self.manager.app("-", [a])
            zero = self.context.number(0, a.sort)
        magnitude = self.context.ite(self.context.le(zero, a), a, negated)
        return self.context.eq(b, magnitude)

    def extremum(self, constraint: FznConstraint) -> Term:
        a, b, c = (self.context.term(arg) for arg in constraint.args)
        if constraint.name.endswith("max"):
            first = self.context.le(b, a)
        else:
            first = self.context.le(a, b)
        return self.context.eq(c, self.context.ite(first, a, b))

    def int2float(self, constraint: FznConstraint) -> Term:
        a, f = (self.context.term(arg) for arg in constraint.args)
        return self.context.eq(f, self.manager.to_real(a))

    def float_plus(self, constraint: FznConstraint) -> Term:
        a, b, c = (self.context.term(arg) for arg in constraint.args)
        return self.context.eq(c, self.manager.app("+", [a, b]))

    def float_times(self, constraint: FznConstraint) -> Term:
        a, b, c = (self.context.term(arg) for arg in constraint.args)
        if not (a.is_const or b.is_const):
            raise UnsupportedConstraintError("float_times", "product of two variables")
        return self.context.eq(c, self.manager.app("*", [a, b]))

    def float_div(self, constraint: FznConstraint) -> Term:
        a, b, c = (self.context.term(arg) for arg in constraint.args)
        if not b.is_const:
            raise UnsupportedConstraintError("float_div", "non-constant divisor")
        if b.value == 0:
            return self.manager.bool_const(False)
        return self.context.eq(c, self.manager.app("/", [a, b]))

    # sets

    def set_in(self, args: Sequence[Expr]) -> Term:
        x_expr, set_expr = args
        members = self.context.set_members(set_expr)
        if isinstance(x_expr, IntLit):
            return self.context.member(members, x_expr.value)
        x = self.context.term(x_expr)
        context = self.context
        return context.any_of(
            [
                context.all_of([context.eq(x, context.int_term(e)), member])
                for e, member in sorted(members.items())
            ]
        )

    def set_relation(self, name: str, args: Sequence[Expr]) -> Term:
        a, b = (self.context.set_members(arg) for arg in args)
        if name == "set_superset":
            a, b = b, a
        member = self.context.member
        elements = sorted(set(a) | set(b))
        if name in ("set_subset", "set_superset"):
            return self.context.all_of(
                [self.manager.app("=>", [member(a, e), member(b, e)]) for e in elements]
            )
        same = self.context.all_of(
            [self.context.eq(member(a, e), member(b, e)) for e in elements]
        )
        return same if name == "set_eq" else self.context.not_(same)

    def set_operation(self, constraint: FznConstraint) -> Term:
        a, b, c = (self.context.set_members(arg) for arg in constraint.args)
        app = self.manager.app
        ops: Dict[str, Callable[[Term, Term], Term]] = {
            "set_union": lambda x, y: app("or", [x, y]),
            "set_intersect": lambda x, y: app("and", [x, y]),
            "set_diff": lambda x, y: app("and", [x, app("not", [y])]),
            "set_symdiff": lambda x, y: app("xor", [x, y]),
        }
        op = ops[constraint.name]
        member = self.context.member
        elements = sorted(set(a) | set(b) | set(c))
        return self.context.all_of(
            [
                self.context.eq(member(c, e), op(member(a, e), member(b, e)))
                for e in elements
            ]
        )

    def set_card(self, constraint: FznConstraint) -> List[Term]:
        """Cardinality through a sorting network over the membership Booleans."""
        set_expr, count_expr = constraint.args
        count = self.context.term(count_expr)
        if not isinstance(set_expr, Ident):
            size = len(set_elements(set_expr))  # type: ignore[arg-type]
            return [self.context.eq(count, self.context.int_term(size))]
        encoding = self.context.sets[set_expr.name]
        encoding.cardinality = count
        inputs = [self.context.atom(member) for member in encoding.membership]
        network = build_cardinality_network(inputs, len(inputs) - 1, self.context.pool)
        definitions = self.context.gate_definitions(network.gates)
        pairs = self.context.count_true(network.output_literals)
        pairs.append((-1, count))
        return definitions + [self.context.linear(pairs, "=", 0)]


def _logic(context: EncodingContext) -> str:
    if context.bv_mode:
        return "QF_BV"
    sorts = {term.sort for term in iter_dag(context.assertions)}
    sorts.update(context.declarations.values())
    if REAL in sorts:
        return "QF_LIRA" if INT in sorts else "QF_LRA"
    return "QF_LIA"


_DIRECTIONS = {
    GoalKind.MINIMIZE: Direction.MINIMIZE,
    GoalKind.MAXIMIZE: Direction.MAXIMIZE,
}


def encode_model(model: FznModel, config: Optional[EncodeConfig] = None) -> SmtScript:
    """Translate a validated FlatZinc model into an equisatisfiable OMT script.

    Every optimizing solve item becomes an objective; several objectives are
    combined independently or lexicographically per ``config.objective_mode``.

    Raises:
        ModeError: for floats or out-of-range domains in bv mode.
        UnsupportedConstraintError: for builtins without a linear encoding.
    """
    config = config or EncodeConfig()
    model = propagate_constants_and_aliases(model)
    if config.pb_rewrite:
        model = detect_and_rewrite_pb(model)
    width = None
    if config.int_mode == IntMode.BV:
        width = choose_bv_width(model, config.bv_width)
        logger.debug("Encoding integers as %d-bit vectors", width)

    context = EncodingContext(model, config, width)
    for var in model.vars:
        if not var.type.is_array:
            context.declare_var(var)
    encoder = _BuiltinEncoder(context)
    for constraint in model.constraints:
        for assertion in encoder.encode(constraint):
            context.assert_(assertion)

    combination = (
        Combination.LEXICOGRAPHIC
        if config.objective_mode == ObjectiveMode.LEXICOGRAPHIC
        else Combination.INDEPENDENT
    )
    objectives = tuple(
        Objective(
            _DIRECTIONS[goal.kind],
            context.term(goal.objective),
            combination,
            signed=context.bv_mode,
        )
        for goal in model.solve_items
        if goal.kind != GoalKind.SATISFY and goal.objective is not None
    )
    script = SmtScript(
        manager=context.manager,
        declarations=dict(context.declarations),
        assertions=tuple(context.assertions),
        objectives=objectives,
        logic=_logic(context),
        combination=combination,
    )
    logger.info(
        "Encoded %d variables and %d constraints as %d declarations and %d assertions",
        len(model.vars),
        len(model.constraints),
        len(script.declarations),
        len(script.assertions),
    )
    return script
