"""Shared state of one FlatZinc to SMT-LIB encoding.

:class:`EncodingContext` owns the term manager and the growing declaration
and assertion lists, translates FlatZinc expressions to terms and provides the
arithmetic helpers that differ between the linear-arithmetic and bit-vector
integer modes.
"""

from typing import Dict, List, Optional, Sequence, Tuple

import logging
from dataclasses import dataclass
from fractions import Fraction

from zinc_bridge.cardnet import Gate, Literal, PbEncoding, VariablePool
from zinc_bridge.errors import ModeError, ValidationError
from zinc_bridge.flatzinc.model import (
    ArrayLit,
    BaseType,
    BoolLit,
    Domain,
    Expr,
    FloatLit,
    FznModel,
    FznVarDecl,
    Ident,
    IntLit,
    RangeLit,
    SetDomain,
    SetLit,
    set_elements,
)
from zinc_bridge.fzn2omt.config import EncodeConfig, IntMode
from zinc_bridge.smtlib.sorts import BOOL, INT, REAL, Sort, bitvec
from zinc_bridge.smtlib.terms import Term, TermManager

logger = logging.getLogger(__name__)

Members = Dict[int, Term]


def signed_bits(value: int) -> int:
    """Bits of the smallest two's complement representation of ``value``.

    >>> signed_bits(127), signed_bits(128), signed_bits(-128), signed_bits(0)
    (8, 9, 8, 1)
    """
    if value < 0:
        value = -value - 1
    return value.bit_length() + 1


def membership_name(set_name: str, element: int) -> str:
    suffix = str(element) if element >= 0 else f"m{-element}"
    return f"{set_name}__in__{suffix}"


@dataclass
class SetEncoding:
    """One Boolean per domain element; ``cardinality`` is set once a count is linked."""

    elements: Tuple[int, ...]
    membership: Tuple[Term, ...]
    cardinality: Optional[Term] = None

    def members(self) -> Members:
        return dict(zip(self.elements, self.membership))


class EncodingContext:
    def __init__(
        self, model: FznModel, config: EncodeConfig, width: Optional[int] = None
    ) -> None:
        self.model = model
        self.config = config
        self.width = width
        self.manager = TermManager()
        self.declarations: Dict[str, Sort] = {}
        self.assertions: List[Term] = []
        self.variables: Dict[str, Term] = {}
        self.sets: Dict[str, SetEncoding] = {}
        self.pool = VariablePool(1)
        self._atoms: Dict[int, Term] = {}
        self._atom_ids: Dict[int, int] = {}
        self._names = {var.name for var in model.vars}

    @property
    def bv_mode(self) -> bool:
        return self.config.int_mode == IntMode.BV

    @property
    def int_sort(self) -> Sort:
        if self.bv_mode:
            assert self.width is not None
            return bitvec(self.width)
        return INT

    # declarations

    def fresh_name(self, base: str) -> str:
        name = base
        while name in self._names:
            name += "_"
        self._names.add(name)
        return name

    def declare(self, name: str, sort: Sort) -> Term:
        self.declarations[name] = sort
        return self.manager.var(name, sort)

    def assert_(self, term: Term) -> None:
        self.assertions.append(term)

    def declare_var(self, var: FznVarDecl) -> None:
        base = var.type.base
        if base == BaseType.SET:
            self.declare_set(var)
            return
        if base == BaseType.BOOL:
            sort = BOOL
        elif base == BaseType.INT:
            sort = self.int_sort
        elif self.bv_mode:
            raise ModeError(f"float variable '{var.name}' cannot be encoded in bv mode")
        else:
            sort = REAL
        term = self.declare(var.name, sort)
        self.variables[var.name] = term
        if var.domain is not None and base != BaseType.BOOL:
            self.assert_(self.domain_assertion(term, var.domain))

    def declare_set(self, var: FznVarDecl) -> None:
        if var.domain is None:
            raise ValidationError(
                f"set variable '{var.name}' needs a finite element domain"
            )
        elements = tuple(var.domain.values())
        membership = tuple(
            self.declare(self.fresh_name(membership_name(var.name, element)), BOOL)
            for element in elements
        )
        self.sets[var.name] = SetEncoding(elements, membership)

    def domain_assertion(self, term: Term, domain: Domain) -> Term:
        bounds = [
            self.le(self.number(domain.lo, term.sort), term),
            self.le(term, self.number(domain.hi, term.sort)),
        ]
        if isinstance(domain, SetDomain) and domain.size < domain.hi - domain.lo + 1:
            allowed = [self.eq(term, self.int_term(e)) for e in domain.elements]
            bounds.append(self.any_of(allowed))
        return self.manager.app("and", bounds)

    # expressions

    def number(self, value: object, sort: Sort) -> Term:
        if sort == REAL:
            return self.manager.real_const(Fraction(value))  # type: ignore[arg-type]
        return self.int_term(int(value))  # type: ignore[call-overload]

    def int_term(self, value: int, width: Optional[int] = None) -> Term:
        if not self.bv_mode:
            return self.manager.int_const(value)
        width = width or self.width
        assert width is not None
        if signed_bits(value) > width:
            raise ModeError(
                f"integer constant {value} does not fit in {width} signed bits"
            )
        return self.manager.const(value, bitvec(width))

    def term(self, expr: Expr) -> Term:
        if isinstance(expr, Ident):
            return self.variables[expr.name]
        if isinstance(expr, BoolLit):
            return self.manager.bool_const(expr.value)
        if isinstance(expr, IntLit):
            return self.int_term(expr.value)
        if isinstance(expr, FloatLit):
            if self.bv_mode:
                raise ModeError("float constants cannot be encoded in bv mode")
            return self.manager.real_const(expr.value)
        raise ValidationError(f"expected a scalar argument, got {expr!r}")

    def items(self, expr: Expr) -> List[Expr]:
        assert isinstance(expr, ArrayLit)
        return list(expr.items)

    def terms(self, expr: Expr) -> List[Term]:
        return [self.term(item) for item in self.items(expr)]

    def set_members(self, expr: Expr) -> Members:
        if isinstance(expr, Ident):
            return self.sets[expr.name].members()
        assert isinstance(expr, (SetLit, RangeLit))
        true = self.manager.bool_const(True)
        return {element: true for element in set_elements(expr)}

    def member(self, members: Members, element: int) -> Term:
        return members.get(element, self.manager.bool_const(False))

    # Boolean helpers

    def all_of(self, terms: Sequence[Term]) -> Term:
        if not terms:
            return self.manager.bool_const(True)
        return terms[0] if len(terms) == 1 else self.manager.app("and", terms)

    def any_of(self, terms: Sequence[Term]) -> Term:
        if not terms:
            return self.manager.bool_const(False)
        return terms[0] if len(terms) == 1 else self.manager.app("or", terms)

    def not_(self, term: Term) -> Term:
        return self.manager.app("not", [term])

    def eq(self, a: Term, b: Term) -> Term:
        return self.manager.app("=", [a, b])

    def ite(self, condition: Term, then: Term, otherwise: Term) -> Term:
        return self.manager.app("ite", [condition, then, otherwise])

    # integer and real arithmetic

    def le(self, a: Term, b: Term) -> Term:
        return self.manager.app("bvsle" if a.sort.is_bv else "<=", [a, b])

    def lt(self, a: Term, b: Term) -> Term:
        return self.manager.app("bvslt" if a.sort.is_bv else "<", [a, b])

    def extend(self, term: Term, extra: int) -> Term:
        if extra == 0:
            return term
        if term.is_const:
            width = term.sort.width
            assert width is not None and isinstance(term.value, int)
            signed = term.value
            if signed >= 2 ** (width - 1):
                signed -= 2 ** width
            return self.manager.const(signed, bitvec(width + extra))
        return self.manager.app("sign_extend", [term], [extra])

    def indicator(self, condition: Term) -> Term:
        """``1`` if ``condition`` holds, else ``0``, in the integer sort."""
        return self.ite(condition, self.int_term(1), self.int_term(0))

    def linear(
        self, pairs: Sequence[Tuple[int, Term]], relation: str, constant: object
    ) -> Term:
        """``sum(c * t) <relation> constant`` with ``relation`` one of ``= <= < !=``.

        In bv mode every term is sign-extended to a width where no partial sum
        can overflow.
        """
        pairs = [(c, t) for c, t in pairs if c != 0]
        if not pairs:
            holds = _compare(Fraction(0), relation, Fraction(constant))  # type: ignore
            return self.manager.bool_const(holds)
        if pairs[0][1].sort.is_bv:
            bound = int(constant)  # type: ignore[call-overload]
            return self._bv_linear(pairs, relation, bound)
        is_real = isinstance(constant, Fraction)
        is_real = is_real or any(t.sort == REAL for _, t in pairs)
        sort = REAL if is_real else INT
        scaled = [
            t if c == 1 else self.manager.app("*", [self.number(c, sort), t])
            for c, t in pairs
        ]
        total = scaled[0] if len(scaled) == 1 else self.manager.app("+", scaled)
        return self.relate(total, relation, self.number(constant, sort))

    def _bv_linear(
        self, pairs: Sequence[Tuple[int, Term]], relation: str, constant: int
    ) -> Term:
        width = pairs[0][1].sort.width
        assert width is not None
        magnitude = sum(abs(c) for c, _ in pairs) * 2 ** (width - 1) + abs(constant)
        wide = max(width, magnitude.bit_length() + 1)
        scaled = []
        for c, t in pairs:
            t = self.extend(t, wide - width)
            if c != 1:
                t = self.manager.app("bvmul", [self.int_term(c, wide), t])
            scaled.append(t)
        total = scaled[0] if len(scaled) == 1 else self.manager.app("bvadd", scaled)
        return self.relate(total, relation, self.int_term(constant, wide))

    def relate(self, left: Term, relation: str, right: Term) -> Term:
        if relation == "=":
            return self.eq(left, right)
        if relation == "!=":
            return self.not_(self.eq(left, right))
        if relation == "<=":
            return self.le(left, right)
        if relation == ">=":
            return self.le(right, left)
        if relation == "<":
            return self.lt(left, right)
        raise ValueError(f"unknown relation {relation!r}")

    # cardinality networks

    def atom(self, term: Term) -> Literal:
        var = self._atom_ids.get(term.id)
        if var is None:
            var = self.pool.fresh().var
            self._atom_ids[term.id] = var
            self._atoms[var] = term
        return Literal(var)

    def literal_term(self, literal: Literal) -> Term:
        term = self._atoms.get(literal.var)
        if term is None:
            name = self.fresh_name(f"zb_cn{literal.var}")
            term = self.declare(name, BOOL)
            self._atoms[literal.var] = term
        return term if literal.positive else self.not_(term)

    def gate_definitions(self, gates: Sequence[Gate]) -> List[Term]:
        definitions = []
        for gate in gates:
            inputs = [self.literal_term(gate.a), self.literal_term(gate.b)]
            output = self.literal_term(gate.output)
            definitions.append(self.eq(output, self.manager.app(gate.kind, inputs)))
        return definitions

    def count_true(self, outputs: Sequence[Literal]) -> List[Tuple[int, Term]]:
        return [(1, self.indicator(self.literal_term(o))) for o in outputs]

    def pb_assertions(self, encoding: PbEncoding) -> List[Term]:
        """A cardinality-network encoding as gate equalities followed by the bounds."""
        assertions = self.gate_definitions(encoding.gates)
        for clause in encoding.bound_clauses:
            literals = [self.literal_term(literal) for literal in clause]
            assertions.append(self.any_of(literals))
        link = encoding.link
        if link is not None:
            pairs = [
                (weight, indicator)
                for weight, outputs in link.groups
                for _, indicator in self.count_true(outputs)
            ]
            assertions.append(self.linear(pairs, link.relation, link.bound))
        return assertions


def _compare(total: Fraction, relation: str, constant: Fraction) -> bool:
    return {
        "=": total == constant,
        "!=": total != constant,
        "<=": total <= constant,
        ">=": total >= constant,
        "<": total < constant,
    }[relation]

