"""Hash-consed SMT-LIB terms.

All terms are built through a :class:`TermManager`. Building a structurally equal
term twice returns the same object, so identity (and ``Term.id``) coincides with
structural equality and a term graph is a DAG with maximal sharing.
"""

from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import logging
from fractions import Fraction

from zinc_bridge.errors import ScopeError, SortMismatchError, UnknownSymbolError
from zinc_bridge.smtlib.sorts import BOOL, INT, REAL, Sort, SortKind, bitvec

logger = logging.getLogger(__name__)

VAR = "var"
CONST = "const"

BOOL_OPS = frozenset({"not", "and", "or", "xor", "=>"})
COMPARISONS = frozenset({"<=", "<", ">=", ">"})
ARITHMETIC = frozenset({"+", "-", "*", "/", "div", "mod", "abs", "to_real"})
BV_NARY = frozenset({"bvadd", "bvmul", "bvand", "bvor", "bvxor"})
BV_BINARY = frozenset(
    {
        "bvsub",
        "bvudiv",
        "bvurem",
        "bvsdiv",
        "bvsrem",
        "bvsmod",
        "bvshl",
        "bvlshr",
        "bvashr",
        "bvnand",
        "bvnor",
        "bvxnor",
    }
)
BV_UNARY = frozenset({"bvneg", "bvnot"})
BV_COMPARISONS = frozenset(
    {"bvult", "bvule", "bvugt", "bvuge", "bvslt", "bvsle", "bvsgt", "bvsge"}
)
BV_INDEXED = frozenset(
    {"extract", "zero_extend", "sign_extend", "rotate_left", "rotate_right"}
)
BV_OTHER = frozenset({"concat", "bvcomp"})

OPERATORS = (
    BOOL_OPS
    | COMPARISONS
    | ARITHMETIC
    | BV_NARY
    | BV_BINARY
    | BV_UNARY
    | BV_COMPARISONS
    | BV_INDEXED
    | BV_OTHER
    | {"ite", "=", "distinct"}
)

_CHAINABLE = COMPARISONS | BV_COMPARISONS | {"="}

ConstValue = Union[bool, int, Fraction]


class Term:
    """A node of the term DAG. Compare terms by identity."""

    __slots__ = ("id", "op", "args", "sort", "value", "name", "indices")

    def __init__(
        self,
        id: int,
        op: str,
        args: Tuple["Term", ...],
        sort: Sort,
        value: Optional[ConstValue] = None,
        name: Optional[str] = None,
        indices: Tuple[int, ...] = (),
    ) -> None:
        self.id = id
        self.op = op
        self.args = args
        self.sort = sort
        self.value = value
        self.name = name
        self.indices = indices

    @property
    def is_var(self) -> bool:
        return self.op == VAR

    @property
    def is_const(self) -> bool:
        return self.op == CONST

    @property
    def is_leaf(self) -> bool:
        return not self.args

    def __hash__(self) -> int:
        return self.id

    def __repr__(self) -> str:
        if self.is_var:
            return f"Term#{self.id}({self.name}: {self.sort})"
        if self.is_const:
            return f"Term#{self.id}({self.value!r}: {self.sort})"
        children = ", ".join(f"#{arg.id}" for arg in self.args)
        return f"Term#{self.id}({self.op}{list(self.indices) or ''} {children})"


_Key = Tuple[str, Tuple[int, ...], Sort, object, Optional[str], Tuple[int, ...]]


class TermManager:
    """Single builder context for one script's terms."""

    def __init__(self) -> None:
        self._table: Dict[_Key, Term] = {}

    def __len__(self) -> int:
        return len(self._table)

    def _make(
        self,
        op: str,
        args: Tuple[Term, ...],
        sort: Sort,
        value: Optional[ConstValue] = None,
        name: Optional[str] = None,
        indices: Tuple[int, ...] = (),
    ) -> Term:
        # bool and int values must not collide (True == 1)
        tagged = (type(value).__name__, value) if value is not None else None
        key = (op, tuple(arg.id for arg in args), sort, tagged, name, indices)
        term = self._table.get(key)
        if term is None:
            term = Term(len(self._table), op, args, sort, value, name, indices)
            self._table[key] = term
        return term

    # leaves

    def var(self, name: str, sort: Sort) -> Term:
        return self._make(VAR, (), sort, name=name)

    def bool_const(self, value: bool) -> Term:
        return self._make(CONST, (), BOOL, value=bool(value))

    def int_const(self, value: int) -> Term:
        return self._make(CONST, (), INT, value=int(value))

    def real_const(self, value: Union[int, Fraction]) -> Term:
        return self._make(CONST, (), REAL, value=Fraction(value))

    def bv_const(self, value: int, width: int) -> Term:
        if not 0 <= value < 2 ** width:
            raise SortMismatchError(
                f"bit-vector constant {value} does not fit in {width} bits"
            )
        return self._make(CONST, (), bitvec(width), value=value)

    def const(self, value: ConstValue, sort: Sort) -> Term:
        if sort.is_bool:
            return self.bool_const(bool(value))
        if sort.kind == SortKind.INT:
            return self.int_const(int(value))
        if sort.kind == SortKind.REAL:
            return self.real_const(Fraction(value))
        assert sort.width is not None
        return self.bv_const(int(value) % 2 ** sort.width, sort.width)

    # applications

    def to_real(self, term: Term) -> Term:
        if term.sort.kind == SortKind.REAL:
            return term
        if term.sort.kind != SortKind.INT:
            raise SortMismatchError(f"cannot convert {term.sort} to Real")
        if term.is_const:
            return self.real_const(term.value)  # type: ignore[arg-type]
        return self._make("to_real", (term,), REAL)

    def _coerce_numeric(
        self, op: str, args: Sequence[Term]
    ) -> Tuple[Tuple[Term, ...], Sort]:
        for arg in args:
            if not arg.sort.is_arithmetic:
                raise SortMismatchError(
                    f"'{op}' expects Int or Real arguments, got {arg.sort}"
                )
        if any(arg.sort.kind == SortKind.REAL for arg in args):
            return tuple(self.to_real(arg) for arg in args), REAL
        return tuple(args), INT

    def _same_sort(
        self, op: str, args: Sequence[Term]
    ) -> Tuple[Tuple[Term, ...], Sort]:
        if all(arg.sort.is_arithmetic for arg in args):
            return self._coerce_numeric(op, args)
        sort = args[0].sort
        for arg in args[1:]:
            if arg.sort != sort:
                raise SortMismatchError(
                    f"'{op}' arguments have different sorts: {sort} and {arg.sort}"
                )
        return tuple(args), sort

    def _bv_width(self, op: str, args: Sequence[Term]) -> int:
        widths = {arg.sort.width for arg in args if arg.sort.is_bv}
        if len(widths) != 1 or not all(arg.sort.is_bv for arg in args):
            raise SortMismatchError(f"'{op}' expects bit-vectors of one width")
        return widths.pop()  # type: ignore[return-value]

    @staticmethod
    def _arity(
        op: str, args: Sequence[Term], low: int, high: Optional[int] = None
    ) -> None:
        count = len(args)
        if count < low or (high is not None and count > high):
            if high == low:
                expected = str(low)
            elif high is None:
                expected = f"at least {low}"
            else:
                expected = f"{low} to {high}"
            raise SortMismatchError(f"'{op}' expects {expected} arguments, got {count}")

    def app(self, op: str, args: Iterable[Term], indices: Sequence[int] = ()) -> Term:
        """Build ``(op args...)`` with sort checking, Int to Real coercion and folding.

        Chainable comparisons with more than two arguments become conjunctions,
        ``=>`` associates to the right and the n-ary bit-vector operators to the left.
        """
        args = tuple(args)
        indices = tuple(indices)
        if op not in OPERATORS:
            raise UnknownSymbolError(op, "operator")
        if op in _CHAINABLE and len(args) > 2:
            return self.app("and", [self.app(op, pair) for pair in zip(args, args[1:])])
        if op == "=>" and len(args) > 2:
            return self.app("=>", [args[0], self.app("=>", args[1:])])
        if op in BV_NARY | {"xor"} and len(args) > 2:
            return self.app(op, [self.app(op, args[:-1]), args[-1]])

        if op in BOOL_OPS:
            self._arity(op, args, 1, 1 if op == "not" else None)
            if op in ("xor", "=>"):
                self._arity(op, args, 2, 2)
            for arg in args:
                if not arg.sort.is_bool:
                    raise SortMismatchError(
                        f"'{op}' expects Bool arguments, got {arg.sort}"
                    )
            return self._make(op, args, BOOL)

        if op == "ite":
            self._arity(op, args, 3, 3)
            if not args[0].sort.is_bool:
                raise SortMismatchError("'ite' condition must be Bool")
            branches, sort = self._same_sort(op, args[1:])
            return self._make(op, (args[0],) + branches, sort)

        if op in ("=", "distinct"):
            self._arity(op, args, 2)
            args, _ = self._same_sort(op, args)
            return self._make(op, args, BOOL)

        if op in COMPARISONS:
            self._arity(op, args, 2, 2)
            args, _ = self._coerce_numeric(op, args)
            return self._make(op, args, BOOL)

        if op in ARITHMETIC:
            return self._arithmetic(op, args)

        return self._bitvector(op, args, indices)

    def _arithmetic(self, op: str, args: Tuple[Term, ...]) -> Term:
        if op == "to_real":
            self._arity(op, args, 1, 1)
            return self.to_real(args[0])
        if op in ("div", "mod"):
            self._arity(op, args, 2, 2)
            for arg in args:
                if arg.sort != INT:
                    raise SortMismatchError(
                        f"'{op}' expects Int arguments, got {arg.sort}"
                    )
            if not args[1].is_const:
                raise ScopeError(op, "non-linear term (non-constant divisor)")
            return self._make(op, args, INT)
        if op == "abs":
            self._arity(op, args, 1, 1)
            args, sort = self._coerce_numeric(op, args)
            return self._make(op, args, sort)
        if op == "/":
            self._arity(op, args, 2, 2)
            args = tuple(self.to_real(arg) for arg in args)
            numerator, denominator = args
            if not denominator.is_const:
                raise ScopeError(op, "non-linear term (non-constant divisor)")
            if numerator.is_const and denominator.value != 0:
                quotient = numerator.value / denominator.value  # type: ignore
                return self.real_const(quotient)
            return self._make(op, args, REAL)
        self._arity(op, args, 1)
        args, sort = self._coerce_numeric(op, args)
        if op == "-" and len(args) == 1 and args[0].is_const:
            return self.const(-args[0].value, sort)  # type: ignore[operator]
        if op == "*" and sum(not arg.is_const for arg in args) > 1:
            raise ScopeError(op, "non-linear term (product of variables)")
        return self._make(op, args, sort)

    def _bitvector(
        self, op: str, args: Tuple[Term, ...], indices: Tuple[int, ...]
    ) -> Term:
        if op in BV_INDEXED:
            self._arity(op, args, 1, 1)
            expected_indices = 2 if op == "extract" else 1
            if len(indices) != expected_indices:
                raise SortMismatchError(f"'{op}' expects {expected_indices} indices")
            width = self._bv_width(op, args)
            if op == "extract":
                high, low = indices
                if not 0 <= low <= high < width:
                    raise SortMismatchError(
                        f"extract indices {high} {low} out of range"
                    )
                return self._make(op, args, bitvec(high - low + 1), indices=indices)
            if indices[0] < 0:
                raise SortMismatchError(f"'{op}' index must be non-negative")
            grown = width + indices[0] if op.endswith("extend") else width
            return self._make(op, args, bitvec(grown), indices=indices)
        if indices:
            raise SortMismatchError(f"'{op}' takes no indices")
        if op == "concat":
            self._arity(op, args, 2, 2)
            for arg in args:
                if not arg.sort.is_bv:
                    raise SortMismatchError("'concat' expects bit-vectors")
            total = sum(arg.sort.width for arg in args)  # type: ignore[misc]
            return self._make(op, args, bitvec(total))
        if op in BV_UNARY:
            self._arity(op, args, 1, 1)
        elif op in BV_NARY:
            self._arity(op, args, 2)
        else:
            self._arity(op, args, 2, 2)
        width = self._bv_width(op, args)
        if op in BV_COMPARISONS:
            return self._make(op, args, BOOL)
        if op == "bvcomp":
            return self._make(op, args, bitvec(1))
        return self._make(op, args, bitvec(width))


def iter_dag(roots: Iterable[Term]) -> Iterator[Term]:
    """Yield every node reachable from ``roots`` once, children before parents."""
    seen = set()
    for root in roots:
        if root.id in seen:
            continue
        stack: List[Tuple[Term, bool]] = [(root, False)]
        while stack:
            term, expanded = stack.pop()
            if expanded:
                yield term
                continue
            if term.id in seen:
                continue
            seen.add(term.id)
            stack.append((term, True))
            for arg in reversed(term.args):
                if arg.id not in seen:
                    stack.append((arg, False))
