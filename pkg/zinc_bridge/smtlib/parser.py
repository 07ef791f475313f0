from typing import Dict, List, NamedTuple, Optional, Tuple

import logging
from fractions import Fraction

from zinc_bridge.errors import (
    ParseError,
    ScopeError,
    SortMismatchError,
    UnknownSymbolError,
    ValidationError,
)
from zinc_bridge.rational import parse_decimal
from zinc_bridge.smtlib.script import (
    DEFAULT_SOFT_GROUP,
    Combination,
    Direction,
    Objective,
    SmtScript,
    SoftAssertion,
)
from zinc_bridge.smtlib.sexpr import Atom, SExpr, SList, read_sexprs
from zinc_bridge.smtlib.sorts import BOOL, INT, REAL, Sort, bitvec
from zinc_bridge.smtlib.terms import OPERATORS, Term, TermManager

logger = logging.getLogger(__name__)

_OUT_OF_SCOPE_SORTS = frozenset(
    {
        "Array",
        "FloatingPoint",
        "Float16",
        "Float32",
        "Float64",
        "Float128",
        "RoundingMode",
        "String",
        "RegLan",
        "Seq",
        "Set",
    }
)
_OUT_OF_SCOPE_OPS = frozenset(
    {
        "select",
        "store",
        "to_int",
        "is_int",
        "bv2nat",
        "nat2bv",
        "int2bv",
        "bv2int",
        "to_fp",
    }
)
_OUT_OF_SCOPE_PREFIXES = ("fp.", "str.", "re.", "seq.", "set.")
_QUANTIFIERS = frozenset({"forall", "exists"})
_INERT_COMMANDS = frozenset(
    {
        "check-sat",
        "get-objectives",
        "get-model",
        "get-value",
        "get-assignment",
        "get-info",
        "get-option",
        "set-info",
        "echo",
        "exit",
    }
)
_UNSUPPORTED_COMMANDS = frozenset(
    {
        "declare-sort",
        "define-sort",
        "declare-datatype",
        "declare-datatypes",
        "define-fun-rec",
    }
)
_UNINTERPRETED = "uninterpreted functions with arguments are out of scope"


class _Macro(NamedTuple):
    params: Tuple[Tuple[str, Sort], ...]
    sort: Sort
    body: SExpr
    # term for parameterless definitions, expanded once
    term: Optional[Term]


class _Frame(NamedTuple):
    declarations: int
    assertions: int
    soft_assertions: int
    objectives: int
    macros: Dict[str, _Macro]


def _error(message: str, expr: SExpr) -> ParseError:
    return ParseError(message, expr.line, expr.column)


def _is_out_of_scope(name: str) -> bool:
    return name in _OUT_OF_SCOPE_OPS or name.startswith(_OUT_OF_SCOPE_PREFIXES)


def _named_with_list(args: Tuple[SExpr, ...], arity: int) -> bool:
    """``arity`` arguments, a symbol followed by a list."""
    return (
        len(args) == arity
        and isinstance(args[0], Atom)
        and isinstance(args[1], SList)
    )


class _ScriptBuilder:
    def __init__(self) -> None:
        self.manager = TermManager()
        self.declarations: Dict[str, Sort] = {}
        self.assertions: List[Term] = []
        self.soft_assertions: List[SoftAssertion] = []
        self.objectives: List[Objective] = []
        self.logic: Optional[str] = None
        self.combination = Combination.INDEPENDENT
        self.cost_symbols: Dict[str, Term] = {}
        self.inert: List[str] = []
        self.macros: Dict[str, _Macro] = {}
        self.frames: List[_Frame] = []

    # sorts

    def sort(self, expr: SExpr) -> Sort:
        if isinstance(expr, Atom):
            name = expr.symbol
            if name == "Bool":
                return BOOL
            if name == "Int":
                return INT
            if name == "Real":
                return REAL
            if name in _OUT_OF_SCOPE_SORTS:
                raise ScopeError(name, "out-of-scope sort")
            raise UnknownSymbolError(name, "sort", f"{expr.line}:{expr.column}")
        items = expr.items
        if (
            len(items) == 3
            and isinstance(items[0], Atom)
            and items[0].text == "_"
            and isinstance(items[1], Atom)
            and items[1].text == "BitVec"
            and isinstance(items[2], Atom)
            and items[2].kind == "numeral"
        ):
            width = int(items[2].text)
            if width < 1:
                raise _error("bit-vector width must be positive", items[2])
            return bitvec(width)
        head = items[0] if items else None
        if isinstance(head, Atom):
            name = head.symbol
            if name == "_" and len(items) > 1 and isinstance(items[1], Atom):
                name = items[1].symbol
            if name in _OUT_OF_SCOPE_SORTS:
                raise ScopeError(name, "out-of-scope sort")
        raise _error("malformed sort", expr)

    # terms

    def term(self, expr: SExpr, env: Dict[str, Term]) -> Term:
        if isinstance(expr, Atom):
            return self.atom(expr, env)
        items = expr.items
        if not items:
            raise _error("empty application", expr)
        head = items[0]
        if isinstance(head, SList):
            op, indices = self.indexed(head)
            args = [self.term(item, env) for item in items[1:]]
            return self.manager.app(op, args, indices)
        if not head.is_symbol:
            if head.text == "_":
                return self.indexed_constant(expr)
            raise _error(f"'{head.text}' cannot start an application", head)
        name = head.symbol
        if name == "_":
            return self.indexed_constant(expr)
        if name == "let":
            return self.let(expr, env)
        if name == "!":
            return self.annotated(expr, env)
        if name in _QUANTIFIERS:
            raise ScopeError(name, "quantifiers are out of scope")
        args = [self.term(item, env) for item in items[1:]]
        macro = self.macros.get(name)
        if macro is not None and name not in env:
            return self.expand(name, macro, args, expr)
        if name in OPERATORS:
            return self.manager.app(name, args)
        if _is_out_of_scope(name):
            raise ScopeError(name)
        if name in self.declarations or name in env:
            raise ScopeError(name, _UNINTERPRETED)
        raise UnknownSymbolError(name, "operator", f"{head.line}:{head.column}")

    def atom(self, atom: Atom, env: Dict[str, Term]) -> Term:
        if atom.kind == "numeral":
            return self.manager.int_const(int(atom.text))
        if atom.kind == "decimal":
            return self.manager.real_const(parse_decimal(atom.text))
        if atom.kind == "binary":
            return self.manager.bv_const(int(atom.text[2:], 2), len(atom.text) - 2)
        if atom.kind == "hex":
            width = 4 * (len(atom.text) - 2)
            return self.manager.bv_const(int(atom.text[2:], 16), width)
        if not atom.is_symbol:
            raise _error(f"unexpected '{atom.text}' in term", atom)
        name = atom.symbol
        if name in env:
            return env[name]
        if name in ("true", "false") and atom.kind == "symbol":
            return self.manager.bool_const(name == "true")
        macro = self.macros.get(name)
        if macro is not None:
            return self.expand(name, macro, [], atom)
        if name in self.declarations:
            return self.manager.var(name, self.declarations[name])
        if any(soft.group == name for soft in self.soft_assertions):
            return self.cost_symbol(name)
        if _is_out_of_scope(name):
            raise ScopeError(name)
        raise UnknownSymbolError(name, "symbol", f"{atom.line}:{atom.column}")

    def cost_symbol(self, group: str) -> Term:
        weights = [soft.weight for soft in self.soft_assertions if soft.group == group]
        sort = INT if all(weight.denominator == 1 for weight in weights) else REAL
        symbol = self.manager.var(group, sort)
        previous = self.cost_symbols.get(group)
        if previous is not None and previous is not symbol:
            raise ValidationError(
                f"soft group '{group}' changed sort after being used as a term"
            )
        self.cost_symbols[group] = symbol
        return symbol

    def indexed(self, expr: SList) -> Tuple[str, Tuple[int, ...]]:
        items = expr.items
        if len(items) < 3 or not isinstance(items[0], Atom) or items[0].text != "_":
            raise _error("malformed indexed operator", expr)
        op = items[1]
        if not isinstance(op, Atom) or not op.is_symbol:
            raise _error("malformed indexed operator", expr)
        indices = []
        for item in items[2:]:
            if not isinstance(item, Atom) or item.kind != "numeral":
                raise _error("operator indices must be numerals", item)
            indices.append(int(item.text))
        if _is_out_of_scope(op.symbol):
            raise ScopeError(op.symbol)
        return op.symbol, tuple(indices)

    def indexed_constant(self, expr: SList) -> Term:
        items = expr.items
        if (
            len(items) == 3
            and isinstance(items[1], Atom)
            and items[1].text.startswith("bv")
            and items[1].text[2:].isdigit()
            and isinstance(items[2], Atom)
            and items[2].kind == "numeral"
        ):
            width = int(items[2].text)
            value = int(items[1].text[2:])
            if width < 1:
                raise _error("bit-vector width must be positive", items[2])
            return self.manager.bv_const(value % 2 ** width, width)
        raise _error("malformed indexed constant", expr)

    def let(self, expr: SList, env: Dict[str, Term]) -> Term:
        if len(expr.items) != 3 or not isinstance(expr.items[1], SList):
            raise _error("malformed let", expr)
        bound = dict(env)
        for binding in expr.items[1].items:
            if (
                not isinstance(binding, SList)
                or len(binding.items) != 2
                or not isinstance(binding.items[0], Atom)
            ):
                raise _error("malformed let binding", binding)
            # bindings are parallel: evaluate in the outer environment
            bound[binding.items[0].symbol] = self.term(binding.items[1], env)
        return self.term(expr.items[2], bound)

    def annotated(self, expr: SList, env: Dict[str, Term]) -> Term:
        if len(expr.items) < 2:
            raise _error("malformed annotation", expr)
        term = self.term(expr.items[1], env)
        attributes = self.attributes(expr.items[2:])
        named = attributes.get(":named")
        if named is not None:
            if not isinstance(named, Atom) or not named.is_symbol:
                raise _error(":named expects a symbol", expr)
            self.define(named.symbol, _Macro((), term.sort, expr.items[1], term), named)
        return term

    def expand(self, name: str, macro: _Macro, args: List[Term], expr: SExpr) -> Term:
        if len(args) != len(macro.params):
            raise SortMismatchError(
                f"'{name}' expects {len(macro.params)} arguments, got {len(args)}"
            )
        if macro.term is not None:
            return macro.term
        env: Dict[str, Term] = {}
        for (param, sort), arg in zip(macro.params, args):
            env[param] = self.coerce(arg, sort, f"argument '{param}' of '{name}'")
        return self.coerce(self.term(macro.body, env), macro.sort, f"body of '{name}'")

    def coerce(self, term: Term, sort: Sort, what: str) -> Term:
        if term.sort == sort:
            return term
        if term.sort == INT and sort == REAL:
            return self.manager.to_real(term)
        raise SortMismatchError(f"{what} has sort {term.sort}, expected {sort}")

    def attributes(self, items: Tuple[SExpr, ...]) -> Dict[str, Optional[SExpr]]:
        attributes: Dict[str, Optional[SExpr]] = {}
        position = 0
        while position < len(items):
            key = items[position]
            if not isinstance(key, Atom) or key.kind != "keyword":
                raise _error("expected an attribute keyword", key)
            value: Optional[SExpr] = None
            following = items[position + 1] if position + 1 < len(items) else None
            if following is not None and not (
                isinstance(following, Atom) and following.kind == "keyword"
            ):
                value = following
                position += 1
            attributes[key.text] = value
            position += 1
        return attributes

    def define(self, name: str, macro: _Macro, where: SExpr) -> None:
        if name in self.declarations or name in self.macros:
            raise ValidationError(
                f"{where.line}:{where.column}: symbol '{name}' already defined"
            )
        self.macros[name] = macro

    # commands

    def command(self, expr: SExpr) -> None:
        if (
            not isinstance(expr, SList)
            or not expr.items
            or not isinstance(expr.items[0], Atom)
        ):
            raise _error("expected a command", expr)
        name = expr.items[0].text
        args = expr.items[1:]
        handler = getattr(self, "cmd_" + name.replace("-", "_"), None)
        if handler is not None:
            handler(expr, args)
        elif name in _INERT_COMMANDS:
            self.inert.append(name)
        elif name in _UNSUPPORTED_COMMANDS:
            raise ScopeError(name, "unsupported command")
        else:
            raise _error(f"unknown command '{name}'", expr)

    def cmd_set_logic(self, expr: SList, args: Tuple[SExpr, ...]) -> None:
        if len(args) != 1 or not isinstance(args[0], Atom):
            raise _error("set-logic expects a symbol", expr)
        self.logic = args[0].symbol

    def cmd_set_option(self, expr: SList, args: Tuple[SExpr, ...]) -> None:
        if not args or not isinstance(args[0], Atom) or args[0].kind != "keyword":
            raise _error("set-option expects a keyword", expr)
        if args[0].text == ":opt.priority":
            value = args[1] if len(args) > 1 else None
            text = value.text.strip('"') if isinstance(value, Atom) else None
            if text not in ("lex", "box"):
                raise _error("opt.priority must be 'lex' or 'box'", expr)
            self.combination = Combination(text)
        else:
            self.inert.append("set-option")

    def declare(self, name: Atom, sort: Sort) -> None:
        symbol = name.symbol
        if symbol in self.declarations or symbol in self.macros:
            raise ValidationError(
                f"{name.line}:{name.column}: symbol '{symbol}' declared twice"
            )
        self.declarations[symbol] = sort

    def cmd_declare_const(self, expr: SList, args: Tuple[SExpr, ...]) -> None:
        if len(args) != 2 or not isinstance(args[0], Atom):
            raise _error("declare-const expects a name and a sort", expr)
        self.declare(args[0], self.sort(args[1]))

    def cmd_declare_fun(self, expr: SList, args: Tuple[SExpr, ...]) -> None:
        if not _named_with_list(args, 3):
            raise _error("declare-fun expects a name, argument sorts and a sort", expr)
        if args[1].items:
            raise ScopeError(args[0].symbol, _UNINTERPRETED)
        self.declare(args[0], self.sort(args[2]))

    def cmd_define_fun(self, expr: SList, args: Tuple[SExpr, ...]) -> None:
        if not _named_with_list(args, 4):
            raise _error(
                "define-fun expects a name, parameters, a sort and a body", expr
            )
        params = []
        for param in args[1].items:
            if (
                not isinstance(param, SList)
                or len(param.items) != 2
                or not isinstance(param.items[0], Atom)
            ):
                raise _error("malformed parameter", param)
            params.append((param.items[0].symbol, self.sort(param.items[1])))
        sort = self.sort(args[2])
        term = None
        if not params:
            what = f"body of '{args[0].symbol}'"
            term = self.coerce(self.term(args[3], {}), sort, what)
        self.define(args[0].symbol, _Macro(tuple(params), sort, args[3], term), args[0])

    def cmd_assert(self, expr: SList, args: Tuple[SExpr, ...]) -> None:
        if len(args) != 1:
            raise _error("assert expects one term", expr)
        term = self.term(args[0], {})
        if not term.sort.is_bool:
            raise SortMismatchError(
                f"{expr.line}:{expr.column}: asserted term is not Bool"
            )
        self.assertions.append(term)

    def constant_value(self, expr: SExpr, what: str) -> Fraction:
        term = self.term(expr, {})
        if not term.is_const or not term.sort.is_arithmetic:
            raise _error(f"{what} must be a numeric constant", expr)
        return Fraction(term.value)  # type: ignore[arg-type]

    def cmd_assert_soft(self, expr: SList, args: Tuple[SExpr, ...]) -> None:
        if not args:
            raise _error("assert-soft expects a term", expr)
        term = self.term(args[0], {})
        if not term.sort.is_bool:
            raise SortMismatchError(
                f"{expr.line}:{expr.column}: soft assertion is not Bool"
            )
        attributes = self.attributes(args[1:])
        weight = Fraction(1)
        for key in (":weight", ":dweight"):
            value = attributes.get(key)
            if value is not None:
                weight = self.constant_value(value, "soft weight")
        if weight <= 0:
            raise ValidationError(
                f"{expr.line}:{expr.column}: soft weights must be positive"
            )
        group = DEFAULT_SOFT_GROUP
        if attributes.get(":id") is not None:
            group_atom = attributes[":id"]
            if not isinstance(group_atom, Atom):
                raise _error(":id expects a symbol", expr)
            group = group_atom.symbol
        if group in self.cost_symbols:
            raise ValidationError(
                f"{expr.line}:{expr.column}: soft group '{group}' "
                "extended after being used as a term"
            )
        self.soft_assertions.append(SoftAssertion(term, weight, group))

    def objective(
        self, direction: Direction, expr: SList, args: Tuple[SExpr, ...]
    ) -> None:
        if not args:
            raise _error(f"{direction.value} expects a term", expr)
        term = self.term(args[0], {})
        if term.sort.is_bool:
            raise SortMismatchError(
                f"{expr.line}:{expr.column}: objective must be numeric"
            )
        attributes = self.attributes(args[1:])
        bounds: Dict[str, Optional[Term]] = {}
        for key in (":lower", ":upper"):
            value = attributes.get(key)
            bounds[key] = None
            if value is not None:
                bound = self.term(value, {})
                if term.sort == REAL and bound.sort == INT:
                    bound = self.manager.to_real(bound)
                if bound.sort != term.sort or not bound.is_const:
                    raise _error(
                        f"{key} must be a constant of the objective's sort", value
                    )
                bounds[key] = bound
        identifier = attributes.get(":id")
        if identifier is not None and not isinstance(identifier, Atom):
            raise _error(":id expects a symbol", expr)
        if ":signed" in attributes and not term.sort.is_bv:
            raise _error(":signed applies to bit-vector objectives only", expr)
        self.objectives.append(
            Objective(
                direction,
                term,
                id=identifier.symbol if isinstance(identifier, Atom) else None,
                lower=bounds[":lower"],
                upper=bounds[":upper"],
                signed=":signed" in attributes,
            )
        )

    def cmd_minimize(self, expr: SList, args: Tuple[SExpr, ...]) -> None:
        self.objective(Direction.MINIMIZE, expr, args)

    def cmd_maximize(self, expr: SList, args: Tuple[SExpr, ...]) -> None:
        self.objective(Direction.MAXIMIZE, expr, args)

    def levels(self, expr: SList, args: Tuple[SExpr, ...]) -> int:
        if not args:
            return 1
        if len(args) != 1 or not isinstance(args[0], Atom) or args[0].kind != "numeral":
            raise _error("expected a numeral", expr)
        return int(args[0].text)

    def cmd_push(self, expr: SList, args: Tuple[SExpr, ...]) -> None:
        for _ in range(self.levels(expr, args)):
            self.frames.append(
                _Frame(
                    len(self.declarations),
                    len(self.assertions),
                    len(self.soft_assertions),
                    len(self.objectives),
                    dict(self.macros),
                )
            )

    def cmd_pop(self, expr: SList, args: Tuple[SExpr, ...]) -> None:
        for _ in range(self.levels(expr, args)):
            if not self.frames:
                raise _error("pop without matching push", expr)
            frame = self.frames.pop()
            kept = list(self.declarations.items())[: frame.declarations]
            self.declarations = dict(kept)
            del self.assertions[frame.assertions :]
            del self.soft_assertions[frame.soft_assertions :]
            del self.objectives[frame.objectives :]
            self.macros = frame.macros
            self.cost_symbols = {
                group: symbol
                for group, symbol in self.cost_symbols.items()
                if any(soft.group == group for soft in self.soft_assertions)
            }

    def build(self) -> SmtScript:
        script = SmtScript(
            manager=self.manager,
            declarations=dict(self.declarations),
            assertions=tuple(self.assertions),
            soft_assertions=tuple(self.soft_assertions),
            objectives=tuple(self.objectives),
            logic=self.logic,
            cost_symbols=dict(self.cost_symbols),
            inert_commands=tuple(self.inert),
        )
        return script.with_combination(self.combination)


def parse_smt2(text: str) -> SmtScript:
    """Parse an optimization-extended SMT-LIB v2 script.

    ``let`` and ``define-fun`` are expanded into the hash-consed DAG, so the
    result is binder free.

    Raises:
        ParseError: on malformed input, with line and column.
        ScopeError: for theories, sorts or operators outside Bool, LIRA and BV.
        UnknownSymbolError: for undeclared symbols and unknown operators.
        SortMismatchError: for ill-sorted terms.
    """
    builder = _ScriptBuilder()
    for expr in read_sexprs(text):
        builder.command(expr)
    script = builder.build()
    logger.debug(
        "Parsed SMT-LIB script with %d declarations, %d assertions and %d objectives",
        len(script.declarations),
        len(script.assertions),
        len(script.objectives),
    )
    return script
