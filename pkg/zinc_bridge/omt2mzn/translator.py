"""SMT-LIB/OMT scripts to MiniZinc.

Shared subterms become labeled ``var`` definitions, top-level conjuncts become
separate constraints, and each objective gets a model of its own unless the
script asks for a lexicographic combination, which is emitted as a single
model driven by a MiniSearch combinator.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

import enum
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel, validator

from zinc_bridge.errors import ScopeError, ValidationError
from zinc_bridge.minizinc.ast import (
    MznArray,
    MznBaseType,
    MznBinary,
    MznBool,
    MznCall,
    MznConstraint,
    MznExpr,
    MznFloat,
    MznIdent,
    MznIf,
    MznInclude,
    MznInt,
    MznItem,
    MznModel,
    MznSolve,
    MznSolveKind,
    MznUnary,
    MznVarDecl,
    MznVerbatim,
    conjunction,
    node_count,
)
from zinc_bridge.minizinc.printer import print_mzn
from zinc_bridge.omt2mzn.bitvector import (
    check_width,
    pairwise,
    to_signed,
    translate_bv_operation,
)
from zinc_bridge.omt2mzn.labels import LabelMode, LabelPlan, daggify
from zinc_bridge.omt2mzn.maxsmt import maxsmt_to_pb
from zinc_bridge.rational import as_fraction
from zinc_bridge.smtlib.script import Combination, Objective, SmtScript
from zinc_bridge.smtlib.sorts import Sort, SortKind
from zinc_bridge.smtlib.terms import Term

logger = logging.getLogger(__name__)

INT_CAP = 2 ** 31
DEFAULT_FLOAT_DOMAIN = Fraction(3402823 * 10 ** 32)
OBJECTIVES_ARRAY = "zb_objs"
LEX_SEARCH = "zb_lex_search"
MANIFEST_FILE = "manifest.json"

_IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_KEYWORDS = frozenset(
    """ann annotation any array bool case constraint default diff div else elseif endif
    enum false float function if in include int intersect let list maximize minimize mod
    not of op opt output par predicate record satisfy set solve string subset superset
    symdiff test then true tuple type union var where xor""".split()
)
_RESERVED_PREFIX = "zb_"

_LEX_FUNCTIONS = """\
function ann: {search}(array[int] of var {base}: objs, array[int] of bool: minimize) =
  repeat(if next() then commit() /\\ print() /\\
    post(zb_lex_improves(objs, [sol(objs[i]) | i in index_set(objs)], minimize))
  else break endif);
predicate zb_lex_improves(array[int] of var {base}: objs, array[int] of {base}: best,
    array[int] of bool: minimize) =
  exists(i in index_set(objs))(
    forall(j in index_set(objs) where j < i)(objs[j] = best[j]) /\\
    if minimize[i] then objs[i] < best[i] else objs[i] > best[i] endif);"""


class IntDomainMode(str, enum.Enum):
    UNBOUNDED = "unbounded"
    CAPPED = "capped"


class BoundsPolicy(BaseModel):
    """Domains given to declared variables.

    Real variables always get ``-float_domain..float_domain``. Int variables stay
    unbounded, with explicit bound atoms kept as constraints, unless
    ``int_domain_mode`` is ``capped`` (``-2^31..2^31``).
    """

    float_domain: Fraction = DEFAULT_FLOAT_DOMAIN
    int_domain_mode: IntDomainMode = IntDomainMode.UNBOUNDED

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True

    @validator("float_domain", pre=True)
    def _exact(cls, value: Any) -> Fraction:
        if isinstance(value, float):
            value = repr(value)
        return as_fraction(value)

    @validator("float_domain")
    def _positive(cls, value: Fraction) -> Fraction:
        if value <= 0:
            raise ValueError("float_domain must be positive")
        return value


class OutputKind(str, enum.Enum):
    SINGLE = "single"
    INDEPENDENT = "independent"
    LEXICOGRAPHIC = "lexicographic"


class ManifestEntry(BaseModel):
    file: str
    objective: str
    direction: str


class Manifest(BaseModel):
    kind: OutputKind
    models: List[ManifestEntry]


@dataclass(frozen=True)
class MznOutput:
    """The MiniZinc document(s) for one script.

    ``names`` maps every SMT-LIB symbol to its MiniZinc identifier.
    """

    models: Tuple[MznModel, ...]
    kind: OutputKind
    objectives: Tuple[Tuple[str, str], ...] = ()
    names: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.models:
            raise ValueError("a translation has at least one model")
        one_each = len(self.models) == len(self.objectives)
        if self.kind == OutputKind.INDEPENDENT and not one_each:
            raise ValueError("independent output needs one model per objective")
        if self.kind == OutputKind.LEXICOGRAPHIC and len(self.models) != 1:
            raise ValueError("lexicographic output is a single model")

    def file_names(self, stem: str) -> List[str]:
        if self.kind == OutputKind.INDEPENDENT:
            return [f"{stem}_{index}.mzn" for index in range(1, len(self.models) + 1)]
        return [f"{stem}.mzn"]

    def manifest(self, stem: str) -> Manifest:
        entries = [
            ManifestEntry(file=file, objective=name, direction=direction)
            for file, (name, direction) in zip(self.file_names(stem), self.objectives)
        ]
        return Manifest(kind=self.kind, models=entries)

    def documents(self) -> List[str]:
        return [print_mzn(model) for model in self.models]

    def write(self, directory: Path, stem: str) -> List[Path]:
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for file, text in zip(self.file_names(stem), self.documents()):
            path = directory / file
            path.write_text(text, encoding="utf-8")
            paths.append(path)
        if self.kind == OutputKind.INDEPENDENT:
            path = directory / MANIFEST_FILE
            path.write_text(self.manifest(stem).json(indent=2), encoding="utf-8")
            paths.append(path)
        return paths


def _items_size(items: Sequence[MznItem]) -> int:
    size = 0
    for item in items:
        if isinstance(item, MznVarDecl) and item.value is not None:
            size += node_count(item.value)
        elif isinstance(item, MznConstraint):
            size += node_count(item.expr)
        elif isinstance(item, MznSolve) and item.expr is not None:
            size += node_count(item.expr)
    return size


def emission_size(output: MznOutput) -> int:
    """Expression nodes over every definition, constraint and objective emitted."""
    return sum(_items_size(model.items) for model in output.models)


def _base(sort: Sort) -> MznBaseType:
    if sort.is_bool:
        return MznBaseType.BOOL
    if sort.kind == SortKind.REAL:
        return MznBaseType.FLOAT
    return MznBaseType.INT


def _fold(op: str, args: Sequence[MznExpr]) -> MznExpr:
    result = args[0]
    for arg in args[1:]:
        result = MznBinary(op, result, arg)
    return result


class _Translator:
    def __init__(
        self, script: SmtScript, policy: BoundsPolicy, plan: LabelPlan
    ) -> None:
        self.script = script
        self.policy = policy
        self.plan = plan
        self.cache: Dict[int, MznExpr] = {}
        self.names = self.identifiers(script.declarations)

    @staticmethod
    def identifiers(declarations: Dict[str, Sort]) -> Dict[str, str]:
        names = {}
        for index, name in enumerate(declarations):
            valid = _IDENTIFIER.fullmatch(name) and name not in _KEYWORDS
            if not valid or name.startswith(_RESERVED_PREFIX):
                names[name] = f"{_RESERVED_PREFIX}v{index}"
            else:
                names[name] = name
        return names

    # terms

    def expr(self, term: Term) -> MznExpr:
        if term in self.plan:
            return MznIdent(self.plan.label(term))
        return self.inline(term)

    def inline(self, term: Term) -> MznExpr:
        cached = self.cache.get(term.id)
        if cached is None:
            cached = self.cache[term.id] = self.compute(term)
        return cached

    def constant(self, term: Term) -> MznExpr:
        value = term.value
        if term.sort.is_bool:
            return MznBool(bool(value))
        if term.sort.kind == SortKind.REAL:
            return MznFloat(Fraction(value))  # type: ignore[arg-type]
        return MznInt(int(value))  # type: ignore[arg-type]

    def compute(self, term: Term) -> MznExpr:
        if term.is_var:
            assert term.name is not None
            return MznIdent(self.names[term.name])
        if term.is_const:
            return self.constant(term)
        op = term.op
        args = [self.expr(arg) for arg in term.args]
        if op == "ite":
            return MznIf(args[0], args[1], args[2])
        if op in ("=", "distinct"):
            return pairwise(op, args)
        if term.args[0].sort.is_bv:
            return translate_bv_operation(term, args)
        if op == "not":
            return MznUnary("not", args[0])
        if op in ("and", "or", "xor", "=>"):
            symbol = {"and": "/\\", "or": "\\/", "xor": "xor", "=>": "->"}[op]
            return _fold(symbol, args)
        if op == "/" and term.args[1].value == 0:
            return MznFloat(Fraction(0))
        if op in ("<=", "<", ">=", ">", "+", "*", "/"):
            return _fold(op, args)
        if op == "-":
            return MznUnary("-", args[0]) if len(args) == 1 else _fold("-", args)
        if op in ("div", "mod"):
            divisor = term.args[1].value
            return self.euclidean(op, args[0], divisor)  # type: ignore[arg-type]
        if op == "abs":
            return MznCall("abs", (args[0],))
        if op == "to_real":
            return MznCall("int2float", (args[0],))
        raise ScopeError(op, "operator without a MiniZinc counterpart")

    @staticmethod
    def euclidean(op: str, x: MznExpr, divisor: int) -> MznExpr:
        """SMT-LIB ``div``/``mod`` by a constant via truncating MiniZinc ones."""
        if divisor == 0:
            return MznInt(0)
        magnitude = MznInt(abs(divisor))
        remainder = MznBinary(
            "mod", MznBinary("+", MznBinary("mod", x, magnitude), magnitude), magnitude
        )
        if op == "mod":
            return remainder
        return MznBinary("div", MznBinary("-", x, remainder), MznInt(divisor))

    # items

    def declarations(self) -> List[MznItem]:
        items: List[MznItem] = []
        for name, sort in self.script.declarations.items():
            items.append(self.declaration(self.names[name], sort))
        for term in self.plan.order:
            decl = self.declaration(self.plan.label(term), term.sort, label=True)
            items.append(
                MznVarDecl(
                    decl.name, decl.base, decl.lo, decl.hi, value=self.inline(term)
                )
            )
        return items

    def declaration(self, name: str, sort: Sort, label: bool = False) -> MznVarDecl:
        if sort.is_bv:
            assert sort.width is not None
            check_width(sort.width)
            top = MznInt(2 ** sort.width - 1)
            return MznVarDecl(name, MznBaseType.INT, MznInt(0), top)
        if label or sort.is_bool:
            return MznVarDecl(name, _base(sort))
        if sort.kind == SortKind.REAL:
            bound = self.policy.float_domain
            lo, hi = MznFloat(-bound), MznFloat(bound)
            return MznVarDecl(name, MznBaseType.FLOAT, lo, hi)
        if self.policy.int_domain_mode == IntDomainMode.CAPPED:
            return MznVarDecl(name, MznBaseType.INT, MznInt(-INT_CAP), MznInt(INT_CAP))
        return MznVarDecl(name, MznBaseType.INT)

    def constraints(self) -> List[MznItem]:
        items: List[MznItem] = []
        for term in self.plan.conjuncts:
            if term.is_const and term.value is True:
                continue
            items.append(MznConstraint(self.expr(term)))
        return items

    def objective(self, objective: Objective) -> Tuple[MznExpr, List[MznItem]]:
        """The objective expression and constraints from ``:lower``/``:upper``."""
        term = objective.term
        expr = self.expr(term)
        if objective.signed:
            assert term.sort.width is not None
            expr = to_signed(expr, term.sort.width)
        bounds: List[MznItem] = []
        for bound, op in ((objective.lower, ">="), (objective.upper, "<=")):
            if bound is None:
                continue
            value = self.expr(bound)
            if objective.signed:
                value = to_signed(value, term.sort.width)  # type: ignore[arg-type]
            bounds.append(MznConstraint(MznBinary(op, expr, value)))
        return expr, bounds


def _solve(objective: Objective, expr: MznExpr) -> MznSolve:
    kind = MznSolveKind.MINIMIZE if objective.is_minimize else MznSolveKind.MAXIMIZE
    return MznSolve(kind, expr)


def _objective_names(objectives: Sequence[Objective]) -> Tuple[Tuple[str, str], ...]:
    return tuple(
        (objective.id or f"objective_{index}", objective.direction.value)
        for index, objective in enumerate(objectives, start=1)
    )


def _lexicographic(
    common: List[MznItem], translated: List[Tuple[Objective, MznExpr]]
) -> MznModel:
    floats = any(
        objective.term.sort.kind == SortKind.REAL for objective, _ in translated
    )
    base = MznBaseType.FLOAT if floats else MznBaseType.INT
    values = []
    for objective, expr in translated:
        if floats and objective.term.sort.kind != SortKind.REAL:
            expr = MznCall("int2float", (expr,))
        values.append(expr)
    objectives = MznVarDecl(
        OBJECTIVES_ARRAY, base, value=MznArray(tuple(values)), array_length=len(values)
    )
    senses = MznArray(
        tuple(MznBool(objective.is_minimize) for objective, _ in translated)
    )
    search = MznCall(LEX_SEARCH, (MznIdent(OBJECTIVES_ARRAY), senses))
    items: List[MznItem] = [MznInclude("minisearch.mzn")]
    items.extend(common)
    items.append(objectives)
    items.append(MznVerbatim(_LEX_FUNCTIONS.format(search=LEX_SEARCH, base=base.value)))
    items.append(MznSolve(MznSolveKind.SEARCH, search))
    return MznModel(tuple(items))


def translate(
    script: SmtScript,
    policy: Optional[BoundsPolicy] = None,
    label_mode: LabelMode = LabelMode.TWO_FATHERS,
    lexicographic: Optional[bool] = None,
) -> MznOutput:
    """Translate ``script`` into one or more MiniZinc models.

    Soft assertions are first turned into minimized costs. Several objectives
    give one model per objective, or a single MiniSearch model when
    ``lexicographic`` is set (by default, when the script sets
    ``:opt.priority lex``).

    Raises:
        ScopeError: for an operator with no MiniZinc counterpart.
        WidthError: for bit-vectors of width 64 or more.
        ValidationError: when a lexicographic model is requested for fewer
            than two objectives.
    """
    policy = policy or BoundsPolicy()
    script = maxsmt_to_pb(script)
    objectives = list(script.objectives)
    if lexicographic is None:
        lexicographic = script.combination == Combination.LEXICOGRAPHIC
        lexicographic = lexicographic and len(objectives) > 1
    elif lexicographic and len(objectives) < 2:
        raise ValidationError(
            "a lexicographic model needs at least two objectives, "
            f"got {len(objectives)}"
        )

    translator = _Translator(script, policy, daggify(script, label_mode))
    common = translator.declarations() + translator.constraints()
    translated = []
    for objective in objectives:
        expr, bounds = translator.objective(objective)
        translated.append((objective, expr, bounds))
    names = _objective_names(objectives)

    if not objectives:
        models: Tuple[MznModel, ...] = (
            MznModel(tuple(common) + (MznSolve(MznSolveKind.SATISFY),)),
        )
        kind = OutputKind.SINGLE
    elif lexicographic:
        bounds = [item for _, _, extra in translated for item in extra]
        model = _lexicographic(common + bounds, [(o, e) for o, e, _ in translated])
        models, kind = (model,), OutputKind.LEXICOGRAPHIC
    else:
        models = tuple(
            MznModel(tuple(common) + tuple(extra) + (_solve(objective, expr),))
            for objective, expr, extra in translated
        )
        kind = OutputKind.INDEPENDENT if len(models) > 1 else OutputKind.SINGLE

    output = MznOutput(models, kind, names, translator.names)
    logger.info(
        "Translated %d assertions into %d MiniZinc model(s) with %d labels",
        len(script.assertions),
        len(models),
        len(translator.plan),
    )
    return output
