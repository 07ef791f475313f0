from typing import Optional

import itertools
import random

import pytest

from zinc_bridge.errors import ParseError, TokenizeError
from zinc_bridge.flatzinc.model import IntLit
from zinc_bridge.minizinc import (
    MznArray,
    MznBinary,
    MznBool,
    MznCall,
    MznConstraint,
    MznExpr,
    MznIdent,
    MznIf,
    MznInt,
    MznModel,
    MznSolve,
    MznSolveKind,
    MznUnary,
    MznVarDecl,
    Undefined,
    evaluate,
    flatten,
    node_count,
    parse_mzn,
    print_expr,
    print_mzn,
)
from zinc_bridge.minizinc.ast import MznBaseType
from zinc_bridge.oracle import OracleStatus, solve_mzn

MODEL = """\
include "minisearch.mzn";
% bounds
var -2..3: x;
var 0..4: y;
var bool: b = x < y \\/ not (y = 0);
array[1..2] of var int: zb_objs = [x, y - 1];
predicate zb_helper(var int: v) = v > 0;
constraint if b then x + y * 2 <= 5 elseif x = 0 then true else abs(x) > 1 endif;
constraint bool2int(b) + max(x, y) div 2 != -1;
solve maximize x - y;
"""

a, b, c = MznIdent("a"), MznIdent("b"), MznIdent("c")


def test_model_items_are_parsed():
    model = parse_mzn(MODEL)
    kinds = [type(item).__name__ for item in model.items]
    assert kinds == [
        "MznInclude",
        "MznVarDecl",
        "MznVarDecl",
        "MznVarDecl",
        "MznVarDecl",
        "MznVerbatim",
        "MznConstraint",
        "MznConstraint",
        "MznSolve",
    ]
    x, y, flag, objectives = model.declarations
    assert (x.base, x.lo, x.hi) == (MznBaseType.INT, MznInt(-2), MznInt(3))
    assert flag.base == MznBaseType.BOOL and flag.value is not None
    assert objectives.is_array and objectives.array_length == 2
    assert model.solve == MznSolve(
        MznSolveKind.MAXIMIZE, MznBinary("-", MznIdent("x"), MznIdent("y"))
    )


def test_printed_models_parse_back_to_the_same_tree():
    model = parse_mzn(MODEL)
    assert parse_mzn(print_mzn(model)) == model
    assert print_mzn(model, header=["generated"]).startswith("% generated\n")


@pytest.mark.parametrize(
    "expr, text",
    [
        (MznBinary("*", MznBinary("+", a, b), c), "(a + b) * c"),
        (MznBinary("-", a, MznBinary("-", b, c)), "a - (b - c)"),
        (MznBinary("-", MznBinary("-", a, b), c), "a - b - c"),
        (MznBinary("+", a, MznInt(-3)), "a + (-3)"),
        (MznUnary("-", MznBinary("+", a, b)), "-(a + b)"),
        (MznBinary("/\\", MznBinary("\\/", a, b), c), "(a \\/ b) /\\ c"),
        (MznBinary("<=", MznBinary("<=", a, b), c), "(a <= b) <= c"),
        (
            MznIf(a, MznInt(1), MznCall("max", (b, c))),
            "if a then 1 else max(b, c) endif",
        ),
        (MznArray((a, MznBool(False))), "[a, false]"),
    ],
)
def test_expressions_print_with_minimal_parentheses(expr, text):
    assert print_expr(expr) == text
    assert parse_mzn(f"constraint {text};").constraints == (MznConstraint(expr),)


@pytest.mark.parametrize(
    "text, value",
    [
        ("-7 div 2", -3),
        ("-7 mod 2", -1),
        ("7 mod -2", 1),
        ("abs(-4) + min(2, 5) * max(1, 3)", 10),
        ("bool2int(3 > 2) + bool2int(false)", 1),
        ("if 1 = 2 then 5 elseif 2 = 2 then 6 else 7 endif", 6),
        ("true xor false", True),
        ("false -> false", True),
        ("false <- true", False),
        ("2.5 / 2.0", 1.25),
    ],
)
def test_evaluation(text, value):
    (constraint,) = parse_mzn(f"constraint {text};").constraints
    assert evaluate(constraint.expr, {}) == value


def test_undefined_operations_falsify_their_boolean_context():
    division = MznBinary("div", MznIdent("x"), MznIdent("y"))
    with pytest.raises(Undefined):
        evaluate(division, {"x": 1, "y": 0})
    equal = MznBinary("=", division, MznInt(0))
    assert evaluate(equal, {"x": 1, "y": 0}) is False
    assert evaluate(MznUnary("not", equal), {"x": 1, "y": 0}) is True
    with pytest.raises(KeyError):
        evaluate(division, {"x": 1})
    with pytest.raises(ValueError):
        evaluate(MznCall("sqrt", (MznInt(4),)), {})


@pytest.mark.parametrize(
    "text, error",
    [
        ("constraint x $ y;", TokenizeError),
        ("constraint x <= ;", ParseError),
        ("var 1..: x;", ParseError),
        ("array[0..2] of var int: xs;", ParseError),
        ("solve optimize x;", ParseError),
        ("predicate p(var int: x) = (x > 0;", ParseError),
        ("output [show(x)]", ParseError),
    ],
)
def test_syntax_errors(text, error):
    with pytest.raises(error):
        parse_mzn(text)


def test_node_count_counts_shared_subtrees_per_use():
    shared = MznBinary("+", a, b)
    assert node_count(MznBinary("*", shared, shared)) == 7


def test_linear_constraints_flatten_to_lin_builtins():
    model = parse_mzn(
        "var 0..3: x; var 0..3: y;\n"
        "constraint 2 * x - y >= 1;\nconstraint x != y;\nsolve minimize x + y;"
    )
    flat = flatten(model)
    names = [constraint.name for constraint in flat.constraints]
    assert names[:2] == ["int_lin_le", "int_lin_ne"]
    assert flat.constraints[0].args[0].items == (IntLit(-2), IntLit(1))
    assert solve_mzn(model).optima == (1,)


def test_non_linear_terms_get_defined_auxiliaries():
    model = parse_mzn(
        "var 1..3: x; var 1..3: y;\n"
        "constraint x * y = 6;\nsolve maximize if x > y then x else y endif;"
    )
    flat = flatten(model)
    names = {constraint.name for constraint in flat.constraints}
    assert {"int_times", "array_var_int_element", "bool2int"} <= names
    for constraint in flat.constraints:
        if constraint.name == "int_times":
            assert constraint.defined_variables()
    assert solve_mzn(model).optima == (3,)


def test_contradictions_flatten_to_the_empty_clause():
    model = parse_mzn("var 0..1: x; constraint 1 > 2; solve satisfy;")
    assert flatten(model).is_trivially_unsat
    assert solve_mzn(model).status == OracleStatus.UNSAT


def test_lexicographic_search_flattens_to_ordered_goals():
    model = parse_mzn(
        "var 0..2: x; var 0..2: y;\n"
        "array[1..2] of var int: zb_objs = [x, y];\n"
        "constraint x + y <= 3;\n"
        "solve search zb_lex_search(zb_objs, [false, false]);"
    )
    assert len(flatten(model).solve_items) == 2
    assert solve_mzn(model).optima == (2, 1)


# Random models against brute force


def _int_expr(rng: random.Random, depth: int) -> MznExpr:
    if depth <= 0 or rng.random() < 0.25:
        return rng.choice([MznIdent("x"), MznIdent("y"), MznInt(rng.randint(-3, 3))])
    kind = rng.choice(["+", "-", "*", "div", "mod", "if", "abs", "min", "neg", "b2i"])
    if kind in ("+", "-", "*"):
        return MznBinary(kind, _int_expr(rng, depth - 1), _int_expr(rng, depth - 1))
    if kind in ("div", "mod"):
        divisor = MznInt(rng.choice([-3, -2, 2, 3]))
        return MznBinary(kind, _int_expr(rng, depth - 1), divisor)
    if kind == "if":
        condition = _bool_expr(rng, depth - 1)
        return MznIf(condition, _int_expr(rng, depth - 1), _int_expr(rng, depth - 1))
    if kind == "abs":
        return MznCall("abs", (_int_expr(rng, depth - 1),))
    if kind == "min":
        args = (_int_expr(rng, depth - 1), _int_expr(rng, depth - 1))
        return MznCall(rng.choice(["min", "max"]), args)
    if kind == "neg":
        return MznUnary("-", _int_expr(rng, depth - 1))
    return MznCall("bool2int", (_bool_expr(rng, depth - 1),))


def _bool_expr(rng: random.Random, depth: int) -> MznExpr:
    if depth <= 0 or rng.random() < 0.4:
        op = rng.choice(["=", "!=", "<", "<=", ">", ">="])
        return MznBinary(op, _int_expr(rng, depth - 1), _int_expr(rng, depth - 1))
    op = rng.choice(["/\\", "\\/", "->", "<-", "<->", "xor", "not"])
    if op == "not":
        return MznUnary("not", _bool_expr(rng, depth - 1))
    return MznBinary(op, _bool_expr(rng, depth - 1), _bool_expr(rng, depth - 1))


def _brute_force(constraint: MznExpr, objective: MznExpr) -> Optional[int]:
    best = None
    for x, y in itertools.product(range(-2, 4), repeat=2):
        assignment = {"x": x, "y": y}
        if not evaluate(constraint, assignment):
            continue
        value = evaluate(objective, assignment)
        best = value if best is None else max(best, value)
    return best


def test_flattened_random_models_keep_their_optimum(rng):
    for _ in range(80):
        constraint, objective = _bool_expr(rng, 3), _int_expr(rng, 3)
        model = MznModel(
            (
                MznVarDecl("x", MznBaseType.INT, MznInt(-2), MznInt(3)),
                MznVarDecl("y", MznBaseType.INT, MznInt(-2), MznInt(3)),
                MznConstraint(constraint),
                MznSolve(MznSolveKind.MAXIMIZE, objective),
            )
        )
        expected = _brute_force(constraint, objective)
        result = solve_mzn(model)
        if expected is None:
            assert result.status == OracleStatus.UNSAT, print_mzn(model)
        else:
            assert result.optima == (expected,), print_mzn(model)
