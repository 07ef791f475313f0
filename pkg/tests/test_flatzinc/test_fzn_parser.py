from fractions import Fraction

import pytest

from zinc_bridge.errors import (
    ParseError,
    TokenizeError,
    UnknownSymbolError,
    UnsupportedConstraintError,
    ValidationError,
)
from zinc_bridge.flatzinc import (
    Annotation,
    ArrayLit,
    BaseType,
    GoalKind,
    Ident,
    IntervalDomain,
    IntLit,
    RangeLit,
    SetDomain,
    parse_fzn,
)
from zinc_bridge.flatzinc.parser import tokenize

MODEL = """\
predicate my_pred(var int: x);
% parameters
array [1..2] of int: coeffs = [2, -1];
var 1..3: x :: output_var;
var {5, 1, 3}: y;
var bool: b;
var 0.5..2.5: f;
var -0x2..0o7: h;
array [1..2] of var int: xs :: output_array([1..2]) = [x, y];
constraint int_lin_le(coeffs, xs, 4);
constraint int_le_reif(x, y, b) :: defines_var(b);
solve minimize x;
"""


def test_parse_declarations():
    model = parse_fzn(MODEL)
    assert model.predicates[0].startswith("predicate my_pred(")
    assert model.param("coeffs").value == ArrayLit((IntLit(2), IntLit(-1)))
    assert model.var("x").domain == IntervalDomain(1, 3)
    assert model.var("y").domain == SetDomain((1, 3, 5))
    assert model.var("f").type.base == BaseType.FLOAT
    assert model.var("f").domain == IntervalDomain(Fraction(1, 2), Fraction(5, 2))
    assert model.var("h").domain == IntervalDomain(-2, 7)
    assert model.var("xs").type.array_length == 2
    assert model.var("xs").annotations == (
        Annotation("output_array", (ArrayLit((RangeLit(1, 2),)),)),
    )
    assert model.is_var("x") and not model.is_var("coeffs")


def test_validation_fills_in_derived_fields():
    model = parse_fzn(MODEL)
    assert model.output_annotations == ("x", "xs")
    assert model.var("b").defined_by == "int_le_reif#2"
    assert model.var("x").defined_by is None
    assert model.constraints[1].defined_variables() == ("b",)
    goal = model.solve_items[0]
    assert goal.kind == GoalKind.MINIMIZE
    assert goal.objective == Ident("x")
    assert model.is_optimization


def test_tokens_carry_positions():
    tokens = tokenize("var int: x;\n  solve satisfy;")
    solve = next(token for token in tokens if token.text == "solve")
    assert (solve.line, solve.column) == (2, 3)
    assert tokens[-1].kind == "eof"


@pytest.mark.parametrize(
    "text, error",
    [
        ("var int: x @;", TokenizeError),
        ('var int: x :: name("open;', TokenizeError),
        ("var 3..1: x; solve satisfy;", ParseError),
        ("var int: x; solve satisfy", ParseError),
        ("array [0..1] of int: a = [1, 2]; solve satisfy;", ParseError),
        ("int: p; solve satisfy;", ParseError),
        ("var int: x; solve find x;", ParseError),
    ],
)
def test_syntax_errors(text, error):
    with pytest.raises(error):
        parse_fzn(text)


def test_parse_errors_report_line_and_column():
    with pytest.raises(ParseError) as raised:
        parse_fzn("var int: x;\nvar 3..1: y;\nsolve satisfy;")
    assert raised.value.line == 2
    assert str(raised.value).startswith("2:")
    assert raised.value.exit_code == 2


@pytest.mark.parametrize(
    "text, error",
    [
        ("var int: x; var int: x; solve satisfy;", ValidationError),
        ("constraint int_le(x, 1); solve satisfy;", UnknownSymbolError),
        (
            "var int: x; constraint foo_bar(x); solve satisfy;",
            UnsupportedConstraintError,
        ),
        ("var int: x; constraint int_le(x); solve satisfy;", ValidationError),
        (
            "var int: x; var bool: b; constraint int_le(x, b); solve satisfy;",
            ValidationError,
        ),
        ("var int: x;", ValidationError),
        ("var bool: b; solve minimize b;", ValidationError),
        ("var int: x; solve minimize x; solve maximize x;", ValidationError),
        ("array [1..2] of var int: xs = [1]; solve satisfy;", ValidationError),
        (
            "array [1..2] of int: a = [1, 2]; var int: x = a[3]; solve satisfy;",
            ValidationError,
        ),
    ],
)
def test_validation_errors(text, error):
    with pytest.raises(error) as raised:
        parse_fzn(text)
    assert raised.value.exit_code == 3


def test_multi_objective_extension():
    model = parse_fzn(
        "var 0..4: x; var 0..4: y; solve minimize x; solve maximize y;",
        allow_multi_objective=True,
    )
    assert [goal.kind for goal in model.solve_items] == [
        GoalKind.MINIMIZE,
        GoalKind.MAXIMIZE,
    ]


def test_alias_variables_are_defined_by_assignment():
    model = parse_fzn("var 0..4: x; var int: y = x; solve satisfy;")
    assert model.var("y").defined_by == "assignment"
    assert model.var("y").value == Ident("x")
