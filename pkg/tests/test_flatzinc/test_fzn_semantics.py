from fractions import Fraction

import pytest

from zinc_bridge.errors import LossyEmissionError
from zinc_bridge.flatzinc import (
    ArrayLit,
    BaseType,
    FznConstraint,
    FznModel,
    FznType,
    FznVarDecl,
    Ident,
    IntervalDomain,
    IntLit,
    inline_arrays,
    parse_fzn,
    print_fzn,
)
from zinc_bridge.flatzinc.semantics import (
    NotEvaluable,
    Scope,
    Undefined,
    check_constraint,
    functional_output,
)

MODEL = """\
array [1..2] of int: coeffs = [2, -1];
var 1..3: x :: output_var;
var {1, 3, 5}: y;
var bool: b;
var 0.5..2.5: f;
array [1..2] of var int: xs :: output_array([1..2]) = [x, y];
constraint int_lin_le(coeffs, xs, 4);
constraint int_le_reif(x, y, b) :: defines_var(b);
constraint all_different_int(xs);
constraint float_sin(f, f);
solve maximize y;
"""


@pytest.fixture
def model():
    return parse_fzn(MODEL)


def test_printed_model_parses_back(model):
    text = print_fzn(model)
    assert "var 0.5..2.5: f;" in text
    assert "solve maximize y;" in text
    assert parse_fzn(text) == model


def _float_model(hi):
    domain = IntervalDomain(Fraction(0), hi)
    var = FznVarDecl("f", FznType(BaseType.FLOAT, True), domain)
    return FznModel(vars=(var,))


def test_lossless_printing_refuses_repeating_decimals():
    with pytest.raises(LossyEmissionError):
        print_fzn(_float_model(Fraction(1, 3)))
    assert "0.3333333333" in print_fzn(_float_model(Fraction(1, 3)), lossless=False)
    assert "0.0..0.125" in print_fzn(_float_model(Fraction(1, 8)))


def test_check_constraints(model):
    scope = Scope(model, {"x": 1, "y": 3, "b": True})
    assert scope.value(Ident("xs")) == (1, 3)
    lin_le, le_reif, all_different, sine = model.constraints
    assert check_constraint(lin_le, scope)
    assert check_constraint(le_reif, scope)
    assert check_constraint(all_different, scope)
    assert not check_constraint(le_reif, Scope(model, {"x": 3, "y": 1, "b": True}))
    assert not check_constraint(all_different, Scope(model, {"x": 3, "y": 3}))
    with pytest.raises(NotEvaluable):
        check_constraint(sine, Scope(model, {"f": Fraction(1)}))


def test_unassigned_arguments_are_reported(model):
    with pytest.raises(KeyError):
        check_constraint(model.constraints[0], Scope(model, {"x": 1}))


def test_linear_functional_output():
    model = parse_fzn(
        "var 0..9: x; var 0..9: y;"
        " constraint int_lin_eq([2, 3], [x, y], 12) :: defines_var(y);"
        " solve satisfy;"
    )
    solve = functional_output(model.constraints[0], "y")
    assert solve is not None
    assert solve(Scope(model, {"x": 3})) == 2
    with pytest.raises(Undefined):
        solve(Scope(model, {"x": 2}))


@pytest.mark.parametrize(
    "name, args, expected",
    [
        ("int_plus", (IntLit(2), IntLit(5), Ident("r")), 7),
        ("int_div", (IntLit(-7), IntLit(2), Ident("r")), -3),
        ("int_mod", (IntLit(-7), IntLit(2), Ident("r")), -1),
        ("int_max", (IntLit(-7), IntLit(2), Ident("r")), 2),
        ("int_eq", (Ident("r"), IntLit(4)), 4),
        (
            "array_int_element",
            (IntLit(2), ArrayLit((IntLit(7), IntLit(8))), Ident("r")),
            8,
        ),
        ("array_int_maximum", (Ident("r"), ArrayLit((IntLit(7), IntLit(8)))), 8),
    ],
)
def test_functional_outputs(name, args, expected):
    model = parse_fzn("var int: r; solve satisfy;")
    solve = functional_output(FznConstraint(name, args), "r")
    assert solve is not None
    assert solve(Scope(model, {})) == expected


@pytest.mark.parametrize(
    "name, args",
    [
        ("int_div", (IntLit(1), IntLit(0), Ident("r"))),
        ("int_mod", (IntLit(1), IntLit(0), Ident("r"))),
        ("array_int_element", (IntLit(3), ArrayLit((IntLit(7),)), Ident("r"))),
    ],
)
def test_undefined_functional_outputs(name, args):
    model = parse_fzn("var int: r; solve satisfy;")
    solve = functional_output(FznConstraint(name, args), "r")
    assert solve is not None
    with pytest.raises(Undefined):
        solve(Scope(model, {}))


def test_non_functional_constraints_have_no_solver():
    assert functional_output(
        FznConstraint("int_le", (Ident("r"), IntLit(3))), "r"
    ) is None
    assert functional_output(
        FznConstraint("int_plus", (Ident("r"), IntLit(1), Ident("r"))), "r"
    ) is None


def test_inline_arrays(model):
    inlined = inline_arrays(model)
    assert inlined.constraints[0].args == (
        ArrayLit((IntLit(2), IntLit(-1))),
        ArrayLit((Ident("x"), Ident("y"))),
        IntLit(4),
    )
    assert inlined.solve_items == model.solve_items
