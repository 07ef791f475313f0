import pytest

from zinc_bridge.flatzinc import UNSAT_MARKER, Ident, IntervalDomain, parse_fzn
from zinc_bridge.fzn2omt import encode_model, propagate_constants_and_aliases
from zinc_bridge.oracle import OracleStatus, solve_smt


def test_aliases_collapse_into_the_first_variable():
    model = propagate_constants_and_aliases(
        parse_fzn(
            "var 0..5: x; var 2..9: y; constraint int_eq(x, y); solve maximize y;"
        )
    )
    assert [var.name for var in model.vars] == ["x"]
    assert model.var("x").domain == IntervalDomain(2, 5)
    assert model.constraints == ()
    assert model.solve_items[0].objective == Ident("x")


def test_fixed_values_propagate_through_functional_constraints():
    model = propagate_constants_and_aliases(
        parse_fzn(
            "var 1..1: a; var 0..9: b; constraint int_plus(a, 2, b);"
            " constraint int_le(b, 5); solve satisfy;"
        )
    )
    assert model.vars == ()
    assert model.constraints == ()


def test_unit_clauses_fix_their_last_literal():
    model = propagate_constants_and_aliases(
        parse_fzn(
            "var bool: p; var bool: q; constraint bool_clause([p], [q]);"
            " constraint bool_eq(q, true); solve satisfy;"
        )
    )
    assert model.vars == ()
    assert model.constraints == ()


def test_conflicts_leave_the_unsat_marker():
    model = propagate_constants_and_aliases(
        parse_fzn("var 0..2: x; constraint int_eq(x, 5); solve satisfy;")
    )
    assert model.constraints == (UNSAT_MARKER,)
    assert model.is_trivially_unsat
    assert solve_smt(encode_model(model)).status == OracleStatus.UNSAT


@pytest.mark.parametrize(
    "text, optimum",
    [
        (
            "array [1..3] of int: t = [5, 7, 9]; var 1..3: i; var 0..10: v;"
            " constraint array_int_element(i, t, v); solve maximize v;",
            9,
        ),
        (
            "var 0..2: a; var 0..2: b; var 0..2: c; var 0..3: n;"
            " constraint count_eq([a, b, c], 1, n); solve maximize n;",
            3,
        ),
        (
            "var 0..3: a; var 0..3: b;"
            " constraint table_int([a, b], [1, 2, 3, 0]); solve maximize a;",
            3,
        ),
        (
            "var 0..4: a; var 2..3: b; var 0..9: m;"
            " constraint array_int_minimum(m, [a, b]); solve maximize m;",
            3,
        ),
    ],
)
def test_global_decompositions(text, optimum):
    result = solve_smt(encode_model(parse_fzn(text)))
    assert result.optima == (optimum,)


def test_all_different_pigeonhole():
    model = parse_fzn(
        "var 1..2: a; var 1..2: b; var 1..2: c;"
        " constraint all_different_int([a, b, c]); solve satisfy;"
    )
    assert solve_smt(encode_model(model)).status == OracleStatus.UNSAT
