from fractions import Fraction
import io
import json

import pytest
from generators import random_int_model

from zinc_bridge.errors import ExternalToolError, UsageError
from zinc_bridge.flatzinc import parse_fzn
from zinc_bridge.oracle import (
    Classification,
    InstanceReport,
    OracleResult,
    OracleStatus,
    classify,
    solve_fzn,
    solve_smt,
    summarize,
    write_reports,
)
from zinc_bridge.oracle.external import parse_solver_output, run_fzn_solver
from zinc_bridge.oracle.verdict import error_band, relative_error
from zinc_bridge.smtlib import parse_smt2

# FlatZinc reference


def test_fzn_minimum():
    result = solve_fzn(parse_fzn("var 1..3: x; solve minimize x;"))
    assert result == OracleResult.sat([1])
    assert result.witness == {"x": 1}


def test_fzn_pigeonhole_is_unsat():
    model = parse_fzn(
        "var 1..2: x; var 1..2: y; var 1..2: z;\n"
        "constraint all_different_int([x, y, z]);\nsolve satisfy;"
    )
    assert solve_fzn(model).status == OracleStatus.UNSAT


def test_fzn_random_models_match_enumeration(rng):
    kinds = ("lin_le", "lin_ne", "lin_eq", "ne", "lt", "max", "abs", "times")
    for _ in range(100):
        model = random_int_model(rng, kinds=kinds)
        status, optimum = model.solve()
        result = solve_fzn(parse_fzn(model.fzn()))
        assert result.status == status, model.fzn()
        assert result.optima == (() if optimum is None else (optimum,)), model.fzn()


def test_fzn_budget_makes_the_oracle_inapplicable():
    model = parse_fzn(
        "var 1..10: x; var 1..10: y;\nconstraint int_le(x, y);\nsolve maximize x;"
    )
    result = solve_fzn(model, budget=50)
    assert result.status == OracleStatus.INAPPLICABLE
    assert "exceeds budget 50" in result.reason
    assert solve_fzn(model, budget=100).optima == (10,)


def test_fzn_budget_comes_from_settings(monkeypatch):
    monkeypatch.setenv("ZINC_BRIDGE_ORACLE_BUDGET", "5")
    result = solve_fzn(parse_fzn("var 1..10: x; solve maximize x;"))
    assert result.status == OracleStatus.INAPPLICABLE


# SMT-LIB reference


def test_smt_bounded_maximum():
    script = parse_smt2(
        "(declare-fun x () Int)\n(assert (and (<= 0 x) (<= x 2)))\n(maximize x)\n"
    )
    assert solve_smt(script).optima == (2,)


def test_smt_unbounded_integer_is_inapplicable():
    script = parse_smt2("(declare-fun x () Int)\n(assert (> x 0))\n(minimize x)\n")
    result = solve_smt(script)
    assert result.status == OracleStatus.INAPPLICABLE
    assert "unbounded" in result.reason


def test_smt_defined_reals_are_exact():
    script = parse_smt2(
        "(declare-fun b () Bool)\n(declare-fun r () Real)\n"
        "(assert (= r (ite b (/ 1 3) (/ 2 3))))\n(minimize r)\n"
    )
    assert solve_smt(script).optima == (Fraction(1, 3),)


def test_smt_priority_option_selects_lexicographic_optima():
    text = (
        "(set-option :opt.priority lex)\n"
        "(declare-fun x () Int)\n(declare-fun y () Int)\n"
        "(assert (and (<= 0 x) (<= x 2) (<= 0 y) (<= y 2) (<= (+ x y) 3)))\n"
        "(maximize x)\n(maximize y)\n"
    )
    assert solve_smt(parse_smt2(text)).optima == (2, 1)
    assert solve_smt(parse_smt2(text.split("\n", 1)[1])).optima == (2, 2)


def test_smt_soft_assertions_minimize_their_cost():
    script = parse_smt2(
        "(declare-fun a () Bool)\n"
        "(assert-soft a :weight 2)\n(assert-soft (not a) :weight 3)\n"
    )
    assert solve_smt(script).optima == (2,)


# Verdicts


def test_results_compare_without_witness():
    assert OracleResult.sat([1], {"x": 1}) == OracleResult.sat([1], {"x": 2})
    with pytest.raises(ValueError):
        OracleResult(OracleStatus.UNSAT, (1,))


@pytest.mark.parametrize(
    "reference, candidate, classification, reason",
    [
        (OracleResult.sat([1]), OracleResult.sat([1]), Classification.CORRECT, None),
        (OracleResult.unsat(), OracleResult.unsat(), Classification.CORRECT, None),
        (
            OracleResult.sat([1]),
            OracleResult.unsat(),
            Classification.INCORRECT,
            "unsat-on-sat",
        ),
        (
            OracleResult.unsat(),
            OracleResult.sat(),
            Classification.INCORRECT,
            "sat-on-unsat",
        ),
        (
            OracleResult.sat([1]),
            OracleResult.sat([1, 2]),
            Classification.INCORRECT,
            "objective count differs",
        ),
        (
            OracleResult.inapplicable("too big"),
            OracleResult.sat([1]),
            Classification.UNVERIFIED,
            "reference inapplicable",
        ),
        (
            OracleResult.sat([1]),
            OracleResult.inapplicable("Int variable x is unbounded"),
            Classification.UNVERIFIED,
            "Int variable x is unbounded",
        ),
    ],
)
def test_classification(reference, candidate, classification, reason):
    verdict = classify(reference, candidate)
    assert (verdict.classification, verdict.reason) == (classification, reason)


def test_relative_error_threshold():
    one = OracleResult.sat([1])
    close = classify(one, OracleResult.sat([Fraction(10000009, 10 ** 7)]))
    assert close.is_correct and close.delta == Fraction(9, 10 ** 7)
    far = classify(one, OracleResult.sat([Fraction(1000002, 10 ** 6)]))
    assert far.classification == Classification.INCORRECT
    assert (far.reason, far.band) == ("delta", ">=1e-6")


def test_zero_reference_uses_the_absolute_error():
    verdict = classify(OracleResult.sat([0]), OracleResult.sat([Fraction(1, 2)]))
    assert verdict.classification == Classification.INCORRECT
    assert verdict.delta is None
    assert (verdict.error, verdict.band) == (Fraction(1, 2), ">=1e-1")
    assert relative_error(0, 1) is None
    assert relative_error(-4, -3) == Fraction(1, 4)


def test_worst_objective_decides():
    verdict = classify(OracleResult.sat([10, 1]), OracleResult.sat([10, 2]))
    assert (verdict.delta, verdict.band) == (1, ">=1")
    with pytest.raises(TypeError):
        verdict.band = None


@pytest.mark.parametrize(
    "error, band",
    [
        (Fraction(10), ">=10"),
        (Fraction(3), ">=1"),
        (Fraction(1, 10), ">=1e-1"),
        (Fraction(1, 999), ">=1e-3"),
        (Fraction(1, 10 ** 6), ">=1e-6"),
        (Fraction(1, 10 ** 7), None),
    ],
)
def test_error_bands(error, band):
    assert error_band(error) == band


# Reports


def _report(translation, reference, candidate):
    verdict = classify(reference, candidate)
    return InstanceReport.build("a.fzn", translation, reference, candidate, verdict)


def test_reports_are_json_lines():
    reports = [
        _report("la", OracleResult.sat([Fraction(1, 3)]), OracleResult.sat([1])),
        _report("bv", OracleResult.sat([1]), OracleResult.sat([1])),
        _report("mzn", OracleResult.sat([1]), OracleResult.inapplicable("budget")),
    ]
    stream = io.StringIO()
    assert write_reports(reports, stream) == 3
    first = json.loads(stream.getvalue().splitlines()[0])
    assert first["instance"] == "a.fzn"
    assert first["reference"] == "sat"
    assert first["reference_optima"] == ["1/3"]
    assert first["candidate_optima"] == ["1"]
    assert first["verdict"] == "incorrect"
    assert (first["delta"], first["band"]) == ("2", ">=1")
    assert summarize(reports) == {
        "correct": 1,
        "incorrect": 1,
        "unverified": 1,
        "incorrect >=1": 1,
    }


# External solver output

MINIMIZE = parse_fzn("var 1..3: x :: output_var; solve minimize x;")


def test_solver_output_keeps_the_last_solution_of_a_complete_search():
    text = "x = 3;\n----------\nx = 1;\n----------\n==========\n"
    result = parse_solver_output(text, MINIMIZE)
    assert result == OracleResult.sat([1])
    assert result.witness == {"x": 1}


@pytest.mark.parametrize(
    "text, reason",
    [
        ("x = 1;\n----------\n", "optimization did not complete"),
        ("=====UNKNOWN=====\n", "solver reported unknown"),
        ("", "solver printed no solution"),
        ("y = 1;\n----------\n==========\n", "objective missing from solver output"),
    ],
)
def test_incomplete_solver_output_is_inapplicable(text, reason):
    assert parse_solver_output(text, MINIMIZE) == OracleResult.inapplicable(reason)


def test_solver_output_status_lines():
    unsat = parse_solver_output("=====UNSATISFIABLE=====\n", MINIMIZE)
    assert unsat.status == OracleStatus.UNSAT
    satisfy = parse_fzn("var bool: b :: output_var; solve satisfy;")
    result = parse_solver_output("b = true;\n----------\n", satisfy)
    assert result == OracleResult.sat() and result.witness == {"b": True}


def test_external_solver_run(write):
    output = write("solver.out", "x = 2;\n----------\n==========\n")
    fzn = write("model.fzn", "var 1..3: x :: output_var; solve minimize x;\n")
    assert run_fzn_solver(fzn, MINIMIZE, f"cat {output}").optima == (2,)
    with pytest.raises(ExternalToolError):
        run_fzn_solver(fzn, MINIMIZE, "false {fzn}")
    with pytest.raises(UsageError):
        run_fzn_solver(fzn, MINIMIZE)
