from typing import Dict, List, Set

import json
import random
from fractions import Fraction

import pydantic
import pytest

from zinc_bridge.errors import ValidationError, WidthError
from zinc_bridge.minizinc import MznBaseType, evaluate, print_mzn
from zinc_bridge.omt2mzn import (
    BoundsPolicy,
    IntDomainMode,
    LabelMode,
    Manifest,
    OutputKind,
    daggify,
    emission_size,
    maxsmt_to_pb,
    translate,
)
from zinc_bridge.omt2mzn.translator import INT_CAP, LEX_SEARCH, MANIFEST_FILE
from zinc_bridge.oracle import OracleStatus, solve_smt, solve_translation
from zinc_bridge.smtlib import (
    BOOL,
    INT,
    Direction,
    Objective,
    SmtScript,
    Term,
    TermManager,
    iter_dag,
    parse_smt2,
)

MODES = list(LabelMode)
ROUND_TRIP_SCRIPTS = 300


def _random_script(rng: random.Random, objective: bool) -> SmtScript:
    """Bool/LIA script over small bounded ints, built with plenty of sharing."""
    manager = TermManager()
    declarations = {"x": INT, "y": INT, "z": INT, "p": BOOL, "q": BOOL}
    ints: List[Term] = [manager.var(name, INT) for name in "xyz"]
    bools: List[Term] = [manager.var(name, BOOL) for name in "pq"]
    for _ in range(rng.randint(3, 14)):
        if rng.random() < 0.5:
            op = rng.choice(["+", "-", "*", "ite"])
            if op == "*":
                factor = manager.int_const(rng.choice([-3, -2, -1, 2, 3]))
                ints.append(manager.app("*", [factor, rng.choice(ints)]))
            elif op == "ite":
                args = [rng.choice(bools), rng.choice(ints), rng.choice(ints)]
                ints.append(manager.app("ite", args))
            else:
                ints.append(manager.app(op, [rng.choice(ints), rng.choice(ints)]))
        else:
            op = rng.choice(["<=", "<", "=", "not", "and", "or", "=>"])
            if op in ("<=", "<", "="):
                bools.append(manager.app(op, [rng.choice(ints), rng.choice(ints)]))
            elif op == "not":
                bools.append(manager.app("not", [rng.choice(bools)]))
            else:
                bools.append(manager.app(op, [rng.choice(bools), rng.choice(bools)]))
    assertions = []
    for var in ints[:3]:
        assertions.append(manager.app("<=", [manager.int_const(0), var]))
        assertions.append(manager.app("<=", [var, manager.int_const(3)]))
    assertions.extend(rng.choice(bools) for _ in range(rng.randint(1, 4)))
    objectives = ()
    if objective:
        objectives = (Objective(Direction.MAXIMIZE, rng.choice(ints)),)
    return SmtScript(manager, declarations, tuple(assertions), objectives=objectives)


def _label_census(script: SmtScript) -> int:
    """Compound nodes printed in two or more places once top-level ``and`` split."""
    emitted = [objective.term for objective in script.objectives]
    roots = list(script.assertions) + emitted
    parents: Dict[int, List[Term]] = {}
    nodes = list(iter_dag(roots))
    for node in nodes:
        for arg in node.args:
            parents.setdefault(arg.id, []).append(node)
    asserted = {term.id for term in script.assertions}
    standalone = {term.id for term in emitted}
    split: Set[int] = set()
    changed = True
    while changed:
        changed = False
        for node in nodes:
            above = parents.get(node.id, [])
            if (
                node.op == "and"
                and node.id not in split
                and node.id not in standalone
                and (node.id in asserted or above)
                and all(parent.id in split for parent in above)
            ):
                split.add(node.id)
                changed = True

    printed: Dict[int, int] = {}

    def place(term: Term) -> None:
        if term.id in split:
            for arg in term.args:
                place(arg)
        else:
            printed[term.id] = printed.get(term.id, 0) + 1

    for term in roots:
        place(term)
    for node in nodes:
        if node.id not in split:
            for arg in node.args:
                printed[arg.id] = printed.get(arg.id, 0) + 1
    return sum(
        1
        for node in nodes
        if not node.is_leaf and node.id not in split and printed.get(node.id, 0) >= 2
    )


def test_identical_disjuncts_share_one_label():
    script = parse_smt2(
        "(declare-const a Bool) (declare-const b Bool) "
        "(assert (or (and a b) (and a b)))"
    )
    plan = daggify(script)
    assert len(plan) == 1
    (shared,) = plan.order
    assert shared.op == "and"
    assert plan.label(shared) == f"zb_n{shared.id}"


def test_only_the_shared_disjunction_is_labeled():
    script = parse_smt2(
        "(declare-const a Bool) (declare-const b Bool) (declare-const c Bool) "
        "(define-fun d () Bool (or (and a b) (and a c))) "
        "(assert (and d d (or a c)))"
    )
    plan = daggify(script)
    assert [term.op for term in plan.order] == ["or"]
    assert plan.order[0].args[0].op == "and"


def test_tree_shaped_formulas_get_no_labels():
    script = parse_smt2(
        "(declare-const x Int) (declare-const y Int) "
        "(assert (and (<= x y) (or (< x 3) (= y 1))))"
    )
    assert len(daggify(script)) == 0


def test_repeated_assertions_count_as_fathers():
    script = parse_smt2(
        "(declare-const x Int) (declare-const y Int) (declare-const p Bool) "
        "(assert (<= x y)) (assert (or p (<= x y)))"
    )
    plan = daggify(script)
    assert [term.op for term in plan.order] == ["<="]
    assert len(daggify(script, LabelMode.NONE)) == 0


def test_label_counts_on_random_scripts(rng):
    for _ in range(100):
        script = _random_script(rng, objective=rng.random() < 0.5)
        assert len(daggify(script)) == _label_census(script)


def test_two_father_emission_is_never_larger_than_the_baselines(rng):
    for _ in range(150):
        script = _random_script(rng, objective=rng.random() < 0.5)
        sizes = {
            mode: emission_size(translate(script, label_mode=mode)) for mode in MODES
        }
        assert sizes[LabelMode.TWO_FATHERS] <= sizes[LabelMode.ALL]
        assert sizes[LabelMode.TWO_FATHERS] <= sizes[LabelMode.NONE]


def test_repeated_conjunctions_are_split_before_labeling():
    script = parse_smt2(
        "(declare-const x Int) (declare-const y Int) (declare-const p Bool) "
        "(assert (and p (<= x y))) (assert (and p (<= x y))) (assert (<= x y))"
    )
    plan = daggify(script)
    assert [term.op for term in plan.order] == ["<="]
    assert [term.op for term in plan.conjuncts] == ["var", "<=", "var", "<=", "<="]
    sizes = {
        mode: emission_size(translate(script, label_mode=mode)) for mode in MODES
    }
    assert sizes[LabelMode.TWO_FATHERS] <= sizes[LabelMode.ALL]
    assert sizes[LabelMode.TWO_FATHERS] <= sizes[LabelMode.NONE]


@pytest.mark.parametrize("mode", MODES)
def test_translations_agree_with_the_smt_oracle(mode, rng):
    for _ in range(ROUND_TRIP_SCRIPTS):
        script = _random_script(rng, objective=True)
        expected = solve_smt(script)
        assert expected.status != OracleStatus.INAPPLICABLE
        assert solve_translation(translate(script, label_mode=mode)) == expected


def test_bounded_maximization():
    script = parse_smt2(
        "(declare-const x Int) (assert (and (<= 0 x) (<= x 2))) (maximize x)"
    )
    output = translate(script)
    assert output.kind == OutputKind.SINGLE
    text = output.documents()[0]
    assert "var int: x;" in text
    assert "constraint 0 <= x;" in text
    assert "solve maximize x;" in text
    assert solve_translation(output).optima == (2,)


def test_capped_int_domains():
    script = parse_smt2("(declare-const x Int) (assert (<= x 2)) (minimize x)")
    policy = BoundsPolicy(int_domain_mode=IntDomainMode.CAPPED)
    (model,) = translate(script, policy).models
    (decl,) = model.declarations
    assert (decl.lo.value, decl.hi.value) == (-INT_CAP, INT_CAP)


def test_real_variables_get_the_float_domain():
    script = parse_smt2(
        "(declare-const r Real) (assert (= r (/ 1 4))) (maximize (* 2 r))"
    )
    output = translate(script, BoundsPolicy(float_domain=1.5))
    (decl,) = output.models[0].declarations
    assert decl.base == MznBaseType.FLOAT
    assert (decl.lo.value, decl.hi.value) == (Fraction(-3, 2), Fraction(3, 2))
    assert solve_translation(output).optima == (Fraction(1, 2),)


def test_default_float_domain_is_the_single_precision_range():
    script = parse_smt2("(declare-const r Real) (assert (<= r 1.0))")
    text = translate(script).documents()[0]
    assert "var -3.402823e+38..3.402823e+38: r;" in text
    assert BoundsPolicy().float_domain == Fraction("3.402823e+38")


@pytest.mark.parametrize("value", [0, -1.0, "-2"])
def test_float_domain_must_be_positive(value):
    with pytest.raises(pydantic.ValidationError):
        BoundsPolicy(float_domain=value)


def test_policy_is_frozen():
    policy = BoundsPolicy()
    with pytest.raises(TypeError):
        policy.int_domain_mode = IntDomainMode.CAPPED


@pytest.mark.parametrize("divisor", [3, -3, 1, -1])
@pytest.mark.parametrize("op", ["div", "mod"])
def test_euclidean_division_by_constants(op, divisor):
    literal = str(divisor) if divisor > 0 else f"(- {-divisor})"
    script = parse_smt2(
        "(declare-const x Int) (declare-const y Int) "
        f"(assert (= y ({op} x {literal})))"
    )
    (constraint,) = translate(script).models[0].constraints
    for x in range(-7, 8):
        remainder = x % abs(divisor)
        expected = remainder if op == "mod" else (x - remainder) // divisor
        for y in range(-8, 9):
            assert evaluate(constraint.expr, {"x": x, "y": y}) == (y == expected)


def test_independent_objectives_get_a_model_each(tmp_path):
    script = parse_smt2(
        "(declare-const x Int) (declare-const y Int) "
        "(assert (<= 0 x 2)) (assert (<= 0 y 2)) (assert (<= (+ x y) 3)) "
        "(maximize x :id first) (maximize y)"
    )
    output = translate(script)
    assert output.kind == OutputKind.INDEPENDENT
    assert len(output.models) == 2
    assert output.file_names("out") == ["out_1.mzn", "out_2.mzn"]
    assert solve_translation(output).optima == (2, 2)

    paths = output.write(tmp_path, "out")
    assert [path.name for path in paths] == ["out_1.mzn", "out_2.mzn", MANIFEST_FILE]
    manifest = Manifest.parse_file(tmp_path / MANIFEST_FILE)
    assert manifest == output.manifest("out")
    entries = json.loads((tmp_path / MANIFEST_FILE).read_text())["models"]
    assert entries == [
        {"file": "out_1.mzn", "objective": "first", "direction": "maximize"},
        {"file": "out_2.mzn", "objective": "objective_2", "direction": "maximize"},
    ]


def test_lexicographic_objectives_share_one_search_model(tmp_path):
    script = parse_smt2(
        "(set-option :opt.priority lex) "
        "(declare-const x Int) (declare-const y Int) "
        "(assert (<= 0 x 2)) (assert (<= 0 y 2)) (assert (<= (+ x y) 3)) "
        "(maximize x) (minimize (- 0 y))"
    )
    output = translate(script)
    assert output.kind == OutputKind.LEXICOGRAPHIC
    text = print_mzn(output.models[0])
    assert 'include "minisearch.mzn";' in text
    assert f"solve search {LEX_SEARCH}(zb_objs, [false, true]);" in text
    assert solve_translation(output).optima == (2, -1)
    assert solve_smt(script).optima == (2, -1)
    assert [path.name for path in output.write(tmp_path, "lex")] == ["lex.mzn"]


def test_lexicographic_mode_needs_two_objectives():
    script = parse_smt2("(declare-const x Int) (assert (<= 0 x 2)) (maximize x)")
    with pytest.raises(ValidationError):
        translate(script, lexicographic=True)
    assert translate(script, lexicographic=False).kind == OutputKind.SINGLE


def test_satisfaction_scripts_have_a_satisfy_item():
    script = parse_smt2("(declare-const p Bool) (assert p)")
    output = translate(script)
    assert output.kind == OutputKind.SINGLE
    assert "solve satisfy;" in output.documents()[0]
    assert solve_translation(output).status == OracleStatus.SAT


def test_objective_bounds_become_constraints():
    script = parse_smt2(
        "(declare-const x Int) (assert (<= 0 x 9)) (minimize x :lower 4)"
    )
    output = translate(script)
    assert "constraint x >= 4;" in output.documents()[0]
    assert solve_translation(output).optima == (4,)


def test_soft_assertions_become_a_minimized_cost():
    script = parse_smt2(
        "(declare-const a Bool) (declare-const b Bool) "
        "(assert (not (and a b))) "
        "(assert-soft a :weight 2) (assert-soft b :weight 3)"
    )
    rewritten = maxsmt_to_pb(script)
    assert rewritten.soft_assertions == ()
    (objective,) = rewritten.objectives
    assert objective.is_minimize and objective.id == "I"
    assert solve_smt(rewritten).optima == (2,)
    assert solve_translation(translate(script)).optima == (2,)


def test_soft_group_used_as_a_term_is_defined_as_its_cost():
    script = parse_smt2(
        "(declare-const a Bool) (declare-const b Bool) "
        "(assert-soft a :weight 1 :id goal) (assert-soft b :dweight 0.5 :id goal) "
        "(assert (not a)) (minimize goal)"
    )
    rewritten = maxsmt_to_pb(script)
    assert "goal" in rewritten.declarations
    assert len(rewritten.objectives) == 1
    assert solve_translation(translate(script)).optima == (1,)


def test_bit_vector_scripts_become_integer_models():
    script = parse_smt2(
        "(declare-const v (_ BitVec 4)) (declare-const w (_ BitVec 4)) "
        "(assert (bvult v #b1010)) (assert (= w (bvadd v #x9))) "
        "(maximize w) (maximize v :signed)"
    )
    output = translate(script)
    decl = output.models[0].declarations[0]
    assert (decl.base, decl.lo.value, decl.hi.value) == (MznBaseType.INT, 0, 15)
    expected = solve_smt(script)
    assert expected.optima == (15, 7)
    assert solve_translation(output) == expected


def test_wide_bit_vectors_are_rejected():
    script = parse_smt2("(declare-const v (_ BitVec 64)) (assert (= v v))")
    with pytest.raises(WidthError):
        translate(script)


def test_awkward_symbols_are_renamed():
    script = parse_smt2(
        "(declare-const |a b| Int) (declare-const var Int) (declare-const zb_x Int) "
        "(declare-const ok Int) (assert (<= |a b| var zb_x ok))"
    )
    names = translate(script).names
    assert names == {"a b": "zb_v0", "var": "zb_v1", "zb_x": "zb_v2", "ok": "ok"}
