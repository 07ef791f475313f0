import pytest
from generators import BUILTIN_TEMPLATES, random_builtin_model

from zinc_bridge.flatzinc import parse_fzn
from zinc_bridge.flatzinc.builtins import SIGNATURES
from zinc_bridge.fzn2omt import EncodeConfig, IntMode, encode_model
from zinc_bridge.oracle import (
    Classification,
    OracleStatus,
    classify,
    solve_fzn,
    solve_smt,
)

RANDOM_MODELS = 500

SUPPORTED = {
    name
    for name, signatures in SIGNATURES.items()
    if not any(signature.nonlinear for signature in signatures)
}

HANDWRITTEN = [
    "var 1..3: x; solve maximize x;",
    "var -2..2: x; constraint int_ne(x, 0); solve minimize x;",
    "var 0..3: x; var 0..3: y; constraint int_lt(x, y); solve maximize x;",
    "var 0..3: x; var 0..3: y; constraint int_lin_eq([1, 1], [x, y], 5);"
    " solve minimize x;",
    "var 0..3: x; var 0..3: y; constraint int_lin_le([2, 3], [x, y], 7);"
    " solve maximize y;",
    "var 0..2: x; var 0..2: y; constraint int_lin_ne([1, -1], [x, y], 0);"
    " solve satisfy;",
    "var -3..3: x; var 0..3: y; constraint int_abs(x, y); solve minimize x;",
    "var -3..3: x; var -1..1: q; constraint int_div(x, 2, q); solve maximize x;",
    "var -3..3: x; var -1..1: r; constraint int_mod(x, -2, r); constraint int_ne(r, 0);"
    " solve minimize x;",
    "var 0..3: a; var 0..3: b; var 0..3: m; constraint int_max(a, b, m);"
    " constraint int_le(m, 1); solve maximize a;",
    "var 0..3: a; var 0..3: b; var 0..3: m; constraint int_min(a, b, m);"
    " constraint int_eq(m, 2); solve minimize b;",
    "var 0..3: a; var 0..3: b; var 0..6: c; constraint int_plus(a, b, c);"
    " constraint int_eq(c, 6); solve satisfy;",
    "var -2..2: a; var -6..6: c; constraint int_times(3, a, c); solve maximize c;",
    "var 0..3: x; var bool: r; constraint int_le_reif(x, 1, r);"
    " constraint bool_eq(r, true); solve maximize x;",
    "var 0..3: x; var 0..3: y; var bool: r;"
    " constraint int_lin_eq_reif([1, 1], [x, y], 3, r); constraint bool_not(r, false);"
    " solve maximize x;",
    "var 0..2: x; var bool: r; constraint int_ne_reif(x, 1, r);"
    " constraint bool_eq(r, false); solve satisfy;",
    "var bool: a; var bool: b; constraint bool_clause([a], [b]);"
    " constraint bool_eq(b, true); solve satisfy;",
    "var bool: a; var bool: b; var bool: c; constraint bool_and(a, b, c);"
    " constraint bool_or(a, b, true); constraint bool_eq(c, false); solve satisfy;",
    "var bool: a; var bool: b; constraint bool_xor(a, b); constraint bool_eq(a, b);"
    " solve satisfy;",
    "var bool: a; var bool: b; var bool: c; constraint bool_xor(a, b, c);"
    " constraint bool_lt(a, b); solve satisfy;",
    "var bool: a; var bool: b; var bool: r; constraint bool_le_reif(a, b, r);"
    " constraint bool_lt(b, a); constraint bool_eq(r, true); solve satisfy;",
    "var bool: a; var bool: b; var bool: c; var bool: r;"
    " constraint array_bool_and([a, b, c], r); constraint bool_clause([r], []);"
    " solve satisfy;",
    "var bool: a; var bool: b; var bool: r; constraint array_bool_or([a, b], r);"
    " constraint bool_clause([], [r]); constraint bool_eq(a, true); solve satisfy;",
    "var bool: a; var bool: b; var bool: c; constraint array_bool_xor([a, b, c]);"
    " constraint bool_eq(a, false); constraint bool_eq(b, false); solve satisfy;",
    "var bool: a; var bool: b; var bool: c; var bool: r;"
    " constraint bool_clause_reif([a, b], [c], r); constraint bool_eq(r, false);"
    " solve satisfy;",
    "var bool: a; var bool: b; var bool: c;"
    " constraint bool_lin_le([1, 1, 1], [a, b, c], 1);"
    " constraint bool_clause([a, b], []); solve satisfy;",
    "var bool: a; var bool: b; var bool: c; var 0..6: n;"
    " constraint bool_lin_eq([1, 2, 3], [a, b, c], n); solve maximize n;",
    "var bool: a; var 0..1: x; constraint bool2int(a, x); solve maximize x;",
    "var bool: a; var bool: b; var bool: c; var 0..1: ia; var 0..1: ib; var 0..1: ic;"
    " constraint bool2int(a, ia); constraint bool2int(b, ib);"
    " constraint bool2int(c, ic); constraint int_lin_le([1, 1, 1], [ia, ib, ic], 2);"
    " constraint int_lin_le([-1, -1, -1], [ia, ib, ic], -2); solve minimize ia;",
    "var 1..3: i; var 0..9: v; constraint array_int_element(i, [4, 9, 1], v);"
    " solve maximize v;",
    "var 0..4: i; var 0..2: a; var 0..2: b; var 0..2: v;"
    " constraint array_var_int_element(i, [a, b], v); constraint int_lt(a, b);"
    " solve minimize i;",
    "var 1..2: i; var bool: r; constraint array_bool_element(i, [false, true], r);"
    " constraint bool_eq(r, true); solve minimize i;",
    "var 1..3: i; var bool: a; var bool: b; var bool: r;"
    " constraint array_var_bool_element(i, [a, b], r); solve maximize i;",
    "var 0..3: a; var 0..3: b; var 0..3: m;"
    " constraint array_int_maximum(m, [a, b]); solve minimize m;",
    "var 0..3: a; var 0..3: b; var 0..3: m; constraint minimum_int(m, [a, b]);"
    " constraint int_eq(a, 3); solve maximize m;",
    "var 1..3: a; var 1..3: b; var 1..3: c;"
    " constraint all_different_int([a, b, c]); constraint int_lt(a, b);"
    " constraint int_lt(b, c); solve satisfy;",
    "var 1..2: a; var 1..2: b; var 1..2: c;"
    " constraint fzn_all_different_int([a, b, c]); solve satisfy;",
    "var 0..2: a; var 0..2: b; var 0..2: n; constraint count([a, b], 1, n);"
    " solve maximize n;",
    "var 0..2: a; var 0..2: b; var 0..2: v; var 0..2: n;"
    " constraint count_eq([a, b], v, n); constraint int_eq(n, 0); solve maximize v;",
    "var 0..3: a; var 0..3: b; constraint table_int([a, b], [1, 2, 3, 0, 2, 2]);"
    " solve maximize a;",
    "var bool: a; var bool: b;"
    " constraint table_bool([a, b], [true, false, false, true]);"
    " constraint bool_eq(a, b); solve satisfy;",
    "var set of 1..3: s; var 0..3: n; constraint set_card(s, n);"
    " constraint set_in(2, s); solve minimize n;",
    "var set of 1..3: s; var set of 1..3: t; var set of 1..3: u; var 0..3: n;"
    " constraint set_union(s, t, u); constraint set_eq(u, {1, 3});"
    " constraint set_card(s, n); solve maximize n;",
    "var set of 1..2: s; var set of 1..2: t; var set of 1..2: u;"
    " constraint set_intersect(s, t, u); constraint set_ne(s, t);"
    " constraint set_subset(t, s); solve satisfy;",
    "var set of 1..2: s; var set of 1..2: t; var set of 1..2: u;"
    " constraint set_diff(s, t, u); constraint set_symdiff(s, t, u);"
    " constraint set_superset(s, {1}); solve satisfy;",
    "var 0..3: x; var set of 1..2: s; var bool: r; constraint set_in_reif(x, s, r);"
    " constraint bool_eq(r, true); solve maximize x;",
    "var 1..3: i; var set of 1..2: s; var 0..2: n;"
    " constraint array_set_element(i, [{2}, {1}, {1, 2}], s);"
    " constraint set_card(s, n); solve maximize n;",
    "var 1..2: x; var 0..3: y; var float: f; var float: g;"
    " constraint int2float(x, f) :: defines_var(f);"
    " constraint int2float(y, g) :: defines_var(g); constraint float_plus(f, f, g);"
    " solve maximize g;",
    "var -2..2: x; var 0..2: y; var float: f; var float: g;"
    " constraint int2float(x, f) :: defines_var(f);"
    " constraint int2float(y, g) :: defines_var(g); constraint float_abs(f, g);"
    " solve minimize f;",
    "var 0..4: x; var 0..2: y; var float: f; var float: g;"
    " constraint int2float(x, f) :: defines_var(f);"
    " constraint int2float(y, g) :: defines_var(g); constraint float_div(f, 2.0, g);"
    " solve maximize f;",
    "var 0..3: x; var float: f; constraint int2float(x, f) :: defines_var(f);"
    " constraint float_lin_le([2.5], [f], 5.5); solve maximize f;",
    "var 0..3: x; var 0..3: y; var float: f; var float: g;"
    " constraint int2float(x, f) :: defines_var(f);"
    " constraint int2float(y, g) :: defines_var(g);"
    " constraint float_lin_eq([0.5, -1.0], [f, g], -1.0); solve maximize g;",
    "var 1..3: i; var 0..3: y; var float: g;"
    " constraint int2float(y, g) :: defines_var(g);"
    " constraint array_float_element(i, [0.5, 2.0, 3.0], g); solve minimize i;",
]


def _agree(text, config):
    model = parse_fzn(text)
    reference = solve_fzn(model)
    assert reference.status != OracleStatus.INAPPLICABLE, (reference.reason, text)
    candidate = solve_smt(encode_model(model, config))
    verdict = classify(reference, candidate)
    assert verdict.classification == Classification.CORRECT, (verdict, text)
    return candidate


def _agree_in_both_modes(text):
    linear = _agree(text, EncodeConfig())
    if "float" not in text:
        bitvector = _agree(text, EncodeConfig(int_mode=IntMode.BV))
        assert bitvector == linear, text


def test_handwritten_corpus_is_large_enough():
    assert len(HANDWRITTEN) >= 50


@pytest.mark.parametrize("text", HANDWRITTEN)
def test_handwritten_models_are_preserved(text):
    _agree_in_both_modes(text)


def test_random_models_over_every_builtin_are_preserved(rng):
    names = sorted(BUILTIN_TEMPLATES)
    for index in range(RANDOM_MODELS):
        _agree_in_both_modes(random_builtin_model(rng, names[index % len(names)]))


def test_templates_cover_the_builtin_table():
    assert set(BUILTIN_TEMPLATES) == SUPPORTED


def test_random_corpus_draws_every_builtin(rng):
    names = sorted(BUILTIN_TEMPLATES)
    drawn = set()
    for index in range(RANDOM_MODELS):
        model = parse_fzn(random_builtin_model(rng, names[index % len(names)]))
        drawn.update(constraint.name for constraint in model.constraints)
    assert SUPPORTED <= drawn
