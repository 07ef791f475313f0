from fractions import Fraction

import pytest

from zinc_bridge.errors import ScopeError, SortMismatchError, UnknownSymbolError
from zinc_bridge.smtlib import (
    BOOL,
    INT,
    REAL,
    Sort,
    SortKind,
    TermManager,
    bitvec,
    count_fathers,
    iter_dag,
    structure,
)
from zinc_bridge.smtlib.printer import (
    TermPrinter,
    format_const,
    format_weight,
    quote_symbol,
)


@pytest.fixture
def manager():
    return TermManager()


def test_terms_are_hash_consed(manager):
    x = manager.var("x", INT)
    y = manager.var("y", INT)
    assert manager.app("+", [x, y]) is manager.app("+", [x, y])
    assert manager.var("x", INT) is x
    assert manager.var("x", REAL) is not x
    assert manager.bool_const(True) is not manager.int_const(1)


def test_int_arguments_are_coerced_to_real(manager):
    x = manager.var("x", INT)
    r = manager.var("r", REAL)
    total = manager.app("+", [x, r, manager.int_const(1)])
    assert total.sort == REAL
    assert total.args[0].op == "to_real"
    assert total.args[2] is manager.real_const(1)


def test_constant_folding(manager):
    assert manager.app("-", [manager.int_const(3)]) is manager.int_const(-3)
    quarter = manager.app("/", [manager.int_const(1), manager.int_const(4)])
    assert quarter is manager.real_const(Fraction(1, 4))


def test_chains_and_implications(manager):
    a, b, c = (manager.var(name, INT) for name in "abc")
    chain = manager.app("<=", [a, b, c])
    assert chain.op == "and"
    assert [arg.args for arg in chain.args] == [(a, b), (b, c)]
    p, q, r = (manager.var(name, BOOL) for name in "pqr")
    implication = manager.app("=>", [p, q, r])
    assert implication.args[1] is manager.app("=>", [q, r])


def test_bitvector_sorts(manager):
    v = manager.var("v", bitvec(8))
    assert manager.app("extract", [v], (6, 3)).sort == bitvec(4)
    assert manager.app("zero_extend", [v], (4,)).sort == bitvec(12)
    assert manager.app("concat", [v, v]).sort == bitvec(16)
    assert manager.app("bvcomp", [v, v]).sort == bitvec(1)
    assert manager.app("bvult", [v, v]).sort == BOOL
    assert manager.const(-1, bitvec(8)) is manager.bv_const(255, 8)


@pytest.mark.parametrize(
    "build, error",
    [
        (lambda m, x, v: m.app("*", [x, x]), ScopeError),
        (lambda m, x, v: m.app("div", [m.int_const(4), x]), ScopeError),
        (lambda m, x, v: m.app("/", [m.int_const(4), x]), ScopeError),
        (lambda m, x, v: m.app("and", [x]), SortMismatchError),
        (lambda m, x, v: m.app("not", [m.bool_const(True)] * 2), SortMismatchError),
        (lambda m, x, v: m.app("+", [x, v]), SortMismatchError),
        (lambda m, x, v: m.app("=", [x, v]), SortMismatchError),
        (lambda m, x, v: m.app("extract", [v], (8, 0)), SortMismatchError),
        (lambda m, x, v: m.app("bvadd", [v, m.bv_const(0, 4)]), SortMismatchError),
        (lambda m, x, v: m.bv_const(256, 8), SortMismatchError),
        (lambda m, x, v: m.app("frob", [x]), UnknownSymbolError),
    ],
)
def test_ill_formed_terms(manager, build, error):
    x = manager.var("x", INT)
    v = manager.var("v", bitvec(8))
    with pytest.raises(error):
        build(manager, x, v)


def test_sorts():
    assert str(bitvec(8)) == "(_ BitVec 8)"
    assert str(REAL) == "Real"
    with pytest.raises(ValueError):
        Sort(SortKind.BITVEC)
    with pytest.raises(ValueError):
        Sort(SortKind.INT, 3)


def test_father_counts(manager):
    x = manager.var("x", BOOL)
    y = manager.var("y", BOOL)
    both = manager.app("or", [x, x])
    root = manager.app("and", [both, y, both])
    counts = count_fathers([root])
    assert counts[x.id] == 2
    assert counts[both.id] == 2
    assert counts[y.id] == 1
    assert counts[root.id] == 0
    order = [term.id for term in iter_dag([root])]
    assert order.index(x.id) < order.index(both.id) < order.index(root.id)
    assert len(order) == 4


def test_structure_is_manager_independent():
    def build(manager):
        x = manager.var("x", INT)
        return manager.app("<=", [x, manager.int_const(3)])

    assert structure(build(TermManager())) == structure(build(TermManager()))


def test_constant_and_symbol_printing(manager):
    assert format_const(manager.int_const(-3)) == "(- 3)"
    assert format_const(manager.real_const(Fraction(-1, 2))) == "(- (/ 1 2))"
    assert format_const(manager.real_const(2)) == "2.0"
    assert format_const(manager.bv_const(5, 4)) == "#b0101"
    assert format_weight(Fraction(3)) == "3"
    assert format_weight(Fraction(1, 2)) == "0.5"
    assert format_weight(Fraction(1, 3)) == "(/ 1 3)"
    assert quote_symbol("x") == "x"
    assert quote_symbol("a b") == "|a b|"
    assert quote_symbol("let") == "|let|"


def test_term_printer_shares_subterms(manager):
    x = manager.var("x", INT)
    total = manager.app("+", [x, manager.int_const(1)])
    term = manager.app("<=", [total, total])
    assert TermPrinter()(term) == "(<= (+ x 1) (+ x 1))"
