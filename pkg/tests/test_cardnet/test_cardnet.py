import math
from itertools import product

import pytest
from generators import (
    boolean_assignments,
    pb_holds,
    propagate_gates,
    random_pb,
    satisfies,
)

from zinc_bridge.cardnet import (
    FALSE_CLAUSE,
    Literal,
    VariablePool,
    build_cardinality_network,
    encode_atleast_k,
    encode_atmost_k,
    encode_exactly_k,
    encode_pb_sum,
    normalize_pb,
)
from zinc_bridge.errors import CardinalityError


def _inputs(n):
    return [Literal(var) for var in range(1, n + 1)]


def _size_bound(n, k):
    return 6 * n * (math.ceil(math.log2(k + 2)) + 1) ** 2


@pytest.mark.parametrize("n", range(1, 11))
def test_outputs_count_true_inputs(n):
    for k in range(n + 1):
        network = build_cardinality_network(_inputs(n), k)
        assert len(network.output_literals) == min(k + 1, n)
        assert network.aux_variable_count == len(network.gates)
        for assignment in boolean_assignments(n):
            true_count = sum(assignment.values())
            extended = propagate_gates(network.gates, assignment)
            assert satisfies(network.clauses, extended)
            for j, output in enumerate(network.output_literals):
                assert output.value(extended) == (true_count >= j + 1)


@pytest.mark.parametrize(
    "encode, relation",
    [
        (encode_atmost_k, lambda count, k: count <= k),
        (encode_atleast_k, lambda count, k: count >= k),
        (encode_exactly_k, lambda count, k: count == k),
    ],
)
@pytest.mark.parametrize("n", range(1, 11))
def test_cardinality_constraints_are_exact(encode, relation, n):
    for k in range(n + 1):
        network = encode(_inputs(n), k)
        for assignment in boolean_assignments(n):
            true_count = sum(assignment.values())
            extended = propagate_gates(network.gates, assignment)
            assert satisfies(network.clauses, extended) == relation(true_count, k)


def test_trivial_bounds_need_no_network():
    assert encode_atmost_k(_inputs(4), 4).clauses == ()
    assert encode_atleast_k(_inputs(4), 0).clauses == ()


@pytest.mark.parametrize("n", [1, 5, 10, 33, 64])
def test_network_size_stays_within_bound(n):
    for k in sorted(k for k in {0, 1, 3, n // 2, n - 1} if k <= n):
        network = build_cardinality_network(_inputs(n), k)
        assert len(network.clauses) <= _size_bound(n, k)


def test_pool_numbers_auxiliary_variables():
    pool = VariablePool(100)
    network = build_cardinality_network(_inputs(6), 2, pool)
    auxiliary = {gate.output.var for gate in network.gates}
    assert min(auxiliary) == 100
    assert pool.count == network.aux_variable_count == len(auxiliary)
    assert VariablePool.after(_inputs(6)).next == 7


@pytest.mark.parametrize("inputs, k", [([], 0), (_inputs(3), 4), (_inputs(3), -1)])
def test_bad_bounds_raise(inputs, k):
    with pytest.raises(CardinalityError):
        build_cardinality_network(inputs, k)
    with pytest.raises(CardinalityError):
        encode_exactly_k(inputs, k)


def test_normalize_pb_moves_negative_weights_into_the_bound():
    terms = [(Literal(1), 3), (Literal(1, False), 2), (Literal(2), -4)]
    normalized, bound = normalize_pb(terms, 1)
    assert normalized == [(Literal(1), 1), (Literal(2, False), 4)]
    assert bound == 3
    for a, b in product([False, True], repeat=2):
        assignment = {1: a, 2: b}
        assert pb_holds(terms, "<=", 1, assignment) == pb_holds(
            normalized, "<=", bound, assignment
        )


def test_random_pb_constraints_match_brute_force(rng):
    for _ in range(500):
        terms, relation, bound, count = random_pb(rng)
        encoding = encode_pb_sum(terms, relation, bound, VariablePool(count + 1))
        for assignment in boolean_assignments(count):
            expected = pb_holds(terms, relation, bound, assignment)
            if encoding.is_unsat:
                assert not expected
                continue
            extended = propagate_gates(encoding.gates, dict(assignment))
            holds = satisfies(encoding.clauses, extended)
            if encoding.link is not None:
                holds = holds and encoding.link.holds(extended)
            assert holds == expected, (terms, relation, bound, assignment)


def test_unsatisfiable_sum_is_the_empty_clause():
    encoding = encode_pb_sum([(Literal(1), 2), (Literal(2), 3)], ">=", 6)
    assert encoding.is_unsat
    assert FALSE_CLAUSE in encoding.bound_clauses


def test_weight_groups_are_linked():
    terms = [(Literal(1), 2), (Literal(2), 2), (Literal(3), 5)]
    encoding = encode_pb_sum(terms, "=", 7)
    assert encoding.link is not None
    assert sorted(weight for weight, _ in encoding.link.groups) == [2, 5]


@pytest.mark.parametrize(
    "terms, relation",
    [([(Literal(1), 0)], "<="), ([(Literal(1), 1)], "<")],
)
def test_malformed_sums_raise(terms, relation):
    with pytest.raises(ValueError):
        encode_pb_sum(terms, relation, 1)
