"""Parsing, serialization, evaluation, and generation of weighted CNF."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersat.wcnf import (
    Clause,
    WcnfInstance,
    WcnfParseError,
    assign_random_weights,
    evaluate,
    generate_random_3sat,
    parse_cnf,
    parse_wcnf,
    write_wcnf,
)

CNF_SIMPLE = """\
c a comment
p cnf 3 2
1 -2 3 0
-1 2 0
"""

WCNF_SIMPLE = """\
p wcnf 3 2
5 1 -2 3 0
2 -1 2 0
"""


def test_parse_cnf_basic():
    inst = parse_cnf(CNF_SIMPLE, name="simple")
    assert inst.num_vars == 3
    assert inst.num_clauses == 2
    assert inst.clauses[0].literals == (1, -2, 3)
    assert all(cl.weight == 1 for cl in inst.clauses)
    assert inst.name == "simple"


def test_parse_wcnf_weights():
    inst = parse_wcnf(WCNF_SIMPLE)
    assert [cl.weight for cl in inst.clauses] == [5, 2]
    assert inst.total_weight() == 7


def test_parse_clause_spanning_lines():
    text = "p cnf 3 1\n1\n-2\n3 0\n"
    inst = parse_cnf(text)
    assert inst.clauses[0].literals == (1, -2, 3)


def test_parse_satlib_percent_marker():
    text = "p cnf 2 1\n1 2 0\n%\n0\n"
    inst = parse_cnf(text)
    assert inst.num_clauses == 1


def test_parse_errors_carry_line_numbers():
    with pytest.raises(WcnfParseError) as exc:
        parse_cnf("p cnf 2 1\n1 x 0\n")
    assert exc.value.line == 2


def test_parse_rejects_out_of_range_variable():
    with pytest.raises((WcnfParseError, ValueError)):
        parse_cnf("p cnf 2 1\n1 5 0\n")


def test_parse_rejects_clause_count_mismatch():
    with pytest.raises(WcnfParseError):
        parse_cnf("p cnf 2 3\n1 2 0\n")


def test_parse_rejects_missing_header():
    with pytest.raises(WcnfParseError):
        parse_cnf("1 2 0\n")


def test_clause_validation():
    with pytest.raises(ValueError):
        Clause((), 1)
    with pytest.raises(ValueError):
        Clause((1, 1), 1)
    with pytest.raises(ValueError):
        Clause((1, 2), 0)
    with pytest.raises(ValueError):
        Clause((1, 0, 2), 1)


def test_instance_validation():
    with pytest.raises(ValueError):
        WcnfInstance(2, (Clause((3,), 1),))


def test_roundtrip_write_parse():
    inst = parse_wcnf(WCNF_SIMPLE, name="x")
    again = parse_wcnf(write_wcnf(inst), name="x")
    assert again == inst


def test_evaluate_counts_weights_exactly():
    inst = parse_wcnf(WCNF_SIMPLE)
    # clause 1: x1 or not x2 or x3 ; clause 2: not x1 or x2
    ev = evaluate(inst, np.array([1, 0, 0]))
    assert ev.sat_weight == 5 and ev.unsat_weight == 2
    assert list(ev.clause_flags) == [True, False]
    ev = evaluate(inst, np.array([0, 0, 0]))
    assert ev.sat_weight == 7 and ev.unsat_weight == 0


def test_evaluate_rejects_bad_assignment():
    inst = parse_wcnf(WCNF_SIMPLE)
    with pytest.raises(ValueError):
        evaluate(inst, np.array([1, 0]))


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_generator_shape_and_determinism(seed):
    a = generate_random_3sat(12, 30, seed=seed)
    b = generate_random_3sat(12, 30, seed=seed)
    assert a == b
    assert a.num_vars == 12 and a.num_clauses == 30
    for cl in a.clauses:
        assert len(cl.literals) == 3
        assert len({abs(l) for l in cl.literals}) == 3


def test_generator_different_seeds_differ():
    assert generate_random_3sat(20, 60, seed=0) != generate_random_3sat(
        20, 60, seed=1
    )


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_weight_assignment_range_and_determinism(seed):
    inst = generate_random_3sat(10, 30, seed=seed)
    w1 = assign_random_weights(inst, seed=seed)
    w2 = assign_random_weights(inst, seed=seed)
    assert w1 == w2
    for cl in w1.clauses:
        assert 1 <= cl.weight <= 10
    lits = [cl.literals for cl in w1.clauses]
    assert lits == [cl.literals for cl in inst.clauses]


@given(
    st.integers(0, 500),
    st.lists(st.integers(0, 1), min_size=9, max_size=9),
)
@settings(max_examples=50, deadline=None)
def test_sat_plus_unsat_equals_total(seed, bits):
    inst = assign_random_weights(
        generate_random_3sat(9, 25, seed=seed), seed=seed
    )
    ev = evaluate(inst, np.array(bits))
    assert ev.sat_weight + ev.unsat_weight == inst.total_weight()
