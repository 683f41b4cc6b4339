import itertools

import pytest
from hypothesis import given, settings

from cdagsat.cnf_io import Formula
from cdagsat.oracle import MAX_VARS, TooLarge, brute_force, clause_set_oracle, eval_formula
from cdagsat.solver import check_certificate

from conftest import formulas


def test_eval_formula(sample):
    assert eval_formula(sample, (False,) * 6)
    assert not eval_formula(sample, (True,) * 6)
    assert eval_formula(Formula(4, ()), (True, False, True, True))
    with pytest.raises(ValueError):
        eval_formula(sample, (False,) * 5)


def test_brute_force_examples(sample, unsat8):
    r = brute_force(sample)
    assert r.satisfiable and r.witness == (False,) * 6 and r.assignments_checked == 1
    r = brute_force(unsat8)
    assert not r.satisfiable and r.witness is None and r.assignments_checked == 8
    r = brute_force(Formula(3, ()))
    assert r.satisfiable and r.assignments_checked == 1


def test_clause_set_oracle_examples(sample, unsat8):
    assert clause_set_oracle(sample).satisfiable == brute_force(sample).satisfiable
    assert not clause_set_oracle(unsat8).satisfiable


def test_cap():
    big = Formula.of(MAX_VARS + 1, [(1, 2, MAX_VARS + 1)])
    with pytest.raises(TooLarge):
        brute_force(big)
    with pytest.raises(TooLarge):
        clause_set_oracle(big)


def test_witness_is_smallest():
    f = Formula.of(4, [(1, 2, 3), (1, 2, -3), (-1, 3, 4)])
    r = brute_force(f)
    value = sum(bit << p for p, bit in enumerate(r.witness))
    for bits in range(value):
        a = tuple(bool(bits >> p & 1) for p in range(4))
        assert not eval_formula(f, a)


@settings(max_examples=300, deadline=None)
@given(formulas(min_n=3, max_n=6, max_m=40))
def test_oracles_agree(f):
    a, b = brute_force(f), clause_set_oracle(f)
    assert a.satisfiable == b.satisfiable
    if a.satisfiable:
        assert a.witness == b.witness
        assert check_certificate(f, a.witness) and eval_formula(f, b.witness)


@settings(max_examples=100, deadline=None)
@given(formulas(min_n=3, max_n=6, max_m=20))
def test_eval_agrees_with_check_certificate(f):
    for a in itertools.product((False, True), repeat=f.n):
        assert eval_formula(f, a) == check_certificate(f, a)
