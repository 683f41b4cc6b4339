import pytest
from hypothesis import given, settings

from cdagsat.cnf_io import Formula
from cdagsat.oracle import brute_force, eval_formula
from cdagsat.solver import (
    EMPTY_ROW,
    CertificateStatus,
    SolveOptions,
    Verdict,
    check_certificate,
    solve,
    sort_clauses,
)

from conftest import formulas


def test_sample(sample):
    v = solve(sample, SolveOptions(trace=True))
    assert v.satisfiable
    assert v.stats.root_column == 1 and v.stats.roots_tried == 1
    assert v.certificate == (False,) * 6
    assert v.certificate_status is CertificateStatus.VERIFIED
    assert v.trace.events("verdict")[-1]["satisfiable"] is True


def test_unsat8_empty_row(unsat8):
    v = solve(unsat8, SolveOptions(trace=True))
    assert not v.satisfiable
    assert v.stats.unsat_reason == EMPTY_ROW
    assert v.stats.roots_tried == 0
    assert v.certificate is None
    assert v.certificate_status is CertificateStatus.NOT_APPLICABLE
    assert v.trace.events("source") == []


def test_empty_formula():
    v = solve(Formula(3, ()))
    assert v.satisfiable and v.certificate == (False,) * 3
    assert v.certificate_status is CertificateStatus.VERIFIED
    assert solve(Formula(0, ())).certificate == ()


def test_without_extraction(sample):
    v = solve(sample, SolveOptions(extract_certificate=False))
    assert v.satisfiable and v.certificate is None
    assert v.certificate_status is CertificateStatus.NOT_APPLICABLE


def test_verdict_invariant():
    with pytest.raises(ValueError):
        Verdict(False, certificate=(True,))


def test_check_certificate(sample):
    assert check_certificate(sample, (False,) * 6)
    assert not check_certificate(sample, (True,) * 6)
    with pytest.raises(ValueError):
        check_certificate(sample, (True,) * 7)


def test_sort_clauses(sample):
    ordered = sort_clauses(sample)
    assert ordered[0].to_ints() == (-1, -2, -3)
    assert ordered[-1].to_ints() == (-2, 3, -5)
    assert sorted(ordered, key=str) == sorted(sample.clauses, key=str)


@settings(max_examples=120, deadline=None)
@given(formulas(min_n=3, max_n=6, max_m=35))
def test_solver_invariants(f):
    v = solve(f)
    if v.certificate_status is CertificateStatus.VERIFIED:
        assert eval_formula(f, v.certificate)
    if not v.satisfiable:
        assert v.certificate is None
        if v.stats.unsat_reason == EMPTY_ROW:
            assert not brute_force(f).satisfiable
    again = solve(f)
    assert (again.satisfiable, again.certificate, again.certificate_status) == (
        v.satisfiable, v.certificate, v.certificate_status)
    assert again.stats.removed == v.stats.removed
