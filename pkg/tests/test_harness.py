from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdagsat.cnf_io import Formula, emit_dimacs, parse_dimacs
from cdagsat.oracle import brute_force
from cdagsat.solver import CertificateStatus, Verdict, check_certificate, solve
from cdagsat.trace import loads_records
from cdagsat.harness import (
    PLANTED,
    Anomaly,
    GenParams,
    formula_digest,
    gen_random,
    generate,
    run_bench,
    run_campaign,
    run_diff,
    shrink,
    validate_corpus,
)

from conftest import UNSAT8


def always_sat(f, opts=None):
    # test double: claims SAT without a certificate
    return Verdict(True, certificate_status=CertificateStatus.NOT_FOUND)


def lying_solver(f, opts=None):
    # test double: flips the verdict whenever the formula mentions x_1 negatively
    v = solve(f, opts)
    if any(lit.var == 1 and lit.negated for c in f.clauses for lit in c.lits):
        return Verdict(not v.satisfiable)
    return v


def test_generator_determinism():
    p = GenParams(6, 20, seed=0)
    assert emit_dimacs(gen_random(p)) == emit_dimacs(gen_random(p))
    assert formula_digest(gen_random(p)) == "0e92d6d7e901bbc9"
    f = gen_random(p)
    assert (f.n, f.m) == (6, 20)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 12), st.integers(0, 60), st.integers(0, 2**64 - 1))
def test_planted_hidden_assignment_satisfies(n, m, seed):
    if m > 7 * comb(n, 3):
        with pytest.raises(ValueError):
            generate(GenParams(n, m, PLANTED, seed))
        return
    inst = generate(GenParams(n, m, PLANTED, seed))
    assert inst.formula.m == m
    assert check_certificate(inst.formula, inst.hidden)


def test_generator_limits():
    with pytest.raises(ValueError):
        gen_random(GenParams(3, 9))
    assert gen_random(GenParams(3, 8)).m == 8
    f = gen_random(GenParams(3, 30, replacement=True))
    assert f.m <= 8
    with pytest.raises(ValueError):
        gen_random(GenParams(2, 1))


def test_run_diff_sample(sample, unsat8):
    d = run_diff(sample)
    assert d.agree and d.anomaly is Anomaly.NONE
    d = run_diff(unsat8)
    assert d.agree and not d.solver.satisfiable and not d.oracle.satisfiable


def test_run_diff_fabricated_mismatch(unsat8, sample):
    assert run_diff(unsat8, always_sat).anomaly is Anomaly.VERDICT_MISMATCH
    d = run_diff(sample, always_sat)
    assert d.agree and d.anomaly is Anomaly.CERTIFICATE_NOT_FOUND
    rec = d.record()
    assert "solverTime" not in rec and rec["anomaly"] == "certificateNotFound"


def _is_unsat(f):
    return not brute_force(f).satisfiable


def test_shrink_to_core():
    junk = [(4, 5, 6), (-4, 5, 7), (1, -5, 6), (-2, 6, -7), (3, 4, -7)]
    f = Formula.of(7, list(UNSAT8) + junk)
    r = shrink(f, _is_unsat)
    assert r.held
    assert set(r.formula.clauses) == set(Formula.of(3, UNSAT8).clauses)
    assert r.formula.n == 3
    # the core is UNSAT and every 7-subset is SAT
    core = r.formula.clauses
    assert _is_unsat(r.formula)
    for drop in range(8):
        assert not _is_unsat(Formula(3, core[:drop] + core[drop + 1 :]))
    assert shrink(f, _is_unsat) == r


def test_shrink_predicate_fails(sample):
    r = shrink(sample, _is_unsat)
    assert not r.held and r.formula == sample


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(20, 45))
def test_shrink_one_minimal(seed, m):
    f = gen_random(GenParams(5, m, seed=seed))
    if not _is_unsat(f):
        return
    r = shrink(f, _is_unsat)
    g = r.formula
    assert _is_unsat(g)
    for i in range(g.m):
        assert not _is_unsat(Formula(g.n, g.clauses[:i] + g.clauses[i + 1 :]))


def test_campaign_golden_and_determinism(tmp_path):
    p = GenParams(6, 20, seed=0)
    a = run_campaign(p, 100, tmp_path / "a")
    b = run_campaign(p, 100, tmp_path / "b", jobs=3)
    assert a.trials == 100 == a.agreements + a.disagreements
    assert a.digest == b.digest == "bf577ba24bde373d"
    assert (tmp_path / "a" / "report.meta").read_bytes() == (tmp_path / "b" / "report.meta").read_bytes()
    assert sum(a.anomalies.values()) == a.trials


def test_campaign_zero_trials(tmp_path):
    r = run_campaign(GenParams(6, 20), 0, tmp_path / "z")
    assert r.trials == 0 and r.counterexamples == []
    assert not (tmp_path / "z").exists()


def test_exhaustive_campaign(tmp_path):
    r = run_campaign(GenParams(3, 2), 0, tmp_path / "e", exhaustive=True)
    assert r.trials == comb(8, 2)
    assert r.agreements == r.trials
    with pytest.raises(ValueError):
        run_campaign(GenParams(5, 2), 0, tmp_path / "x", exhaustive=True)


def test_corpus_self_validates(tmp_path):
    out = tmp_path / "lies"
    r = run_campaign(GenParams(5, 12, seed=3), 15, out, solver=lying_solver)
    assert r.disagreements > 0
    assert r.counterexamples
    assert r.anomalies["verdictMismatch"] == r.disagreements
    for name in r.counterexamples:
        meta = loads_records((out / name).with_suffix(".meta").read_text())[0]
        assert meta["anomaly"] == "verdictMismatch"
        shrunk = parse_dimacs((out / name).read_text())
        original = parse_dimacs(meta["original"])
        assert shrunk.m <= original.m
    checks = validate_corpus(out, lying_solver)
    assert checks and all(checks.values())
    records = loads_records((out / "report.meta").read_text())
    assert records[-1]["record"] == "report"
    assert sum(1 for rec in records if rec["record"] == "trial") == 15


def test_bench_deterministic():
    a = run_bench(9, 4.26, 1)
    assert a == run_bench(9, 4.26, 1)
    assert [rec["n"] for rec in a] == list(range(3, 10))
    assert all(rec["agree"] for rec in a)
    assert "solverTime" not in a[0]
    assert "solverTime" in run_bench(3, 1.0, 1, timings=True)[0]
