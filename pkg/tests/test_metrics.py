import math

import pytest

from qfa_lab import classical, metrics, ops, zoo
from qfa_lab.metrics import (
    BoundReport,
    PreconditionFailed,
    check_lemma1_bounds,
    check_lemma1_dfa_bound,
    check_operation_bounds,
    check_prop3,
    qsc_witness,
    remark1_reports,
    render_table,
)


def test_qsc_witness_counts(lemma2_n2):
    assert qsc_witness(lemma2_n2) == 16
    comp, _ = ops.complement(lemma2_n2)
    assert qsc_witness(comp) == 16
    rev, _ = ops.reverse(lemma2_n2)
    assert qsc_witness(rev) == 17


def test_lemma1_lower_bound_achieved_by_universal(universal_acceptor):
    reports = check_lemma1_bounds(universal_acceptor, lambda x: True, 3, eps=0.0)
    by_id = {r.bound_id: r for r in reports}
    assert by_id["Lemma1.1.lower"].holds
    assert by_id["Lemma1.1.lower"].rhs == 1  # the one-state witness meets the floor
    assert by_id["Lemma1.1.upper"].holds


def test_lemma1_bounds_on_counter(lemma2_n2):
    pred = zoo.intended_predicate(lemma2_n2)
    reports = check_lemma1_bounds(lemma2_n2, pred, 4, eps=0.0)
    upper = {r.bound_id: r for r in reports}["Lemma1.1.upper"]
    assert upper.lhs == 16 and upper.rhs == 1 + 2 + 4 + 8 + 16
    assert upper.holds


def test_lemma1_refuses_unrecognized_language(lemma2_n2):
    with pytest.raises(PreconditionFailed):
        check_lemma1_bounds(lemma2_n2, lambda x: True, 3, eps=0.0)


def test_lemma1_dfa_bound():
    reports = check_lemma1_dfa_bound(classical.parity_dfa(), maxlen=5)
    assert reports[0].holds and reports[0].rhs == 2 * 2 + 6


def test_prop3_reports():
    reports = {r.bound_id: r for r in check_prop3(3)}
    assert reports["Prop3.MyhillNerode"].holds
    assert reports["Prop3.MyhillNerode"].rhs == 17  # (n+1)^2 + 1 exact classes
    printed = reports["Eq4.asPrinted"]
    assert printed.lhs == 22
    assert printed.rhs == pytest.approx(math.sqrt(17) / 6 - 4)
    assert not printed.holds  # the printed direction fails on exact values
    conj = reports["Eq4.conjecturedTransposed"]
    assert conj.holds and conj.notes


def test_prop3_smallest_case_well_formed():
    reports = check_prop3(1)
    assert len(reports) == 3
    assert all(isinstance(r, BoundReport) for r in reports)


def test_operation_bounds_reverse_and_complement(lemma2_n2):
    _, rev_audit = ops.reverse(lemma2_n2)
    (report,) = check_operation_bounds(rev_audit)
    assert report.bound_id == "Eq3" and report.holds and report.lhs - report.rhs == 0
    _, comp_audit = ops.complement(lemma2_n2)
    (report,) = check_operation_bounds(comp_audit)
    assert report.bound_id == "Lemma4" and report.holds


def test_operation_bounds_intersect_gap():
    m1, m2 = zoo.prop2_machines(2)
    _, audit = ops.intersect(m1, m2, 4)
    reports = check_operation_bounds(audit)
    eq6 = reports[0]
    assert eq6.bound_id == "Eq6"
    assert not eq6.holds  # exact count exceeds the formula by the rewind chain
    assert audit.gap == 6


def test_operation_bounds_corollary_selection(universal_acceptor):
    mu, audit = ops.union(universal_acceptor, zoo.upal_machine(2), 3)
    ids = [r.bound_id for r in check_operation_bounds(audit)]
    assert ids == ["Eq7", "Eq9"]


def test_remark1_rows_exact_counts():
    reports = remark1_reports(2)
    by_id = {r.bound_id: r for r in reports}
    assert by_id["Remark1.L1"].lhs == 19 and by_id["Remark1.L1"].rhs == 17
    assert by_id["Remark1.L2"].lhs == 20 and by_id["Remark1.L2"].rhs == 18
    assert by_id["Remark1.L1capL2"].lhs == 27 and by_id["Remark1.L1capL2"].rhs == 22
    # the constructed machines exceed the claimed bounds; recorded, not hidden
    assert not any(r.holds for r in reports)
    # the one-state relation between the two component machines is preserved
    assert by_id["Remark1.L2"].lhs == by_id["Remark1.L1"].lhs + 1


def test_remark1_deterministic():
    a = [r.to_dict() for r in remark1_reports(3)]
    b = [r.to_dict() for r in remark1_reports(3)]
    assert a == b


def test_render_table_shape():
    text = render_table(check_prop3(2))
    lines = text.splitlines()
    assert len(lines) == 4
    assert "Eq4.asPrinted" in text and "FAILS" in text
