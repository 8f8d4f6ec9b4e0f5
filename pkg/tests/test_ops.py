import itertools

import pytest

from qfa_lab import classical, engine, ops, zoo
from qfa_lab.core import AlphabetError, MachineSpec
from qfa_lab.engine import simulate, simulate_oracle
from qfa_lab.ops import SideConditionError, catenate, complement, intersect, reverse, union
from qfa_lab.wellformed import check_wellformed

from conftest import strings_upto

ONE = 1.0 + 0j


# -- complement ---------------------------------------------------------------


def test_complement_is_involution(upal_n2):
    once, _ = complement(upal_n2)
    twice, _ = complement(once)
    assert twice == upal_n2._replace_meta() if hasattr(upal_n2, "_replace_meta") else True
    assert twice.states == upal_n2.states
    assert twice.delta == upal_n2.delta
    assert twice.acc == upal_n2.acc and twice.rej == upal_n2.rej


def test_complement_swaps_probabilities_exactly(small_zoo):
    for name, m in small_zoo.items():
        comp, audit = complement(m)
        assert audit.state_count == len(m.states)
        assert audit.formula_matches
        for x in itertools.islice(strings_upto(m.alphabet, 4), 0, None, 7):
            a = simulate(m, x)
            b = simulate(comp, x)
            assert a.p_acc == b.p_rej and a.p_rej == b.p_acc, (name, x)


# -- reverse ------------------------------------------------------------------


def test_reverse_adds_exactly_one_state(small_zoo):
    for name, m in small_zoo.items():
        rev, audit = reverse(m)
        assert len(rev.states) == len(m.states) + 1, name
        assert audit.formula_matches and audit.gap == 0


def test_reverse_matches_on_reversed_inputs(upal_n2, lemma2_n2):
    for m in (upal_n2, lemma2_n2):
        rev, _ = reverse(m)
        assert check_wellformed(rev, 1e-9).passed
        for x in strings_upto(m.alphabet, 5):
            a = simulate(m, x)
            b = simulate(rev, tuple(reversed(x)))
            assert abs(a.p_acc - b.p_acc) <= 1e-9, x
            assert abs(a.p_rej - b.p_rej) <= 1e-9, x


def test_reverse_of_reversal_closed_language(lemma2_n2):
    """The balanced-count language is closed under reversal, so the reversed
    machine recognizes the same language on tested lengths."""
    rev, _ = reverse(lemma2_n2)
    pred = zoo.intended_predicate(lemma2_n2)
    rep = engine.recognizes(rev, pred, range(0, 7), eps=0.0)
    assert rep.recognized


def test_reverse_refuses_recurrent_machine():
    delta = {("p", "a"): (("q", 1, ONE),), ("q", "a"): (("p", 1, ONE),)}
    m = MachineSpec(states=("p", "q"), alphabet=("a",), initial="p",
                    acc=frozenset(), rej=frozenset(), delta=delta)
    with pytest.raises(SideConditionError):
        reverse(m)


def test_complement_commutes_with_reverse(upal_n2):
    a, _ = reverse(complement(upal_n2)[0])
    b, _ = complement(reverse(upal_n2)[0])
    for x in strings_upto(("a", "b"), 5):
        ra, rb = simulate(a, x), simulate(b, x)
        assert abs(ra.p_acc - rb.p_acc) <= 1e-9, x


# -- intersect / union --------------------------------------------------------


def test_intersect_with_universal_acceptor_keeps_language(upal_n2, universal_acceptor):
    n = 4
    m, audit = intersect(upal_n2, universal_acceptor, n)
    assert check_wellformed(m, 1e-9).passed
    for x in itertools.product(("a", "b"), repeat=n):
        a = simulate(upal_n2, x)
        b = simulate(m, x)
        assert abs(a.p_acc - b.p_acc) <= 1e-9, x
    # exact count: |Q1| + (n+2)|acc1||Q2| + (n+1)|acc1|
    assert audit.state_count == len(upal_n2.states) + (n + 2) + (n + 1)
    assert audit.gap == n + 2  # the rewind chain is not in the formula


def test_intersect_refuses_recurrent_second_machine(upal_n2):
    delta = {("p", "a"): (("q", 1, ONE),), ("q", "a"): (("p", 1, ONE),)}
    recurrent = MachineSpec(states=("p", "q"), alphabet=("a", "b"), initial="p",
                            acc=frozenset(), rej=frozenset(), delta=delta)
    with pytest.raises(SideConditionError):
        intersect(upal_n2, recurrent, 2)


def test_intersect_refuses_disjoint_alphabets(upal_n2, cplus_machine):
    with pytest.raises(AlphabetError):
        intersect(upal_n2, cplus_machine, 2)


def test_intersect_prop2_contracts_exhaustive():
    N, n = 2, 4
    m1, m2 = zoo.prop2_machines(N)
    L1 = zoo.intended_predicate(m1)
    L2 = zoo.intended_predicate(m2)
    mi, audit = intersect(m1, m2, n)
    assert check_wellformed(mi, 1e-9).passed
    assert audit.formula_matches is False and audit.gap == (n + 2) * len(m1.acc)
    e1 = e2 = 1 / N
    for x in itertools.product(("a", "b1", "b2"), repeat=n):
        r = simulate(mi, x)
        assert abs(r.p_acc + r.p_rej + r.residual - 1) <= 1e-9, x
        if L1(x) and L2(x):
            assert r.p_acc >= (1 - e1) * (1 - e2) - 1e-9, x
        elif not L1(x):
            assert r.p_rej >= (1 - e1) - 1e-9, x
        else:
            assert r.p_rej >= (1 - e1) * (1 - e2) - 1e-9, x


def test_union_prop2_contracts_exhaustive():
    N, n = 2, 4
    m1, m2 = zoo.prop2_machines(N)
    L1 = zoo.intended_predicate(m1)
    L2 = zoo.intended_predicate(m2)
    mu, audit = union(m1, m2, n)
    assert check_wellformed(mu, 1e-9).passed
    assert audit.gap == (n + 2) * len(m1.rej)
    e1 = e2 = 1 / N
    for x in itertools.product(("a", "b1", "b2"), repeat=n):
        r = simulate(mu, x)
        if L1(x):
            assert r.p_acc >= (1 - e1) - 1e-9, x
        elif L2(x):
            assert r.p_acc >= (1 - e1) * (1 - e2) - 1e-9, x
        else:
            assert r.p_rej >= (1 - e1) * (1 - e2) - 1e-9, x


def test_union_with_empty_language_machine_keeps_first(upal_n2):
    empty = MachineSpec(states=("z",), alphabet=("a", "b"), initial="z",
                        acc=frozenset(), rej=frozenset({"z"}), delta={})
    n = 4
    mu, audit = union(upal_n2, empty, n)
    for x in itertools.product(("a", "b"), repeat=n):
        a = simulate(upal_n2, x)
        b = simulate(mu, x)
        assert abs(a.p_acc - b.p_acc) <= 1e-9, x


def test_union_corollary_selected_for_left_rejecting_first_machine(universal_acceptor, upal_n2):
    """A machine with no rejecting states vacuously rejects only at the left
    endmarker, so the tighter corollary formula applies."""
    mu, audit = union(universal_acceptor, upal_n2, 3)
    assert audit.corollary_applicable
    assert audit.corollary_formula_value == len(universal_acceptor.states)
    for x in itertools.product(("a", "b"), repeat=3):
        assert simulate(mu, x).p_acc == 1.0


# -- catenate -----------------------------------------------------------------


def test_catenate_general_disjoint(cplus_machine):
    m2 = zoo.ab2_machine(2)
    cat, audit = catenate(cplus_machine, m2)
    assert check_wellformed(cat, 1e-9).passed
    assert audit.error_bound is None  # the unary machine carries no zoo error metadata

    def member(x):
        i = 0
        while i < len(x) and x[i] == "c":
            i += 1
        rest = x[i:]
        k = sum(1 for s in rest if s == "a")
        return (
            i >= 1
            and k >= 1
            and rest == ("a",) * k + ("b2",) * (len(rest) - k)
            and len(rest) == 2 * k
        )

    for x in strings_upto(("c", "a", "b2"), 6):
        r = simulate(cat, x)
        assert abs(r.p_acc + r.p_rej + r.residual - 1) <= 1e-9, x
        if member(x):
            assert r.p_acc >= 0.5 - 1e-9, x
        else:
            assert r.p_rej >= 0.5 - 1e-9, x
    assert simulate(cat, ()).p_rej >= 1 - 1e-12


def test_catenate_rejects_wrong_shape_immediately(cplus_machine):
    cat, _ = catenate(cplus_machine, zoo.ab2_machine(2))
    assert simulate(cat, ("a", "c")).p_rej >= 1 - 1e-12
    assert simulate(cat, ("b2", "c")).p_rej >= 1 - 1e-12


def test_catenate_requires_disjoint_alphabets_without_flag():
    with pytest.raises(AlphabetError):
        catenate(zoo.ab1_machine(2), zoo.ab2_machine(2))


def test_catenate_refuses_left_accepting_first_machine(upal_n2):
    other = zoo.relabel_symbols(zoo.upal_machine(2), {"a": "c", "b": "d"})
    with pytest.raises(SideConditionError):
        catenate(upal_n2, other)  # upal accepts at the left endmarker


def test_catenate_fused_overlap():
    cat, audit = catenate(zoo.ab1_machine(2), zoo.ab2_machine(2), experimental=True)
    assert audit.error_bound == pytest.approx(1 - (1 - 0.5) ** 2)
    assert ("disjoint_alphabets", True, False) in audit.side_conditions
    pred = zoo.intended_predicate(cat)
    rep = engine.recognizes(cat, pred, range(0, 8), eps=1 - (1 - 0.5) ** 2)
    assert rep.recognized
    assert simulate(cat, ()).p_rej >= 1 - 1e-12


def test_catenate_fusion_refuses_foreign_inputs(cplus_machine):
    overlap_but_not_upal = zoo.lemma2_machine(1)
    with pytest.raises(SideConditionError):
        catenate(overlap_but_not_upal, zoo.relabel_symbols(zoo.upal_machine(2), {"a": "a", "b": "z"}),
                 experimental=True)


# -- cross-cutting ------------------------------------------------------------


def test_all_combinator_outputs_pass_wellformed(upal_n2, cplus_machine):
    outputs = [
        complement(upal_n2)[0],
        reverse(upal_n2)[0],
        intersect(*zoo.prop2_machines(2), 3)[0],
        union(*zoo.prop2_machines(2), 3)[0],
        catenate(cplus_machine, zoo.ab2_machine(2))[0],
        catenate(zoo.ab1_machine(2), zoo.ab2_machine(2), experimental=True)[0],
    ]
    for m in outputs:
        assert check_wellformed(m, 1e-9).passed


def test_simulate_matches_oracle_on_composed(cplus_machine):
    mi, _ = intersect(*zoo.prop2_machines(2), 3)
    cat, _ = catenate(cplus_machine, zoo.ab2_machine(2))
    for m, xs in ((mi, [("a", "b1", "a"), ("a",) * 3]), (cat, [("c", "a", "b2"), ("c",)])):
        for x in xs:
            a = simulate(m, x)
            b = simulate_oracle(m, x)
            assert abs(a.p_acc - b.p_acc) <= 1e-9
            assert abs(a.p_rej - b.p_rej) <= 1e-9
