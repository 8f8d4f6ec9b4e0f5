import pytest

from qfa_lab import classical, engine, zoo
from qfa_lab.core import LEFT_END
from qfa_lab.wellformed import check_wellformed, is_non_circular, is_non_recurrent

from conftest import strings_upto


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_counter_state_count(n):
    assert len(zoo.lemma2_machine(n).states) == 6 * n + 4


def test_counter_recognizes_exactly_against_brute_force():
    m = zoo.lemma2_machine(2)
    pred = zoo.intended_predicate(m)
    for x, is_member in classical.brute_membership(pred, ("a", "b"), 8):
        r = engine.simulate(m, x)
        assert r.halted, x
        assert (r.p_acc >= 1 - 1e-12) == is_member, x
        assert (r.p_rej >= 1 - 1e-12) == (not is_member), x


def test_counter_is_reversible_and_non_recurrent(lemma2_n2):
    assert classical.is_2rfa(lemma2_n2)
    assert is_non_recurrent(lemma2_n2)
    assert is_non_circular(lemma2_n2)


def test_prop1_example_probabilities():
    for N in (2, 4):
        m = zoo.prop1_machine(N)
        assert engine.simulate(m, "a b1 a b2").p_acc >= 1 - 1e-9
        assert engine.simulate(m, "a a b1 a b2").p_rej >= 1 - 1 / N - 1e-9
        assert engine.simulate(m, "b1 a").p_rej >= 1 - 1e-12
        assert not classical.is_2rfa(m)  # genuine superposition split


def test_prop2_example_probabilities(prop2_pair_n2):
    m1, m2 = prop2_pair_n2
    assert engine.simulate(m1, "a a b1 a b2").p_acc >= 1 - 1e-9
    assert engine.simulate(m2, "a b1 a a b2 b2").p_acc >= 1 - 1e-9
    assert engine.simulate(m2, "a b1 a b2").p_acc >= 1 - 1e-9


def test_upal_examples():
    m = zoo.upal_machine(2)
    assert engine.simulate(m, "aabb").p_acc >= 1 - 1e-9
    assert engine.simulate(m, "aab").p_rej >= 0.5 - 1e-9
    assert engine.simulate(m, "ba").p_rej >= 1 - 1e-12


def test_ab_machines():
    m1 = zoo.ab1_machine(2)
    m2 = zoo.ab2_machine(2)
    assert engine.simulate(m1, "a b1").p_acc >= 1 - 1e-9
    assert engine.simulate(m2, "b2 a").p_rej >= 1 - 1e-12
    assert check_wellformed(m1, 1e-10).passed
    assert check_wellformed(m2, 1e-10).passed
    assert zoo.entry(m1).zoo_id == "ab1"


def test_zoo_metadata_and_repairs(small_zoo):
    for name, m in small_zoo.items():
        e = zoo.entry(m)
        assert e.repairs, name  # every machine documents its table repairs
        assert 0.0 <= e.error_bound <= 0.5
        pred = zoo.intended_predicate(m)
        assert callable(pred)


@pytest.mark.parametrize("name_n", [("lemma2", 3)])
def test_counter_language_predicate(name_n):
    pred = zoo.intended_predicate(zoo.lemma2_machine(3))
    assert pred(tuple("aabbba")) and not pred(tuple("ab"))


def test_zoo_recognition_matches_intended_predicate(small_zoo):
    """Recognition at the declared error bound, all strings of length <= 7.

    The acceptance suite runs the full battery to length 8 and beyond;
    this keeps per-module feedback fast.
    """
    for name, m in small_zoo.items():
        e = zoo.entry(m)
        pred = zoo.intended_predicate(m)
        rep = engine.recognizes(m, pred, range(0, 8), eps=e.error_bound)
        assert rep.recognized, (name, rep.counterexamples[:3])


def test_relabel_symbols(upal_n2):
    m = zoo.relabel_symbols(upal_n2, {"a": "x", "b": "y"})
    assert m.alphabet == ("x", "y")
    assert engine.simulate(m, ("x", "y")).p_acc >= 1 - 1e-9
    pred = zoo.intended_predicate(m)
    assert pred(("x", "y")) and not pred(("y", "x"))
    with pytest.raises(Exception):
        zoo.relabel_symbols(upal_n2, {"a": "x"})


def test_standard_zoo_battery_shape():
    battery = zoo.standard_zoo(ns=(1,), Ns=(2,))
    assert set(battery) == {
        "lemma2[n=1]", "prop1[N=2]", "prop2_m1[N=2]", "prop2_m2[N=2]", "upal[N=2]",
    }
