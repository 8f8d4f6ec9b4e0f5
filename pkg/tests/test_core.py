import pytest

from qfa_lab import zoo
from qfa_lab.core import (
    LEFT_END,
    RIGHT_END,
    MachineSpec,
    NotDirectionPartitioned,
    ValidationError,
    VdForm,
    from_vd_form,
    parse_input,
    root_of_unity,
    to_vd_form,
)

ONE = 1.0 + 0j


def tiny_vd():
    return VdForm(
        states=("q0",),
        alphabet=("s",),
        v={"s": {"q0": {"q0": ONE}}},
        d={"q0": 1},
        specified={"s": ("q0",)},
    )


def test_from_vd_form_identity_case():
    m = from_vd_form(tiny_vd(), "q0", set(), set())
    assert m.column("q0", "s") == (("q0", 1, ONE),)


def test_from_vd_form_reproduces_counter_start(lemma2_n2):
    assert lemma2_n2.column("q0", LEFT_END) == (("q1", 1, ONE),)


def test_roundtrip_through_vd_form_on_zoo(small_zoo):
    for name, m in small_zoo.items():
        vd = to_vd_form(m)
        back = from_vd_form(vd, m.initial, m.acc, m.rej, meta=dict(m.meta))
        assert back.delta == m.delta, name
        assert back.states == m.states
        assert back.acc == m.acc and back.rej == m.rej


def test_to_vd_form_directions_on_counter(lemma2_n2):
    vd = to_vd_form(lemma2_n2)
    for i in range(2 * 2 + 2):
        assert vd.d[f"q{i}"] == 1
    for i in range(1, 4):
        assert vd.d[f"p{i}"] == -1


def test_to_vd_form_rejects_direction_conflict():
    delta = {
        ("p", "a"): (("q", 1, ONE),),
        ("p", "b"): (("q", -1, ONE),),
    }
    m = MachineSpec(states=("p", "q"), alphabet=("a", "b"), initial="p",
                    acc=frozenset(), rej=frozenset(), delta=delta)
    with pytest.raises(NotDirectionPartitioned) as err:
        to_vd_form(m)
    assert err.value.conflicts == (("q", (-1, 1)),)


def test_to_vd_form_defaults_unentered_states():
    m = MachineSpec(states=("p", "q"), alphabet=("a",), initial="p",
                    acc=frozenset(), rej=frozenset(),
                    delta={("p", "a"): (("p", 1, ONE),)})
    vd = to_vd_form(m)
    assert vd.d["q"] == 0
    assert "q" in vd.defaulted_directions


def test_machine_validation_errors():
    with pytest.raises(ValidationError):
        MachineSpec(states=("p",), alphabet=("a",), initial="missing",
                    acc=frozenset(), rej=frozenset(), delta={})
    with pytest.raises(ValidationError):
        MachineSpec(states=("p",), alphabet=("a",), initial="p",
                    acc=frozenset({"p"}), rej=frozenset({"p"}), delta={})
    with pytest.raises(ValidationError):  # duplicate (target, move) pair in one column
        MachineSpec(states=("p",), alphabet=("a",), initial="p",
                    acc=frozenset(), rej=frozenset(),
                    delta={("p", "a"): (("p", 1, ONE), ("p", 1, 0.5 + 0j))})
    with pytest.raises(ValidationError):  # endmarker used as an input symbol
        MachineSpec(states=("p",), alphabet=("a", RIGHT_END), initial="p",
                    acc=frozenset(), rej=frozenset(), delta={})
    with pytest.raises(ValidationError):  # non-finite amplitude
        MachineSpec(states=("p",), alphabet=("a",), initial="p",
                    acc=frozenset(), rej=frozenset(),
                    delta={("p", "a"): (("p", 1, complex("inf")),)})


def test_core_delta_strips_completion_fill(lemma2_n2):
    core = lemma2_n2.core_delta()
    assert lemma2_n2.completed_columns
    for key in lemma2_n2.completed_columns:
        assert key not in core
        assert key in lemma2_n2.delta


def test_parse_input_greedy_multichar():
    assert parse_input(("a", "b1", "b2"), "ab1ab2") == ("a", "b1", "a", "b2")
    assert parse_input(("a", "b1", "b2"), "a b1  a b2") == ("a", "b1", "a", "b2")
    assert parse_input(("a", "b"), ("a", "b")) == ("a", "b")
    with pytest.raises(Exception):
        parse_input(("a",), "ax")


def test_root_of_unity_exactness():
    assert root_of_unity(0, 4, 1) == 1.0
    z = root_of_unity(1, 4, 4)
    assert abs(z - 0.5j) < 1e-15
    total = sum(root_of_unity(k, 5) for k in range(5))
    assert abs(total) < 1e-14
