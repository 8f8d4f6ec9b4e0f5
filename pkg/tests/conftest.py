import itertools

import pytest

from qfa_lab import zoo
from qfa_lab.core import LEFT_END, RIGHT_END, MachineSpec, VdForm, from_vd_form
from qfa_lab.wellformed import complete_unitary

ONE = 1.0 + 0j


@pytest.fixture(scope="session")
def lemma2_n2():
    return zoo.lemma2_machine(2)


@pytest.fixture(scope="session")
def prop1_n2():
    return zoo.prop1_machine(2)


@pytest.fixture(scope="session")
def prop2_pair_n2():
    return zoo.prop2_machines(2)


@pytest.fixture(scope="session")
def upal_n2():
    return zoo.upal_machine(2)


@pytest.fixture(scope="session")
def small_zoo(lemma2_n2, prop1_n2, prop2_pair_n2, upal_n2):
    m1, m2 = prop2_pair_n2
    return {
        "lemma2[n=1]": zoo.lemma2_machine(1),
        "lemma2[n=2]": lemma2_n2,
        "prop1[N=2]": prop1_n2,
        "prop2_m1[N=2]": m1,
        "prop2_m2[N=2]": m2,
        "upal[N=2]": upal_n2,
        "upal[N=3]": zoo.upal_machine(3),
    }


@pytest.fixture(scope="session")
def universal_acceptor():
    """One non-halting-free state that accepts everything at step zero."""
    return MachineSpec(
        states=("u",), alphabet=("a", "b"), initial="u",
        acc=frozenset({"u"}), rej=frozenset(), delta={},
    )


@pytest.fixture(scope="session")
def empty_language_machine():
    """Initial state rejects immediately: the empty language."""
    return MachineSpec(
        states=("z",), alphabet=("a", "b1", "b2"), initial="z",
        acc=frozenset(), rej=frozenset({"z"}), delta={},
    )


@pytest.fixture(scope="session")
def right_mover():
    """One state that marches right forever; never halts."""
    delta = {("m", sym): (("m", 1, ONE),) for sym in ("a", LEFT_END, RIGHT_END)}
    return MachineSpec(
        states=("m",), alphabet=("a",), initial="m",
        acc=frozenset(), rej=frozenset(), delta=delta,
    )


@pytest.fixture(scope="session")
def cplus_machine():
    """Right-endmarker-accepting recognizer of c+ (error 0): bounce once
    off the left endmarker after the first c, then sweep right."""
    vd = VdForm(
        states=("k0", "k1", "k2", "ACC", "REJ"),
        alphabet=("c",),
        v={
            LEFT_END: {"k0": {"k0": ONE}, "k1": {"k2": ONE}},
            "c": {"k0": {"k1": ONE}, "k2": {"k2": ONE}},
            RIGHT_END: {"k0": {"REJ": ONE}, "k2": {"ACC": ONE}},
        },
        d={"k0": 1, "k1": -1, "k2": 1, "ACC": 0, "REJ": 0},
        specified={LEFT_END: ("k0", "k1"), "c": ("k0", "k2"), RIGHT_END: ("k0", "k2")},
    )
    return from_vd_form(complete_unitary(vd), "k0", {"ACC"}, {"REJ"}, meta={})


def strings_upto(alphabet, maxlen):
    for n in range(maxlen + 1):
        yield from itertools.product(tuple(alphabet), repeat=n)
