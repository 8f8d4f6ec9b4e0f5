import json

import pytest

from qfa_lab import classical, fileformat, zoo
from qfa_lab.fileformat import ParseError, dumps, loads


def test_roundtrip_bit_exact_on_zoo(small_zoo):
    for name, m in small_zoo.items():
        again = loads(dumps(m))
        assert again.states == m.states, name
        assert again.alphabet == m.alphabet
        assert again.initial == m.initial
        assert again.acc == m.acc and again.rej == m.rej
        assert again.completed_columns == m.completed_columns
        assert again.delta == m.delta, f"{name}: amplitudes must round-trip exactly"


def test_roots_of_unity_serialized_structurally(prop1_n2):
    doc = json.loads(dumps(prop1_n2))
    structured = [
        e for e in doc["presentation"]["entries"] if isinstance(e[4], dict)
    ]
    assert structured, "phase amplitudes should use the structural encoding"
    assert all({"k", "n", "rsqrt"} <= set(e[4]) for e in structured)


def test_dfa_roundtrip():
    d = classical.mod3_dfa()
    again = loads(dumps(d))
    assert isinstance(again, classical.Dfa)
    assert again.states == d.states
    assert again.trans == dict(d.trans)
    assert again.accepting == d.accepting


def test_unknown_fields_strict_vs_lenient(upal_n2):
    doc = json.loads(dumps(upal_n2))
    doc["surprise"] = 1
    text = json.dumps(doc)
    with pytest.raises(ParseError):
        loads(text, strict=True)
    warnings: list[str] = []
    m = loads(text, strict=False, warnings=warnings)
    assert warnings and "surprise" in warnings[0]
    assert m.states == upal_n2.states


def test_parse_error_positions():
    with pytest.raises(ParseError) as err:
        loads("{ not json")
    assert "line 1" in str(err.value)
    with pytest.raises(ParseError):
        loads('{"kind": "other", "format_version": 1}')
    with pytest.raises(ParseError):
        loads('{"format_version": 99, "kind": "2qfa"}')


def test_save_load(tmp_path, lemma2_n2):
    path = tmp_path / "m.json"
    fileformat.save(lemma2_n2, path)
    again = fileformat.load(path)
    assert again.delta == lemma2_n2.delta
