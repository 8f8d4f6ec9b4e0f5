"""Machine container format: one JSON document per machine or DFA.

Amplitudes are written as ``[re, im]`` pairs (shortest round-tripping
decimal form) unless they are recognizable roots of unity scaled by an
inverse square root, in which case they are written structurally as
``{"k": k, "n": n, "rsqrt": m}`` meaning ``exp(2 pi i k / n) / sqrt(m)``
and regenerated through the same single cos/sin evaluation on import,
which makes the round trip bit-exact.  The machine's metadata carries the
phase order used for detection.

Unknown top-level fields are rejected in strict mode and reported as
warnings otherwise.
"""

from __future__ import annotations

import cmath
import json
import math
from typing import Any

from .classical import Dfa
from .core import MachineSpec, QfaError, ValidationError, root_of_unity

FORMAT_VERSION = 1

_MACHINE_FIELDS = {
    "format_version",
    "kind",
    "states",
    "alphabet",
    "initial",
    "acc",
    "rej",
    "presentation",
    "metadata",
}
_DFA_FIELDS = {"format_version", "kind", "states", "alphabet", "initial", "accepting", "transitions", "metadata"}


class ParseError(QfaError):
    """The document does not parse as a machine container."""


def _encode_amp(amp: complex, phase_order: int) -> Any:
    # Structural form only for exact regenerations: the round trip must be
    # bit-identical, so near-misses (e.g. completion-fill residuals one ulp
    # off a canonical root) stay as plain pairs.
    if abs(amp) > 0:
        for rsqrt in (1, phase_order):
            if rsqrt < 1 or abs(abs(amp) - 1 / math.sqrt(rsqrt)) > 1e-12:
                continue
            for n in (1, 2, 4, phase_order):
                if n < 1:
                    continue
                k = round(cmath.phase(amp) * n / (2 * math.pi)) % n
                if root_of_unity(k, n, rsqrt) == amp:
                    return {"k": int(k), "n": int(n), "rsqrt": int(rsqrt)}
    return [amp.real, amp.imag]


def _decode_amp(raw: Any) -> complex:
    if isinstance(raw, dict):
        try:
            return root_of_unity(int(raw["k"]), int(raw["n"]), int(raw["rsqrt"]))
        except KeyError as exc:
            raise ParseError(f"bad structured amplitude {raw!r}") from exc
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        return complex(float(raw[0]), float(raw[1]))
    raise ParseError(f"bad amplitude {raw!r}")


def machine_to_dict(m: MachineSpec, presentation: str = "delta") -> dict:
    if presentation != "delta":
        raise ValidationError("only the transition-list presentation is written")
    phase_order = int(m.meta.get("rsqrt_base", 1) or 1)
    entries = []
    idx = m.state_index()
    for (p, sym) in sorted(m.delta, key=lambda k: (idx[k[0]], k[1])):
        for q, d, amp in m.delta[(p, sym)]:
            entries.append([p, sym, q, d, _encode_amp(amp, phase_order)])
    meta = {k: v for k, v in m.meta.items()}
    meta["completed_columns"] = sorted([p, s] for p, s in m.completed_columns)
    return {
        "format_version": FORMAT_VERSION,
        "kind": "2qfa",
        "states": list(m.states),
        "alphabet": list(m.alphabet),
        "initial": m.initial,
        "acc": sorted(m.acc, key=idx.__getitem__),
        "rej": sorted(m.rej, key=idx.__getitem__),
        "presentation": {"type": "delta", "entries": entries},
        "metadata": meta,
    }


def dfa_to_dict(d: Dfa) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "dfa",
        "states": list(d.states),
        "alphabet": list(d.alphabet),
        "initial": d.initial,
        "accepting": sorted(d.accepting, key=d.states.index),
        "transitions": [[p, s, d.trans[(p, s)]] for p in d.states for s in d.alphabet],
        "metadata": {},
    }


def _check_fields(doc: dict, allowed: set[str], strict: bool, warnings: list[str]):
    unknown = set(doc) - allowed
    if unknown:
        msg = f"unknown fields ignored: {sorted(unknown)}"
        if strict:
            raise ParseError(f"unknown fields {sorted(unknown)} (strict mode)")
        warnings.append(msg)


def from_dict(doc: dict, strict: bool = False, warnings: list[str] | None = None):
    """Parse a container dict into a :class:`MachineSpec` or :class:`Dfa`."""
    warnings = warnings if warnings is not None else []
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError("not a machine container: missing 'kind'")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {doc.get('format_version')!r}")
    kind = doc["kind"]
    if kind == "dfa":
        _check_fields(doc, _DFA_FIELDS, strict, warnings)
        try:
            trans = {(p, s): q for p, s, q in doc["transitions"]}
            return Dfa(
                states=tuple(doc["states"]),
                alphabet=tuple(doc["alphabet"]),
                initial=doc["initial"],
                accepting=frozenset(doc["accepting"]),
                trans=trans,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad dfa container: {exc}") from exc
    if kind != "2qfa":
        raise ParseError(f"unknown kind {kind!r}")
    _check_fields(doc, _MACHINE_FIELDS, strict, warnings)
    pres = doc.get("presentation", {})
    if pres.get("type") != "delta":
        raise ParseError(f"unknown presentation {pres.get('type')!r}")
    delta: dict[tuple[str, str], list] = {}
    try:
        for p, sym, q, d, amp in pres["entries"]:
            delta.setdefault((p, sym), []).append((q, int(d), _decode_amp(amp)))
        meta = dict(doc.get("metadata", {}))
        completed = frozenset((p, s) for p, s in meta.pop("completed_columns", []))
        return MachineSpec(
            states=tuple(doc["states"]),
            alphabet=tuple(doc["alphabet"]),
            initial=doc["initial"],
            acc=frozenset(doc["acc"]),
            rej=frozenset(doc["rej"]),
            delta={k: tuple(v) for k, v in delta.items()},
            completed_columns=completed,
            meta=meta,
        )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise ParseError(f"bad machine container: {exc}") from exc


def dumps(obj) -> str:
    doc = dfa_to_dict(obj) if isinstance(obj, Dfa) else machine_to_dict(obj)
    return json.dumps(doc, indent=1, sort_keys=True)


def loads(text: str, strict: bool = False, warnings: list[str] | None = None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return from_dict(doc, strict=strict, warnings=warnings)


def save(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def load(path, strict: bool = False, warnings: list[str] | None = None):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), strict=strict, warnings=warnings)
