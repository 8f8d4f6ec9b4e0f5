"""Domain types for two-way quantum finite automata.

A machine is a finite set of inner states with amplitude-valued transitions
``delta(p, symbol) -> {(q, d): amplitude}`` where ``d`` is a head move in
``{-1, 0, +1}``.  The input is framed by two reserved endmarkers; the head
position lives on the circular index range ``[0, n+1]`` for an input of
length ``n``.

Two presentations are supported and convertible into each other:

* the raw transition map (:class:`MachineSpec`), and
* the compact per-symbol matrix form (:class:`VdForm`): one square matrix
  per symbol plus one direction per *target* state.

The matrix form only exists for machines in which every state is always
entered with the same head move ("direction-partitioned" machines).  All
machines constructed by this package are direction-partitioned.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

LEFT_END = "¢"  # rendered ¢
RIGHT_END = "$"
ENDMARKERS = (LEFT_END, RIGHT_END)

Direction = int  # -1, 0, +1
Transition = tuple[str, Direction, complex]  # (target state, head move, amplitude)


class QfaError(Exception):
    """Base class for all domain errors raised by this package."""


class ValidationError(QfaError):
    """A machine or matrix presentation is structurally invalid."""


class DimensionError(QfaError):
    """Matrix dimensions are inconsistent with the declared state set."""


class AlphabetError(QfaError):
    """A symbol is outside the machine alphabet, or alphabets are incompatible."""


class NotDirectionPartitioned(QfaError):
    """Some state is entered with two distinct head moves.

    ``conflicts`` lists ``(state, sorted tuple of directions)`` pairs.
    """

    def __init__(self, conflicts: Sequence[tuple[str, tuple[int, ...]]]):
        self.conflicts = tuple(conflicts)
        names = ", ".join(f"{q} entered with d in {dirs}" for q, dirs in self.conflicts)
        super().__init__(f"not direction-partitioned: {names}")


def _check_symbol_tokens(symbols: Iterable[str]) -> tuple[str, ...]:
    out = tuple(symbols)
    if not out:
        raise ValidationError("input alphabet must be non-empty")
    if len(set(out)) != len(out):
        raise ValidationError("alphabet contains duplicate symbols")
    for s in out:
        if s in ENDMARKERS:
            raise ValidationError(f"endmarker {s!r} may not be an input symbol")
        if not s:
            raise ValidationError("empty string is not a valid symbol token")
    return out


@dataclass(frozen=True)
class MachineSpec:
    """A two-way quantum finite automaton given by raw transitions.

    ``delta`` maps ``(source state, symbol)`` to a tuple of transitions
    ``(target, direction, amplitude)``.  Zero-amplitude transitions are not
    stored; consumers must treat absence as amplitude 0.  ``symbol`` ranges
    over the input alphabet plus the two endmarkers.

    ``completed_columns`` marks ``(state, symbol)`` columns that were filled
    in by unitary completion rather than authored; structural predicates
    (non-recurrence, circularity, halting position) ignore them, while the
    evolution operator uses the full map.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    initial: str
    acc: frozenset[str]
    rej: frozenset[str]
    delta: Mapping[tuple[str, str], tuple[Transition, ...]]
    completed_columns: frozenset[tuple[str, str]] = frozenset()
    meta: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise ValidationError("duplicate state names")
        state_set = set(self.states)
        _check_symbol_tokens(self.alphabet)
        if self.initial not in state_set:
            raise ValidationError(f"initial state {self.initial!r} not declared")
        for q in self.acc | self.rej:
            if q not in state_set:
                raise ValidationError(f"halting state {q!r} not declared")
        if self.acc & self.rej:
            raise ValidationError(f"states both accepting and rejecting: {sorted(self.acc & self.rej)}")
        symbols = set(self.alphabet) | set(ENDMARKERS)
        for (p, sym), entries in self.delta.items():
            if p not in state_set:
                raise ValidationError(f"transition source {p!r} not declared")
            if sym not in symbols:
                raise ValidationError(f"transition symbol {sym!r} outside alphabet plus endmarkers")
            seen = set()
            for q, d, amp in entries:
                if q not in state_set:
                    raise ValidationError(f"transition target {q!r} not declared")
                if d not in (-1, 0, 1):
                    raise ValidationError(f"head move must be -1, 0 or +1, got {d!r}")
                if (q, d) in seen:
                    raise ValidationError(f"duplicate (target, move) pair {(q, d)} in column {(p, sym)}")
                seen.add((q, d))
                if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                    raise ValidationError(f"non-finite amplitude in column {(p, sym)}")

    # -- views ---------------------------------------------------------------

    @property
    def non_halting(self) -> frozenset[str]:
        return frozenset(self.states) - self.acc - self.rej

    def state_index(self) -> dict[str, int]:
        return {q: i for i, q in enumerate(self.states)}

    def column(self, p: str, sym: str) -> tuple[Transition, ...]:
        """All stored transitions out of ``p`` on ``sym`` (may be completion-filled)."""
        return self.delta.get((p, sym), ())

    def core_delta(self) -> dict[tuple[str, str], tuple[Transition, ...]]:
        """The authored transition map, with completion-filled columns removed."""
        return {k: v for k, v in self.delta.items() if k not in self.completed_columns}

    def symbols(self) -> tuple[str, ...]:
        return self.alphabet + ENDMARKERS

    def with_partition(self, acc: Iterable[str], rej: Iterable[str]) -> "MachineSpec":
        return MachineSpec(
            states=self.states,
            alphabet=self.alphabet,
            initial=self.initial,
            acc=frozenset(acc),
            rej=frozenset(rej),
            delta=self.delta,
            completed_columns=self.completed_columns,
            meta=dict(self.meta),
        )


def parse_input(alphabet: Sequence[str], text: str | Sequence[str]) -> tuple[str, ...]:
    """Tokenize an input string over a (possibly multi-character) alphabet.

    Accepts an already-tokenized sequence unchanged.  For a plain string,
    whitespace separates tokens; within a run, greedy longest-match against
    the alphabet handles forms like ``"ab1ab2"``.
    """
    if not isinstance(text, str):
        toks = tuple(text)
        for t in toks:
            if t not in alphabet:
                raise AlphabetError(f"symbol {t!r} not in alphabet {list(alphabet)}")
        return toks
    by_len = sorted(alphabet, key=len, reverse=True)
    toks: list[str] = []
    for chunk in text.split():
        i = 0
        while i < len(chunk):
            for sym in by_len:
                if chunk.startswith(sym, i):
                    toks.append(sym)
                    i += len(sym)
                    break
            else:
                raise AlphabetError(f"cannot tokenize {chunk[i:]!r} over alphabet {list(alphabet)}")
    return tuple(toks)


@dataclass(frozen=True)
class VdForm:
    """Per-symbol amplitude matrices plus a direction map on states.

    ``v[sym]`` holds the matrix in column-sparse form: ``v[sym][src][tgt]``
    is the amplitude of moving from ``src`` to ``tgt`` on ``sym``; the head
    move is ``d[tgt]``.  ``specified[sym]`` lists the authored columns in
    declared order; in a partial form the remaining columns are all-zero,
    in a completed form they were filled by Gram-Schmidt.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    v: Mapping[str, Mapping[str, Mapping[str, complex]]]
    d: Mapping[str, Direction]
    specified: Mapping[str, tuple[str, ...]]
    defaulted_directions: tuple[str, ...] = ()

    def __post_init__(self):
        state_set = set(self.states)
        _check_symbol_tokens(self.alphabet)
        symbols = set(self.alphabet) | set(ENDMARKERS)
        for q in self.states:
            if q not in self.d:
                raise ValidationError(f"direction undefined for state {q!r}")
            if self.d[q] not in (-1, 0, 1):
                raise ValidationError(f"direction of {q!r} must be -1, 0 or +1")
        for sym, cols in self.v.items():
            if sym not in symbols:
                raise ValidationError(f"matrix symbol {sym!r} outside alphabet plus endmarkers")
            for src, col in cols.items():
                if src not in state_set:
                    raise DimensionError(f"matrix column {src!r} not a declared state")
                for tgt in col:
                    if tgt not in state_set:
                        raise DimensionError(f"matrix row {tgt!r} not a declared state")

    def symbols(self) -> tuple[str, ...]:
        return self.alphabet + ENDMARKERS

    def is_complete(self) -> bool:
        """True when every column of every symbol matrix is populated."""
        n = len(self.states)
        return all(len(self.v.get(sym, {})) == n for sym in self.symbols())

    def column_vector(self, sym: str, src: str) -> dict[str, complex]:
        return dict(self.v.get(sym, {}).get(src, {}))

    def matrix(self, sym: str):
        """The |Q| x |Q| dense matrix for ``sym`` (rows/columns in declared order)."""
        import numpy as np

        idx = {q: i for i, q in enumerate(self.states)}
        m = np.zeros((len(self.states), len(self.states)), dtype=complex)
        for src, col in self.v.get(sym, {}).items():
            for tgt, amp in col.items():
                m[idx[tgt], idx[src]] = amp
        return m


def from_vd_form(
    vd: VdForm,
    initial: str,
    acc: Iterable[str],
    rej: Iterable[str],
    meta: Mapping[str, object] | None = None,
) -> MachineSpec:
    """Expand a matrix presentation into raw transitions.

    ``delta(p, sym)`` receives ``(q, d[q], v[sym][p][q])`` for every nonzero
    matrix entry.  Columns that are populated but not listed as specified are
    marked as completion-filled.
    """
    delta: dict[tuple[str, str], tuple[Transition, ...]] = {}
    completed: set[tuple[str, str]] = set()
    for sym in vd.symbols():
        cols = vd.v.get(sym, {})
        spec_set = set(vd.specified.get(sym, ()))
        for src, col in cols.items():
            entries = tuple((tgt, vd.d[tgt], amp) for tgt, amp in col.items() if amp != 0)
            if not entries:
                continue
            delta[(src, sym)] = entries
            if src not in spec_set:
                completed.add((src, sym))
    return MachineSpec(
        states=vd.states,
        alphabet=vd.alphabet,
        initial=initial,
        acc=frozenset(acc),
        rej=frozenset(rej),
        delta=delta,
        completed_columns=frozenset(completed),
        meta=dict(meta or {}),
    )


def to_vd_form(m: MachineSpec, core_only: bool = False) -> VdForm:
    """Recover the matrix presentation of ``m``.

    Succeeds iff every target state is entered with a single head move across
    all stored transitions; otherwise raises :class:`NotDirectionPartitioned`
    naming the offending states.  States never entered get direction 0 and
    are reported in ``defaulted_directions``.
    """
    delta = m.core_delta() if core_only else dict(m.delta)
    dirs: dict[str, set[int]] = {}
    for (_, _), entries in delta.items():
        for q, d, amp in entries:
            if amp != 0:
                dirs.setdefault(q, set()).add(d)
    conflicts = [(q, tuple(sorted(ds))) for q, ds in sorted(dirs.items()) if len(ds) > 1]
    if conflicts:
        raise NotDirectionPartitioned(conflicts)
    d_map = {q: (next(iter(dirs[q])) if q in dirs else 0) for q in m.states}
    defaulted = tuple(q for q in m.states if q not in dirs)
    v: dict[str, dict[str, dict[str, complex]]] = {}
    specified: dict[str, list[str]] = {}
    order = {q: i for i, q in enumerate(m.states)}
    for (p, sym) in sorted(delta, key=lambda k: (k[1], order[k[0]])):
        entries = delta[(p, sym)]
        col = {q: amp for q, _, amp in entries if amp != 0}
        if not col:
            continue
        v.setdefault(sym, {})[p] = col
        specified.setdefault(sym, []).append(p)
    completed_srcs = {(p, sym) for (p, sym) in m.completed_columns} if not core_only else set()
    spec_out = {
        sym: tuple(p for p in srcs if (p, sym) not in completed_srcs)
        for sym, srcs in specified.items()
    }
    return VdForm(
        states=m.states,
        alphabet=m.alphabet,
        v=v,
        d=d_map,
        specified=spec_out,
        defaulted_directions=defaulted,
    )


def root_of_unity(k: int, n: int, inv_sqrt_of: int = 1) -> complex:
    """``exp(2 pi i k / n) / sqrt(inv_sqrt_of)`` computed directly per pair.

    Machines built from N-th roots of unity generate each amplitude with a
    single cos/sin evaluation, never by repeated multiplication, so exports
    can be regenerated bit-exactly.
    """
    phase = cmath.exp(2j * math.pi * (k % n) / n) if n > 1 else complex(1.0)
    return phase / math.sqrt(inv_sqrt_of)
