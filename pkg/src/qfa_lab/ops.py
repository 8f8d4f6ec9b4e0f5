"""Machine combinators: complement, intersection, union, reversal, catenation.

Each combinator consumes the authored transitions of its inputs (completion
fill is stripped first, re-derived on the composed machine) and returns the
new machine together with a :class:`ConstructionAudit` recording the exact
state count, the published counting formula it is audited against, and the
outcome of every side condition that was checked.  Formula mismatches are
recorded facts, not errors.

Composed state names use ":" as a reserved separator ("i:qacc:q" for the
product copies), which keeps state identity collision-free and countable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    LEFT_END,
    RIGHT_END,
    AlphabetError,
    MachineSpec,
    QfaError,
    ValidationError,
    VdForm,
    from_vd_form,
    to_vd_form,
)
from .wellformed import (
    complete_unitary,
    halts_at_right_end,
    is_non_circular,
    is_non_recurrent,
)

SEP = ":"


class SideConditionError(QfaError):
    """A construction's side condition failed; the operation is refused."""


@dataclass(frozen=True)
class ConstructionAudit:
    """What a combinator built and which published count it is held against."""

    operation: str
    components: tuple[str, ...]
    n: int | None
    state_count: int
    formula_id: str | None = None
    formula_value: int | None = None
    corollary_formula_id: str | None = None
    corollary_formula_value: int | None = None
    corollary_applicable: bool = False
    side_conditions: tuple = ()  # (name, checked, held)
    completed_columns: tuple = ()  # (symbol, count filled by completion)
    error_bound: float | None = None
    notes: tuple[str, ...] = ()

    @property
    def formula_matches(self) -> bool | None:
        if self.formula_value is None:
            return None
        return self.state_count == self.formula_value

    @property
    def gap(self) -> int | None:
        if self.formula_value is None:
            return None
        return self.state_count - self.formula_value

    def to_dict(self) -> dict:
        return {
            "operation": self.operation,
            "components": list(self.components),
            "n": self.n,
            "state_count": self.state_count,
            "formula_id": self.formula_id,
            "formula_value": self.formula_value,
            "formula_matches": self.formula_matches,
            "gap": self.gap,
            "corollary_formula_id": self.corollary_formula_id,
            "corollary_formula_value": self.corollary_formula_value,
            "corollary_applicable": self.corollary_applicable,
            "side_conditions": [list(c) for c in self.side_conditions],
            "completed_columns": [list(c) for c in self.completed_columns],
            "error_bound": self.error_bound,
            "notes": list(self.notes),
        }


def describe(m: MachineSpec) -> str:
    zoo = m.meta.get("zoo")
    if isinstance(zoo, dict):
        params = ",".join(f"{k}={v}" for k, v in zoo["params"].items())
        return f"{zoo['zoo_id']}[{params}]"
    return f"machine[{len(m.states)} states]"


def _completion_stats(m: MachineSpec) -> tuple:
    by_sym: dict[str, int] = {}
    for _, sym in m.completed_columns:
        by_sym[sym] = by_sym.get(sym, 0) + 1
    return tuple(sorted(by_sym.items()))


def _check_separator(states) -> None:
    bad = [q for q in states if SEP in q]
    if bad:
        raise ValidationError(
            f"state names {bad[:3]} contain the reserved separator {SEP!r}; rename before composing"
        )


def _has_left_self_loop(m: MachineSpec, state: str) -> bool:
    for (p, _), entries in m.core_delta().items():
        if p == state and any(q == state and d == -1 and amp != 0 for q, d, amp in entries):
            return True
    return False


def complement(m: MachineSpec) -> tuple[MachineSpec, ConstructionAudit]:
    """Swap the accepting and rejecting classes; everything else unchanged."""
    out = m.with_partition(acc=m.rej, rej=m.acc)
    audit = ConstructionAudit(
        operation="complement",
        components=(describe(m),),
        n=None,
        state_count=len(out.states),
        formula_id="Lemma4",
        formula_value=len(m.states),
        side_conditions=(),
        completed_columns=_completion_stats(out),
    )
    return out, audit


def reverse(m: MachineSpec) -> tuple[MachineSpec, ConstructionAudit]:
    """Mirror the machine: one fresh start state jumps (via the circular
    head wrap) onto the right endmarker, the endmarker matrices swap roles,
    and every head move is negated.  Requires a non-recurrent input so the
    fresh start column stays orthogonal to the swapped endmarker matrix."""
    if not is_non_recurrent(m):
        raise SideConditionError("reversal requires a non-recurrent machine")
    vd = to_vd_form(m, core_only=True)
    start = "q0'"
    while start in m.states:
        start += "'"
    states = (start,) + m.states
    d = {q: -vd.d[q] for q in m.states}
    d[start] = 0
    # The fresh start edge enters the old initial state moving left (the
    # circular wrap lands it on the right endmarker).  A never-entered
    # initial state takes that direction; an initial state self-looping
    # rightward reverses to the same -1, anything else cannot be mirrored.
    if m.initial in vd.defaulted_directions:
        d[m.initial] = -1
    elif d[m.initial] != -1:
        raise SideConditionError(
            "reversal needs the initial state entered rightward (or not at all)"
        )
    v: dict[str, dict[str, dict[str, complex]]] = {}
    v[LEFT_END] = {src: dict(col) for src, col in vd.v.get(RIGHT_END, {}).items()}
    v[LEFT_END][start] = {m.initial: 1.0 + 0j}
    v[RIGHT_END] = {src: dict(col) for src, col in vd.v.get(LEFT_END, {}).items()}
    for sym in m.alphabet:
        v[sym] = {src: dict(col) for src, col in vd.v.get(sym, {}).items()}
    order = {q: i for i, q in enumerate(states)}
    rvd = VdForm(
        states=states,
        alphabet=m.alphabet,
        v=v,
        d=d,
        specified={sym: tuple(sorted(cols, key=order.__getitem__)) for sym, cols in v.items()},
    )
    out = from_vd_form(complete_unitary(rvd), start, m.acc, m.rej, meta={"reversed_from": describe(m)})
    audit = ConstructionAudit(
        operation="reverse",
        components=(describe(m),),
        n=None,
        state_count=len(out.states),
        formula_id="Eq3",
        formula_value=len(m.states) + 1,
        side_conditions=(("non_recurrent", True, True),),
        completed_columns=_completion_stats(out),
    )
    return out, audit


def _product(m1: MachineSpec, m2: MachineSpec, n: int, keyed_on: str):
    """Shared machinery of intersection and union.

    ``keyed_on`` picks which halting class of the first machine is turned
    into non-halting rewind heads.  Each head walks the tape back to the
    left endmarker, counting its travel distance i in the state, and there
    starts a private copy of the second machine by playing the second
    machine's initial left-endmarker column (or, when the second machine's
    initial state is itself halting, by handing off into the halting copy
    directly).  Since every rewind distance leads to a distinct copy, the
    columns stay orthonormal; non-recurrence of the second machine keeps
    its own transitions out of the copy's start column.
    """
    if n < 0:
        raise ValidationError("length parameter must be >= 0")
    if not is_non_recurrent(m2):
        raise SideConditionError("the second machine must be non-recurrent")
    if _has_left_self_loop(m2, m2.initial):
        raise SideConditionError(
            "the second machine's initial state may not carry a left-moving self-loop"
        )
    _check_separator(m1.states)
    _check_separator(m2.states)
    vd1 = to_vd_form(m1, core_only=True)
    vd2 = to_vd_form(m2, core_only=True)
    heads = tuple(sorted(m1.acc if keyed_on == "acc" else m1.rej, key=m1.states.index))
    if keyed_on == "acc":
        alphabet = tuple(s for s in m1.alphabet if s in set(m2.alphabet))
        if not alphabet:
            raise AlphabetError("the machines' alphabets do not intersect")
    else:
        alphabet = m1.alphabet + tuple(s for s in m2.alphabet if s not in set(m1.alphabet))

    copy = lambda i, h, q: f"{i}{SEP}{h}{SEP}{q}"
    rewind = lambda i, h: h if i == 0 else f"{i}{SEP}{h}"
    states = list(m1.states)
    for i in range(n + 2):
        for h in heads:
            for q in m2.states:
                states.append(copy(i, h, q))
    for i in range(1, n + 2):
        for h in heads:
            states.append(rewind(i, h))

    d = {q: vd1.d[q] for q in m1.states}
    for i in range(n + 2):
        for h in heads:
            for q in m2.states:
                d[copy(i, h, q)] = vd2.d[q]
    for i in range(1, n + 2):
        for h in heads:
            d[rewind(i, h)] = -1

    q20 = m2.initial
    q20_halting = q20 in (m2.acc | m2.rej)
    start_col = vd2.v.get(LEFT_END, {}).get(q20, {})
    one = 1.0 + 0j
    cols: dict[str, dict[str, dict[str, complex]]] = {}
    for sym in alphabet + (LEFT_END, RIGHT_END):
        col: dict[str, dict[str, complex]] = {}
        # first machine, minus the columns of the rewind heads
        if sym in vd1.v and sym in set(m1.alphabet) | {LEFT_END, RIGHT_END}:
            for src, entries in vd1.v[sym].items():
                if src in heads:
                    continue
                col[src] = dict(entries)
        # rewind chains and copy hand-off
        for h in heads:
            for i in range(n + 2):
                src = rewind(i, h)
                if sym != LEFT_END:
                    if i <= n:
                        col[src] = {rewind(i + 1, h): one}
                elif q20_halting:
                    col[src] = {copy(i, h, q20): one}
                elif start_col:
                    col[src] = {copy(i, h, q): amp for q, amp in start_col.items()}
        # second-machine copies
        if sym in vd2.v and sym in set(m2.alphabet) | {LEFT_END, RIGHT_END}:
            for src, entries in vd2.v[sym].items():
                if sym == LEFT_END and src == q20:
                    continue  # played by the rewind heads; a re-read would collide
                for i in range(n + 2):
                    for h in heads:
                        col[copy(i, h, src)] = {copy(i, h, q): amp for q, amp in entries.items()}
        if col:
            cols[sym] = col

    if keyed_on == "acc":
        acc = {copy(i, h, q) for i in range(n + 2) for h in heads for q in m2.acc}
        rej = set(m1.rej) | {copy(i, h, q) for i in range(n + 2) for h in heads for q in m2.rej}
    else:
        acc = set(m1.acc) | {copy(i, h, q) for i in range(n + 2) for h in heads for q in m2.acc}
        rej = {copy(i, h, q) for i in range(n + 2) for h in heads for q in m2.rej}

    order = {q: i for i, q in enumerate(states)}
    vd = VdForm(
        states=tuple(states),
        alphabet=alphabet,
        v=cols,
        d=d,
        specified={sym: tuple(sorted(c, key=order.__getitem__)) for sym, c in cols.items()},
    )
    out = from_vd_form(
        complete_unitary(vd),
        m1.initial,
        acc,
        rej,
        meta={"product_of": (describe(m1), describe(m2)), "n": n, "keyed_on": keyed_on},
    )
    return out, heads


def intersect(m1: MachineSpec, m2: MachineSpec, n: int) -> tuple[MachineSpec, ConstructionAudit]:
    """Product machine for the intersection at input length ``n``.

    The first machine runs with its accepting states demoted to rewind
    heads; acceptance is decided by the second machine's copies.  Audited
    against the published inequality for the intersection count; the
    construction's rewind states are not in that formula, so a nonzero gap
    is the expected, recorded outcome.
    """
    from .wellformed import halts_at_left_end

    out, heads = _product(m1, m2, n, keyed_on="acc")
    e1 = _error_of(m1)
    e2 = _error_of(m2)
    formula = len(m1.states) + len(m2.states) * (n + 2) * len(heads) - len(heads)
    corollary = len(m1.states) + len(m2.states) * len(heads) - len(heads)
    audit = ConstructionAudit(
        operation="intersect",
        components=(describe(m1), describe(m2)),
        n=n,
        state_count=len(out.states),
        formula_id="Eq6",
        formula_value=formula,
        corollary_formula_id="Eq8",
        corollary_formula_value=corollary,
        corollary_applicable=halts_at_left_end(m1, "acc"),
        side_conditions=(
            ("m2_non_recurrent", True, True),
            ("alphabets_intersect", True, True),
            ("m1_halts_accepting_at_left_end", True, halts_at_left_end(m1, "acc")),
        ),
        completed_columns=_completion_stats(out),
        error_bound=None if e1 is None or e2 is None else e1 + e2 - e1 * e2,
    )
    return out, audit


def union(m1: MachineSpec, m2: MachineSpec, n: int) -> tuple[MachineSpec, ConstructionAudit]:
    """Dual product keyed on the first machine's rejecting states."""
    from .wellformed import halts_at_left_end

    out, heads = _product(m1, m2, n, keyed_on="rej")
    e1 = _error_of(m1)
    e2 = _error_of(m2)
    formula = len(m1.states) + len(m2.states) * (n + 2) * len(heads) - len(heads)
    corollary = len(m1.states) + len(m2.states) * len(heads) - len(heads)
    notes = ()
    if set(m1.alphabet) != set(m2.alphabet):
        notes = (
            "alphabets differ: the first machine's behavior on foreign symbols is "
            "left to completion and carries no recognition contract",
        )
    audit = ConstructionAudit(
        operation="union",
        components=(describe(m1), describe(m2)),
        n=n,
        state_count=len(out.states),
        formula_id="Eq7",
        formula_value=formula,
        corollary_formula_id="Eq9",
        corollary_formula_value=corollary,
        corollary_applicable=halts_at_left_end(m1, "rej"),
        side_conditions=(
            ("m2_non_recurrent", True, True),
            ("m1_halts_rejecting_at_left_end", True, halts_at_left_end(m1, "rej")),
        ),
        completed_columns=_completion_stats(out),
        error_bound=None if e1 is None or e2 is None else e1 + e2 - e1 * e2,
        notes=notes,
    )
    return out, audit


def _error_of(m: MachineSpec) -> float | None:
    zoo = m.meta.get("zoo")
    if isinstance(zoo, dict):
        return float(zoo["error_bound"])
    return None


def catenate(
    m1: MachineSpec,
    m2: MachineSpec,
    experimental: bool = False,
    dynamic_check_inputs=None,
) -> tuple[MachineSpec, ConstructionAudit]:
    """Machine for the language product of two machines' languages.

    The general construction requires disjoint alphabets: a five-state walk
    checks the input splits as (first alphabet)+(second alphabet)+, then the
    first machine runs with second-alphabet symbols playing its right
    endmarker; on acceptance it hands off leftward into the second machine,
    whose left-endmarker role is played by first-alphabet symbols.  Needs
    both machines non-circular and non-recurrent, the first machine
    accepting at its right end (statically, or dynamically over
    ``dynamic_check_inputs``), and a single accepting state on the first
    machine (several would need per-state copies as in the product
    construction).

    With overlapping alphabets and ``experimental=True``, the inputs must
    be single-pair checkers sharing their first symbol; they are then fused
    into the two-stage equal-pairs machine over the three-letter alphabet,
    which recognizes exactly the catenation of the two languages.
    """
    shared = [s for s in m1.alphabet if s in set(m2.alphabet)]
    if shared:
        if not experimental:
            raise AlphabetError(
                f"alphabets overlap on {shared}; catenation requires disjoint alphabets "
                "(pass experimental=True for the fused single-pair construction)"
            )
        return _fused_catenation(m1, m2)

    conditions = []

    def need(name: str, held: bool):
        conditions.append((name, True, held))
        if not held:
            raise SideConditionError(f"catenation side condition failed: {name}")

    need("m1_non_circular", is_non_circular(m1))
    need("m2_non_circular", is_non_circular(m2))
    need("m1_non_recurrent", is_non_recurrent(m1))
    need("m2_non_recurrent", is_non_recurrent(m2))
    need("m1_single_accepting_state", len(m1.acc) == 1)
    need("m1_initial_no_left_self_loop", not _has_left_self_loop(m1, m1.initial))
    need("m2_initial_no_left_self_loop", not _has_left_self_loop(m2, m2.initial))
    right_acc = halts_at_right_end(m1, "acc")
    if not right_acc and dynamic_check_inputs is not None:
        from .engine import observe_halting

        seen = observe_halting(m1, dynamic_check_inputs)
        right_acc = seen["acc"] <= {"right"}
        conditions.append(("m1_accepts_at_right_end_dynamic", True, right_acc))
    else:
        conditions.append(("m1_accepts_at_right_end_static", True, right_acc))
    if not right_acc:
        raise SideConditionError(
            "catenation needs the first machine to accept at its right endmarker"
        )

    vd1 = to_vd_form(m1, core_only=True)
    vd2 = to_vd_form(m2, core_only=True)
    p1 = lambda q: f"1{SEP}{q}"
    p2 = lambda q: f"2{SEP}{q}"
    chk = ["c0", "c1", "c2", "c3", "cr"]
    start2 = "s2>"
    states = chk + [start2] + [p1(q) for q in m1.states] + [p2(q) for q in m2.states]
    one = 1.0 + 0j

    d = {"c0": 1, "c1": -1, "c2": 1, "c3": -1, "cr": 0, start2: -1}
    d.update({p1(q): vd1.d[q] for q in m1.states})
    d.update({p2(q): vd2.d[q] for q in m2.states})

    (acc1,) = m1.acc
    q10, q20 = m1.initial, m2.initial
    cols: dict[str, dict[str, dict[str, complex]]] = {sym: {} for sym in m1.alphabet + m2.alphabet + (LEFT_END, RIGHT_END)}

    cols[LEFT_END]["c0"] = {"c0": one}
    cols[LEFT_END]["c1"] = {"cr": one}
    start1_col = vd1.v.get(LEFT_END, {}).get(q10, {})
    if start1_col:
        cols[LEFT_END]["c3"] = {p1(q): amp for q, amp in start1_col.items()}
    for src, entries in vd1.v.get(LEFT_END, {}).items():
        if src == q10:
            continue  # its start column is played by the shape walk's hand-in
        cols[LEFT_END][p1(src)] = {p1(q): amp for q, amp in entries.items()}

    cols[RIGHT_END]["c0"] = {"cr": one}
    cols[RIGHT_END]["c2"] = {"c3": one}
    for src, entries in vd2.v.get(RIGHT_END, {}).items():
        cols[RIGHT_END][p2(src)] = {p2(q): amp for q, amp in entries.items()}

    start2_col = vd2.v.get(LEFT_END, {}).get(q20, {})
    for sym in m1.alphabet:
        col = cols[sym]
        col["c0"] = {"c0": one}
        col["c1"] = {"c2": one}
        col["c2"] = {"cr": one}
        col["c3"] = {"c3": one}
        for src, entries in vd1.v.get(sym, {}).items():
            col[p1(src)] = {p1(q): amp for q, amp in entries.items()}
        if start2_col:
            col[start2] = {p2(q): amp for q, amp in start2_col.items()}
        for src, entries in vd2.v.get(LEFT_END, {}).items():
            if src == q20:
                continue  # played by the hand-off state
            col[p2(src)] = {p2(q): amp for q, amp in entries.items()}

    for sym in m2.alphabet:
        col = cols[sym]
        col["c0"] = {"c1": one}
        col["c2"] = {"c2": one}
        col["c3"] = {"c3": one}
        col[p1(acc1)] = {start2: one}
        for src, entries in vd1.v.get(RIGHT_END, {}).items():
            if src == acc1:
                continue
            col[p1(src)] = {p1(q): amp for q, amp in entries.items()}
        for src, entries in vd2.v.get(sym, {}).items():
            col[p2(src)] = {p2(q): amp for q, amp in entries.items()}

    cols = {sym: col for sym, col in cols.items() if col}
    order = {q: i for i, q in enumerate(states)}
    vd = VdForm(
        states=tuple(states),
        alphabet=m1.alphabet + m2.alphabet,
        v=cols,
        d=d,
        specified={sym: tuple(sorted(c, key=order.__getitem__)) for sym, c in cols.items()},
    )
    acc = {p2(q) for q in m2.acc}
    rej = {"cr"} | {p1(q) for q in m1.rej} | {p2(q) for q in m2.rej}
    out = from_vd_form(
        complete_unitary(vd),
        "c0",
        acc,
        rej,
        meta={"catenation_of": (describe(m1), describe(m2))},
    )
    e1, e2 = _error_of(m1), _error_of(m2)
    audit = ConstructionAudit(
        operation="catenate",
        components=(describe(m1), describe(m2)),
        n=None,
        state_count=len(out.states),
        side_conditions=tuple(conditions),
        completed_columns=_completion_stats(out),
        error_bound=None if e1 is None or e2 is None else e1 + e2 - e1 * e2,
    )
    return out, audit


def _fused_catenation(m1: MachineSpec, m2: MachineSpec) -> tuple[MachineSpec, ConstructionAudit]:
    from . import zoo

    try:
        e1, e2 = zoo.entry(m1), zoo.entry(m2)
    except ValidationError as exc:
        raise SideConditionError(
            "the overlapping-alphabet fusion needs single-pair checker inputs "
            "built by this package (zoo metadata missing)"
        ) from exc
    ok_kinds = e1.language.get("kind") == e2.language.get("kind") == "two_block_equal"
    shared = set(m1.alphabet) & set(m2.alphabet)
    if not ok_kinds or len(shared) != 1 or len(m1.alphabet) != 2 or len(m2.alphabet) != 2:
        raise SideConditionError(
            "fusion supports exactly two single-pair checkers sharing their first symbol"
        )
    x = shared.pop()
    if e1.language["a"] != x or e2.language["a"] != x:
        raise SideConditionError("the shared symbol must open both pairs")
    if e1.params["N"] != e2.params["N"]:
        raise SideConditionError("fusion needs matching precision parameters")
    N = int(e1.params["N"])
    y1 = e1.language["b"]
    y2 = e2.language["b"]
    out = zoo.prop1_machine(N, (x, y1, y2))
    eps1, eps2 = e1.error_bound, e2.error_bound
    audit = ConstructionAudit(
        operation="catenate",
        components=(describe(m1), describe(m2)),
        n=None,
        state_count=len(out.states),
        side_conditions=(
            ("disjoint_alphabets", True, False),
            ("experimental_fusion", True, True),
        ),
        completed_columns=_completion_stats(out),
        error_bound=eps1 + eps2 - eps1 * eps2,
        notes=("overlapping-alphabet run: inputs fused into the two-stage equal-pairs machine",),
    )
    return out, audit
