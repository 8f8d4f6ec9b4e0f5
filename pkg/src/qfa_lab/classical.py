"""Classical baselines: DFAs, minimization, brute-force membership, and the
deterministic-to-reversible compiler.

The compiler turns any total DFA into a two-way *reversible* machine with
at most 2|Q| + 2 states (bound contract: 2|Q| + 6).  Reversibility is the
obstacle: a DFA step function need not be injective.  The construction
resolves merges with a zigzag: states come in a forward copy (moves right)
and a barred copy (moves left).  On a symbol whose step function merges
several sources into one target, the sources are ordered; only the last
one advances, every earlier one defers by handing off leftwards to its
barred successor sibling, which walks left until it can be re-materialized
and replayed forward.  Distinct preimages thus reach the next cell along
paths of distinct lengths, which keeps every per-symbol column map
injective.  The right endmarker runs the same sibling walk on the
accepting / non-accepting partition, funnelling into single accept and
reject states.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .core import (
    LEFT_END,
    RIGHT_END,
    AlphabetError,
    MachineSpec,
    ValidationError,
    VdForm,
    from_vd_form,
)
from .wellformed import CapExceeded, complete_unitary


@dataclass(frozen=True)
class Dfa:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    trans: Mapping[tuple[str, str], str]

    def __post_init__(self):
        state_set = set(self.states)
        if self.initial not in state_set:
            raise ValidationError(f"initial state {self.initial!r} not declared")
        if not self.accepting <= state_set:
            raise ValidationError("accepting states not a subset of the state set")
        for q in self.states:
            for s in self.alphabet:
                if (q, s) not in self.trans:
                    raise ValidationError(f"transition map not total: missing {(q, s)}")
                if self.trans[(q, s)] not in state_set:
                    raise ValidationError(f"transition target {self.trans[(q, s)]!r} unknown")

    def step(self, q: str, sym: str) -> str:
        if sym not in self.alphabet:
            raise AlphabetError(f"symbol {sym!r} not in DFA alphabet")
        return self.trans[(q, sym)]


def dfa_run(d: Dfa, x: Sequence[str]) -> bool:
    q = d.initial
    for sym in x:
        q = d.step(q, sym)
    return q in d.accepting


def _reachable(d: Dfa) -> list[str]:
    seen = [d.initial]
    seen_set = {d.initial}
    i = 0
    while i < len(seen):
        q = seen[i]
        i += 1
        for s in d.alphabet:
            t = d.trans[(q, s)]
            if t not in seen_set:
                seen_set.add(t)
                seen.append(t)
    return [q for q in d.states if q in seen_set]


def minimize_dfa(d: Dfa) -> Dfa:
    """Unique minimal DFA via partition refinement on reachable states.

    Deterministic output naming: blocks are ordered by their earliest
    member in declared state order and each block is named after that
    representative.
    """
    states = _reachable(d)
    order = {q: i for i, q in enumerate(states)}
    block_of = {q: (q in d.accepting) for q in states}
    while True:
        signature = {
            q: (block_of[q], tuple(block_of[d.trans[(q, s)]] for s in d.alphabet))
            for q in states
        }
        new_ids: dict = {}
        new_block_of = {}
        for q in states:  # declared order fixes block identity deterministically
            sig = signature[q]
            if sig not in new_ids:
                new_ids[sig] = len(new_ids)
            new_block_of[q] = new_ids[sig]
        if len(new_ids) == len(set(block_of.values())):
            block_of = new_block_of
            break
        block_of = new_block_of

    reps: dict[int, str] = {}
    for q in states:
        reps.setdefault(block_of[q], q)
    new_states = tuple(reps[b] for b in sorted(reps, key=lambda b: order[reps[b]]))
    trans = {
        (reps[block_of[q]], s): reps[block_of[d.trans[(q, s)]]]
        for q in states
        for s in d.alphabet
    }
    return Dfa(
        states=new_states,
        alphabet=d.alphabet,
        initial=reps[block_of[d.initial]],
        accepting=frozenset(reps[b] for b, r in reps.items() if r in d.accepting),
        trans=trans,
    )


def brute_membership(
    predicate: Callable[[tuple[str, ...]], bool],
    alphabet: Sequence[str],
    maxlen: int,
    cap: int = 500_000,
) -> list[tuple[tuple[str, ...], bool]]:
    """Exact labels for every string up to ``maxlen``, lexicographic by
    length then declared symbol order.  The recognition oracle."""
    total = sum(len(alphabet) ** n for n in range(maxlen + 1))
    if total > cap:
        raise CapExceeded(f"{total} strings exceed enumeration cap {cap}")
    out = []
    for n in range(maxlen + 1):
        for x in itertools.product(tuple(alphabet), repeat=n):
            out.append((x, bool(predicate(x))))
    return out


def is_2rfa(m: MachineSpec) -> bool:
    """True iff every authored amplitude is 1 and each per-symbol column map
    is an injective partial permutation of the state set."""
    core = m.core_delta()
    by_sym: dict[str, dict[str, str]] = {}
    for (p, sym), entries in core.items():
        live = [(q, amp) for q, _, amp in entries if amp != 0]
        if len(live) != 1:
            return False
        q, amp = live[0]
        if abs(amp - 1.0) > 1e-12:
            return False
        targets = by_sym.setdefault(sym, {})
        if q in targets:
            return False
        targets[q] = p
    return True


def _sibling_lists(d: Dfa, sym: str, hoist_first: str) -> dict[str, list[str]]:
    """Preimage lists of the step function, keyed by target, in declared
    order with ``hoist_first`` moved to the front of its list."""
    lists: dict[str, list[str]] = {}
    for q in d.states:
        lists.setdefault(d.trans[(q, sym)], []).append(q)
    for lst in lists.values():
        if hoist_first in lst:
            lst.remove(hoist_first)
            lst.insert(0, hoist_first)
    return lists


def dfa_to_2rfa(d: Dfa) -> MachineSpec:
    """Compile a total DFA into an equivalent two-way reversible machine.

    States: one forward and one barred copy of the DFA states plus single
    accept / reject states (2|Q| + 2 <= 2|Q| + 6).  The machine starts in
    the barred initial state at the left endmarker, which re-materializes
    the initial state on cell one; see the module docstring for the
    zigzag mechanics.  Exactness, reversibility, and halting are enforced
    by the test suite on every benchmark and on randomized DFAs.
    """
    fwd = {q: q for q in d.states}
    bar = {q: f"{q}~" for q in d.states}
    acc_state, rej_state = "ACCEPT", "REJECT"
    taken = set(d.states) | set(bar.values())
    while acc_state in taken:
        acc_state += "_"
    while rej_state in taken:
        rej_state += "_"
    states = [bar[q] for q in d.states] + [fwd[q] for q in d.states] + [acc_state, rej_state]

    one = 1.0 + 0j
    dirs = {bar[q]: -1 for q in d.states}
    dirs.update({fwd[q]: 1 for q in d.states})
    dirs[acc_state] = 0
    dirs[rej_state] = 0

    cols: dict[str, dict[str, dict[str, complex]]] = {LEFT_END: {}, RIGHT_END: {}}
    for q in d.states:
        cols[LEFT_END][bar[q]] = {fwd[q]: one}

    for sym in d.alphabet:
        lists = _sibling_lists(d, sym, d.initial)
        ranges = set(lists)
        col: dict[str, dict[str, complex]] = {}
        for target, sibs in lists.items():
            for a, b in zip(sibs, sibs[1:]):
                col[fwd[a]] = {bar[b]: one}  # defer to the next sibling, leftwards
            col[fwd[sibs[-1]]] = {fwd[target]: one}  # last sibling advances
        for q in d.states:
            if q in ranges:
                col[bar[q]] = {bar[lists[q][0]]: one}  # blocked: carry the first preimage
            else:
                col[bar[q]] = {fwd[q]: one}  # unbar and replay forward
        cols[sym] = col

    verdict_lists = {
        acc_state: [q for q in d.states if q in d.accepting],
        rej_state: [q for q in d.states if q not in d.accepting],
    }
    rcol = cols[RIGHT_END]
    for verdict, sibs in verdict_lists.items():
        if not sibs:
            continue
        for a, b in zip(sibs, sibs[1:]):
            rcol[fwd[a]] = {bar[b]: one}
        rcol[fwd[sibs[-1]]] = {verdict: one}

    order = {q: i for i, q in enumerate(states)}
    vd = VdForm(
        states=tuple(states),
        alphabet=d.alphabet,
        v=cols,
        d=dirs,
        specified={sym: tuple(sorted(c, key=order.__getitem__)) for sym, c in cols.items()},
    )
    meta = {"compiled_from_dfa": {"states": len(d.states)}}
    return from_vd_form(complete_unitary(vd), bar[d.initial], {acc_state}, {rej_state}, meta=meta)


# -- benchmark DFAs used by the conversion and bound tests --------------------


def parity_dfa() -> Dfa:
    """Even number of a's over {a, b}."""
    t = {("even", "a"): "odd", ("odd", "a"): "even", ("even", "b"): "even", ("odd", "b"): "odd"}
    return Dfa(("even", "odd"), ("a", "b"), "even", frozenset({"even"}), t)


def mod3_dfa() -> Dfa:
    """Number of a's divisible by three, over {a, b}."""
    t = {}
    for i in range(3):
        t[(f"m{i}", "a")] = f"m{(i + 1) % 3}"
        t[(f"m{i}", "b")] = f"m{i}"
    return Dfa(("m0", "m1", "m2"), ("a", "b"), "m0", frozenset({"m0"}), t)


def universal_dfa(alphabet: Sequence[str] = ("a", "b")) -> Dfa:
    t = {("u", s): "u" for s in alphabet}
    return Dfa(("u",), tuple(alphabet), "u", frozenset({"u"}), t)


def empty_dfa(alphabet: Sequence[str] = ("a", "b")) -> Dfa:
    t = {("e", s): "e" for s in alphabet}
    return Dfa(("e",), tuple(alphabet), "e", frozenset(), t)


def counting_dfa(n: int) -> Dfa:
    """Clamped pair counter for strings with exactly n a's and n b's."""
    cap = n + 1
    states = [f"c{i}_{j}" for i in range(cap + 1) for j in range(cap + 1)]
    t = {}
    for i in range(cap + 1):
        for j in range(cap + 1):
            t[(f"c{i}_{j}", "a")] = f"c{min(i + 1, cap)}_{j}"
            t[(f"c{i}_{j}", "b")] = f"c{i}_{min(j + 1, cap)}"
    return Dfa(tuple(states), ("a", "b"), "c0_0", frozenset({f"c{n}_{n}"}), t)
