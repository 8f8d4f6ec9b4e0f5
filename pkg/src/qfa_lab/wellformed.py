"""Well-formedness checks and unitary completion.

A machine evolves unitarily iff its transition amplitudes satisfy three
algebraic conditions: per-symbol column orthonormality, and two
cross-direction separability conditions between symbol pairs.  This module
evaluates all three numerically, checks global unitarity of the evolution
operator for concrete inputs, completes partial matrix presentations to
unitary ones, and decides the structural side conditions used by the
machine combinators.

Structural predicates (:func:`is_non_recurrent`, :func:`is_non_circular`,
:func:`halts_at_left_end`, :func:`halts_at_right_end`) look only at
authored transitions: unitary completion necessarily adds edges (for
example into the initial state) that touch no reachable configuration, and
counting them would make the predicates vacuously false.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .core import (
    ENDMARKERS,
    LEFT_END,
    RIGHT_END,
    MachineSpec,
    QfaError,
    VdForm,
    from_vd_form,
    to_vd_form,
)

DEFAULT_TOLERANCE = 1e-10
COMPLETED_TOLERANCE = 1e-9


class CompletionError(QfaError):
    """Specified columns are not orthonormal, so completion is refused."""

    def __init__(self, symbol: str, col_a: str, col_b: str, residual: float):
        self.symbol = symbol
        self.pair = (col_a, col_b)
        self.residual = residual
        super().__init__(
            f"columns {col_a!r} and {col_b!r} of the {symbol!r} matrix are not "
            f"orthonormal (residual {residual:.3e}); completion refused"
        )


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the three well-formedness conditions at a tolerance.

    Violation entries are ``(symbol_or_pair, state1, state2, magnitude)``
    with magnitudes the absolute deviation from the required value.
    ``condition2_printed_max`` reports the alternative reading of the
    second condition in which the (+1, -1) cross term appears in place of
    the (0, -1) one; it is informational and does not affect the verdict.
    """

    tolerance: float
    condition1_violations: tuple = ()
    condition2_violations: tuple = ()
    condition3_violations: tuple = ()
    max_residual: float = 0.0
    condition2_printed_max: float = 0.0
    n_states: int = 0

    @property
    def verdict(self) -> str:
        return "pass" if self.max_residual <= self.tolerance else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "max_residual": self.max_residual,
            "condition1_violations": [list(v) for v in self.condition1_violations],
            "condition2_violations": [list(v) for v in self.condition2_violations],
            "condition3_violations": [list(v) for v in self.condition3_violations],
            "condition2_printed_max": self.condition2_printed_max,
            "n_states": self.n_states,
        }


def _direction_blocks(m: MachineSpec, sym: str) -> dict[int, sp.csr_matrix]:
    """Sparse |Q| x |Q| matrices T_d with T_d[p, q] = amp(p --sym, d--> q)."""
    idx = m.state_index()
    n = len(m.states)
    data: dict[int, tuple[list, list, list]] = {-1: ([], [], []), 0: ([], [], []), 1: ([], [], [])}
    for p in m.states:
        for q, d, amp in m.column(p, sym):
            rows, cols, vals = data[d]
            rows.append(idx[p])
            cols.append(idx[q])
            vals.append(amp)
    return {
        d: sp.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=complex)
        for d, (rows, cols, vals) in data.items()
    }


def _collect(matrix: sp.spmatrix, states, label, tol, out: list):
    coo = matrix.tocoo()
    for r, c, v in zip(coo.row, coo.col, coo.data):
        if abs(v) > tol:
            out.append((label, states[r], states[c], float(abs(v))))


def check_wellformed(m: MachineSpec, tolerance: float = DEFAULT_TOLERANCE) -> ValidationReport:
    """Evaluate the three well-formedness conditions over all symbol pairs.

    Condition 1 requires, for every symbol, the outgoing transition vectors
    of any two states to be orthonormal.  Condition 2 requires the
    (+1 vs 0) and (0 vs -1) cross sums to vanish for every ordered symbol
    pair, and condition 3 the (+1 vs -1) cross sum.  Residuals are complex
    magnitudes of the deviations.
    """
    symbols = m.symbols()
    blocks = {sym: _direction_blocks(m, sym) for sym in symbols}
    states = m.states
    n = len(states)
    eye = sp.identity(n, dtype=complex, format="csr")

    c1: list = []
    c2: list = []
    c3: list = []
    printed_max = 0.0
    for sym in symbols:
        t = blocks[sym]
        gram = sum(t[d].conjugate() @ t[d].T for d in (-1, 0, 1))
        _collect(gram - eye, states, sym, tolerance, c1)
    for s1 in symbols:
        t1 = blocks[s1]
        for s2 in symbols:
            t2 = blocks[s2]
            cross_a = t1[1].conjugate() @ t2[0].T
            cross_b = t1[0].conjugate() @ t2[-1].T
            cross_3 = t1[1].conjugate() @ t2[-1].T
            _collect(cross_a, states, (s1, s2), tolerance, c2)
            _collect(cross_b, states, (s1, s2), tolerance, c2)
            _collect(cross_3, states, (s1, s2), tolerance, c3)
            printed = cross_a + cross_3
            if printed.nnz:
                printed_max = max(printed_max, float(abs(printed).max()))

    residuals = [v[3] for v in c1 + c2 + c3]
    return ValidationReport(
        tolerance=tolerance,
        condition1_violations=tuple(sorted(c1, key=lambda v: -v[3])),
        condition2_violations=tuple(sorted(c2, key=lambda v: -v[3])),
        condition3_violations=tuple(sorted(c3, key=lambda v: -v[3])),
        max_residual=max(residuals, default=0.0),
        condition2_printed_max=printed_max,
        n_states=n,
    )


def unitarity_deviation(m: MachineSpec, x) -> float:
    """Max |(U+U - I)_ij| for the evolution operator of ``m`` on input ``x``."""
    from . import engine

    op = engine.build_evolution(m, x)
    u = op.matrix
    gram = (u.conjugate().T @ u) - sp.identity(op.dim, dtype=complex, format="csr")
    return float(abs(gram).max()) if gram.nnz else 0.0


def check_global_unitarity(
    m: MachineSpec, n: int, tolerance: float = COMPLETED_TOLERANCE, cap: int = 4096
):
    """Sweep all inputs of length ``n`` and report the worst unitarity deviation.

    Refused when the alphabet has more than ``cap`` strings of length ``n``.
    Returns ``(max deviation, worst input)``.
    """
    from . import engine
    from .core import AlphabetError  # noqa: F401  (re-export convenience)

    total = len(m.alphabet) ** n
    if total > cap:
        raise CapExceeded(f"sweep over {total} inputs exceeds cap {cap}")
    worst = 0.0
    worst_x: tuple[str, ...] = ()
    for x in engine.enumerate_strings(m.alphabet, n):
        dev = unitarity_deviation(m, x)
        if dev > worst:
            worst, worst_x = dev, x
    return worst, worst_x


class CapExceeded(QfaError):
    """An enumeration or dimension cap would be exceeded."""


def _col_norm_check(columns: dict[str, dict[str, complex]], sym: str, order, tol: float):
    """Verify pairwise orthonormality of specified columns, sparsely."""
    touching: dict[str, list[str]] = {}
    for src, col in columns.items():
        for tgt in col:
            touching.setdefault(tgt, []).append(src)
    seen_pairs = set()
    for src, col in columns.items():
        nrm = math.sqrt(sum(abs(a) ** 2 for a in col.values()))
        if abs(nrm - 1.0) > tol:
            raise CompletionError(sym, src, src, abs(nrm - 1.0))
        partners = {other for tgt in col for other in touching[tgt] if other != src}
        for other in partners:
            key = tuple(sorted((src, other)))
            if key in seen_pairs:
                continue
            seen_pairs.add(key)
            ocol = columns[other]
            ip = sum(col[k].conjugate() * ocol[k] for k in col.keys() & ocol.keys())
            if abs(ip) > tol:
                raise CompletionError(sym, src, other, abs(ip))


def complete_unitary(vd: VdForm, tolerance: float = DEFAULT_TOLERANCE) -> VdForm:
    """Fill the unspecified columns of each symbol matrix to a full unitary.

    Deterministic Gram-Schmidt: unspecified columns are filled in declared
    state order; candidate vectors are the standard basis vectors walked in
    declared state order, skipping candidates already in the span of the
    accumulated columns.  Two orthogonalization passes keep the completed
    matrices unitary to within 1e-9.  Idempotent: a complete form is
    verified and returned unchanged.
    """
    if vd.is_complete():
        for sym in vd.symbols():
            _col_norm_check({s: dict(c) for s, c in vd.v.get(sym, {}).items()}, sym, vd.states, COMPLETED_TOLERANCE)
        return vd

    new_v: dict[str, dict[str, dict[str, complex]]] = {}
    for sym in vd.symbols():
        columns = {src: dict(col) for src, col in vd.v.get(sym, {}).items()}
        _col_norm_check(columns, sym, vd.states, tolerance)
        touching: dict[str, list[str]] = {}
        for src, col in columns.items():
            for tgt in col:
                touching.setdefault(tgt, []).append(src)

        def orthogonalize(vec: dict[str, complex]) -> dict[str, complex]:
            for _ in range(2):  # re-orthogonalization pass for numerical stability
                done: set[str] = set()
                while True:
                    frontier = [s for t in vec for s in touching.get(t, ()) if s not in done]
                    if not frontier:
                        break
                    for src in dict.fromkeys(frontier):
                        done.add(src)
                        col = columns[src]
                        ip = sum(col[k].conjugate() * vec[k] for k in col.keys() & vec.keys())
                        if ip != 0:
                            for k, a in col.items():
                                vec[k] = vec.get(k, 0) - ip * a
                vec = {k: a for k, a in vec.items() if abs(a) > 1e-14}
            return vec

        cand_iter = iter(vd.states)
        for src in vd.states:
            if src in columns:
                continue
            while True:
                try:
                    cand = next(cand_iter)
                except StopIteration as exc:  # pragma: no cover - count argument rules this out
                    raise CompletionError(sym, src, src, 0.0) from exc
                vec = orthogonalize({cand: 1.0})
                nrm = math.sqrt(sum(abs(a) ** 2 for a in vec.values()))
                if nrm > 1e-8:
                    break
            col = {k: a / nrm for k, a in vec.items()}
            columns[src] = col
            for tgt in col:
                touching.setdefault(tgt, []).append(src)
        new_v[sym] = columns

    return VdForm(
        states=vd.states,
        alphabet=vd.alphabet,
        v=new_v,
        d=dict(vd.d),
        specified={sym: tuple(vd.specified.get(sym, ())) for sym in vd.symbols()},
        defaulted_directions=vd.defaulted_directions,
    )


def complete_machine(m: MachineSpec, tolerance: float = DEFAULT_TOLERANCE) -> MachineSpec:
    """Unitary-complete a direction-partitioned machine, keeping its partition."""
    vd = to_vd_form(m, core_only=True)
    full = complete_unitary(vd, tolerance)
    return from_vd_form(full, m.initial, m.acc, m.rej, meta=dict(m.meta))


def is_non_recurrent(m: MachineSpec) -> bool:
    """True iff no authored transition re-enters the initial state from elsewhere."""
    for (p, _), entries in m.core_delta().items():
        if p == m.initial:
            continue
        for q, _, amp in entries:
            if q == m.initial and amp != 0:
                return False
    return True


def is_non_circular(m: MachineSpec) -> bool:
    """True iff the head never moves left off the left endmarker or right off the right one."""
    for (_, sym), entries in m.core_delta().items():
        if sym == LEFT_END and any(d == -1 and amp != 0 for _, d, amp in entries):
            return False
        if sym == RIGHT_END and any(d == 1 and amp != 0 for _, d, amp in entries):
            return False
    return True


def _halts_at(m: MachineSpec, which: str, marker: str) -> bool:
    target = m.acc if which == "acc" else m.rej
    for (_, sym), entries in m.core_delta().items():
        for q, d, amp in entries:
            if q in target and amp != 0 and (sym != marker or d != 0):
                return False
    return True


def halts_at_left_end(m: MachineSpec, which: str = "acc") -> bool:
    """Conservative static check: the chosen halting class is entered only
    on the left endmarker without moving.  Sufficient, not necessary; see
    :func:`qfa_lab.engine.observe_halting` for the dynamic fallback."""
    return _halts_at(m, which, LEFT_END)


def halts_at_right_end(m: MachineSpec, which: str = "acc") -> bool:
    """Mirror of :func:`halts_at_left_end` for the right endmarker."""
    return _halts_at(m, which, RIGHT_END)
