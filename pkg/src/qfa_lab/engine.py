"""Evolution operators and the measure-each-step acceptance semantics.

For an input of length ``n`` the configuration space is spanned by pairs
``(state, position)`` with positions on the circular range ``[0, n+1]``;
position 0 carries the left endmarker and position n+1 the right one.  One
evolution step applies every transition ``(p, x_i) -> (q, d, amp)`` sending
``(p, i)`` to ``(q, (i + d) mod (n + 2))``.

Acceptance follows the measure-every-step discipline: the computation is
measured *before* the first evolution step (so a machine whose initial
state accepts halts immediately with certainty), then alternates apply /
measure.  Halting mass is accumulated additively and the surviving
component is kept unnormalized, which avoids renormalization drift.

:func:`simulate` propagates a sparse amplitude map and is the production
path; :func:`simulate_oracle` rebuilds everything with dense matrices and
explicit projectors and exists purely to cross-check it.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .core import (
    LEFT_END,
    RIGHT_END,
    AlphabetError,
    MachineSpec,
    parse_input,
)
from .wellformed import CapExceeded

DEFAULT_CUTOFF = 1e-12


def max_dim() -> int:
    """Configuration-space cap for dense paths, from QFA_LAB_MAX_DIM."""
    return int(os.environ.get("QFA_LAB_MAX_DIM", "4096"))


def padded_symbol(x: Sequence[str], i: int) -> str:
    if i == 0:
        return LEFT_END
    if i == len(x) + 1:
        return RIGHT_END
    return x[i - 1]


@dataclass(frozen=True)
class EvolutionOperator:
    """The one-step evolution operator for a fixed input."""

    machine: MachineSpec
    input: tuple[str, ...]
    n: int
    dim: int
    matrix: sp.csr_matrix


def build_evolution(m: MachineSpec, x) -> EvolutionOperator:
    """Assemble the sparse evolution matrix for machine ``m`` on input ``x``."""
    toks = parse_input(m.alphabet, x)
    n = len(toks)
    width = n + 2
    idx = m.state_index()
    dim = len(m.states) * width
    rows: list[int] = []
    cols: list[int] = []
    vals: list[complex] = []
    for i in range(width):
        sym = padded_symbol(toks, i)
        for p in m.states:
            src = idx[p] * width + i
            for q, d, amp in m.column(p, sym):
                rows.append(idx[q] * width + (i + d) % width)
                cols.append(src)
                vals.append(amp)
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex)
    return EvolutionOperator(machine=m, input=toks, n=n, dim=dim, matrix=matrix)


@dataclass(frozen=True)
class SimulationResult:
    """Accumulated acceptance statistics for one input.

    ``expected_halt_time`` is the sum over steps of (step index) times the
    probability mass that halted at that step; ``residual`` is whatever
    non-halting mass remains when the run stops.  ``halted`` records whether
    the residual fell below the cutoff rather than the step budget running
    out.  The probabilities are reported unclamped; ``clamped`` trims the
    <= 1e-12 numerical spill for display.
    """

    p_acc: float
    p_rej: float
    residual: float
    steps_run: int
    expected_halt_time: float
    halted: bool
    series: tuple = ()

    def clamped(self) -> "SimulationResult":
        fix = lambda v: min(max(v, 0.0), 1.0)
        return SimulationResult(
            fix(self.p_acc), fix(self.p_rej), fix(self.residual),
            self.steps_run, self.expected_halt_time, self.halted, self.series,
        )

    def to_dict(self) -> dict:
        c = self.clamped()
        return {
            "p_acc": c.p_acc,
            "p_rej": c.p_rej,
            "residual": c.residual,
            "steps_run": self.steps_run,
            "expected_halt_time": self.expected_halt_time,
            "halted": self.halted,
        }


def default_max_steps(m: MachineSpec, n: int) -> int:
    return 20 * len(m.states) * (n + 2)


def simulate(
    m: MachineSpec,
    x,
    max_steps: int | None = None,
    cutoff: float = DEFAULT_CUTOFF,
    measure_first: bool = True,
    trace: bool = False,
) -> SimulationResult:
    """Run the measured evolution of ``m`` on ``x`` with sparse propagation.

    ``measure_first=False`` delays the first measurement until after one
    evolution step; it exists for sensitivity experiments and is not the
    acceptance semantics used anywhere else.
    """
    toks = parse_input(m.alphabet, x)
    n = len(toks)
    width = n + 2
    if max_steps is None:
        max_steps = default_max_steps(m, n)
    acc, rej = m.acc, m.rej

    delta = m.delta
    symbol_at = (LEFT_END,) + toks + (RIGHT_END,)
    column_cache: dict[tuple[str, int], tuple] = {}

    def column(p: str, i: int) -> tuple:
        key = (p, i)
        hit = column_cache.get(key)
        if hit is None:
            entries = delta.get((p, symbol_at[i]), ())
            hit = tuple((q, (i + d) % width, amp) for q, d, amp in entries)
            column_cache[key] = hit
        return hit

    amps: dict[tuple[str, int], complex] = {(m.initial, 0): 1.0 + 0j}
    p_acc = p_rej = 0.0
    expected = 0.0
    steps = 0
    series: list[tuple[int, float, float, float]] = []

    def measure(t: int):
        nonlocal p_acc, p_rej, expected, amps
        kept: dict[tuple[str, int], complex] = {}
        a = r = 0.0
        for cfg, amp in amps.items():
            w = abs(amp) ** 2
            if cfg[0] in acc:
                a += w
            elif cfg[0] in rej:
                r += w
            else:
                kept[cfg] = amp
        p_acc += a
        p_rej += r
        expected += t * (a + r)
        amps = kept

    def residual() -> float:
        return sum(abs(a) ** 2 for a in amps.values())

    if measure_first:
        measure(0)
    if trace:
        series.append((0, p_acc, p_rej, residual()))
    while steps < max_steps and residual() >= cutoff:
        nxt: dict[tuple[str, int], complex] = {}
        get = nxt.get
        for (p, i), amp in amps.items():
            for q, j, w in column(p, i):
                key = (q, j)
                nxt[key] = get(key, 0j) + amp * w
        amps = {k: v for k, v in nxt.items() if v != 0}
        steps += 1
        measure(steps)
        if trace:
            series.append((steps, p_acc, p_rej, residual()))

    res = residual()
    return SimulationResult(
        p_acc=p_acc,
        p_rej=p_rej,
        residual=res,
        steps_run=steps,
        expected_halt_time=expected,
        halted=res < cutoff,
        series=tuple(series),
    )


def simulate_oracle(
    m: MachineSpec,
    x,
    max_steps: int | None = None,
    cutoff: float = DEFAULT_CUTOFF,
    measure_first: bool = True,
) -> SimulationResult:
    """Dense-matrix re-implementation of :func:`simulate` used as an oracle.

    Builds the evolution matrix and the three measurement projectors as
    explicit dense matrices and iterates plain matrix-vector products.  No
    code is shared with the sparse path beyond input parsing.
    """
    toks = parse_input(m.alphabet, x)
    n = len(toks)
    width = n + 2
    dim = len(m.states) * width
    if dim > max_dim():
        raise CapExceeded(f"configuration space dimension {dim} exceeds cap {max_dim()}")
    if max_steps is None:
        max_steps = default_max_steps(m, n)
    idx = m.state_index()

    u = np.zeros((dim, dim), dtype=complex)
    for i in range(width):
        sym = padded_symbol(toks, i)
        for p in m.states:
            for q, d, amp in m.column(p, sym):
                u[idx[q] * width + (i + d) % width, idx[p] * width + i] += amp

    proj_acc = np.zeros((dim, dim), dtype=complex)
    proj_rej = np.zeros((dim, dim), dtype=complex)
    proj_non = np.zeros((dim, dim), dtype=complex)
    for q in m.states:
        target = proj_acc if q in m.acc else proj_rej if q in m.rej else proj_non
        for i in range(width):
            k = idx[q] * width + i
            target[k, k] = 1.0

    v = np.zeros(dim, dtype=complex)
    v[idx[m.initial] * width] = 1.0
    p_acc = p_rej = expected = 0.0
    steps = 0

    def measure(t: int):
        nonlocal p_acc, p_rej, expected, v
        a = float(np.linalg.norm(proj_acc @ v) ** 2)
        r = float(np.linalg.norm(proj_rej @ v) ** 2)
        p_acc += a
        p_rej += r
        expected += t * (a + r)
        v = proj_non @ v

    if measure_first:
        measure(0)
    while steps < max_steps and float(np.linalg.norm(v) ** 2) >= cutoff:
        v = u @ v
        steps += 1
        measure(steps)

    res = float(np.linalg.norm(v) ** 2)
    return SimulationResult(
        p_acc=p_acc,
        p_rej=p_rej,
        residual=res,
        steps_run=steps,
        expected_halt_time=expected,
        halted=res < cutoff,
    )


def enumerate_strings(alphabet: Sequence[str], length: int) -> Iterator[tuple[str, ...]]:
    """All strings of one length, lexicographic in declared symbol order."""
    return itertools.product(tuple(alphabet), repeat=length)


@dataclass(frozen=True)
class RecognitionReport:
    eps: float
    lengths: tuple[int, ...]
    n_members: int
    n_nonmembers: int
    worst_member_margin: float
    worst_nonmember_margin: float
    counterexamples: tuple = ()

    @property
    def recognized(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "lengths": list(self.lengths),
            "recognized": self.recognized,
            "n_members": self.n_members,
            "n_nonmembers": self.n_nonmembers,
            "worst_member_margin": self.worst_member_margin,
            "worst_nonmember_margin": self.worst_nonmember_margin,
            "counterexamples": [
                {"input": " ".join(x), "kind": kind, "value": val}
                for x, kind, val in self.counterexamples
            ],
        }


def recognizes(
    m: MachineSpec,
    predicate: Callable[[tuple[str, ...]], bool],
    lengths: Iterable[int],
    eps: float,
    enumeration_cap: int = 200_000,
    slack: float = 1e-9,
    **sim_kwargs,
) -> RecognitionReport:
    """Exhaustively compare machine acceptance with a language predicate.

    Members must reach p_acc >= 1 - eps - slack and non-members
    p_rej >= 1 - eps - slack.  Margins are reported relative to 1 - eps;
    the slack only absorbs floating-point noise.
    """
    lengths = tuple(lengths)
    total = sum(len(m.alphabet) ** n for n in lengths)
    if total > enumeration_cap:
        raise CapExceeded(f"{total} strings exceed enumeration cap {enumeration_cap}")
    need = 1.0 - eps
    worst_m = worst_n = float("inf")
    members = nonmembers = 0
    bad: list = []
    for n in lengths:
        for x in enumerate_strings(m.alphabet, n):
            r = simulate(m, x, **sim_kwargs)
            if predicate(x):
                members += 1
                margin = r.p_acc - need
                worst_m = min(worst_m, margin)
                if margin < -slack:
                    bad.append((x, "member_under_accepted", r.p_acc))
            else:
                nonmembers += 1
                margin = r.p_rej - need
                worst_n = min(worst_n, margin)
                if margin < -slack:
                    bad.append((x, "nonmember_under_rejected", r.p_rej))
    return RecognitionReport(
        eps=eps,
        lengths=lengths,
        n_members=members,
        n_nonmembers=nonmembers,
        worst_member_margin=worst_m if members else float("nan"),
        worst_nonmember_margin=worst_n if nonmembers else float("nan"),
        counterexamples=tuple(bad[:20]),
    )


@dataclass(frozen=True)
class RuntimeProfile:
    """Worst-case expected halting times per length with a linear fit.

    ``slope`` is the least-squares coefficient c in T ~ c * (n + 2) fit
    through the origin; ``max_ratio`` is the worst observed T / (n + 2).
    """

    rows: tuple  # (length, worst input, worst expected halt time)
    slope: float
    max_ratio: float

    def to_dict(self) -> dict:
        return {
            "rows": [
                {"n": n, "worst_input": " ".join(x), "expected_halt_time": t}
                for n, x, t in self.rows
            ],
            "slope": self.slope,
            "max_ratio": self.max_ratio,
        }


def expected_runtime_profile(
    m: MachineSpec, lengths: Iterable[int], enumeration_cap: int = 200_000, **sim_kwargs
) -> RuntimeProfile:
    lengths = tuple(lengths)
    total = sum(len(m.alphabet) ** n for n in lengths)
    if total > enumeration_cap:
        raise CapExceeded(f"{total} strings exceed enumeration cap {enumeration_cap}")
    rows = []
    for n in lengths:
        worst_t = -1.0
        worst_x: tuple[str, ...] = ()
        for x in enumerate_strings(m.alphabet, n):
            r = simulate(m, x, **sim_kwargs)
            t = r.expected_halt_time + r.residual * r.steps_run  # charge stragglers their cutoff time
            if t > worst_t:
                worst_t, worst_x = t, x
        rows.append((n, worst_x, worst_t))
    xs = np.array([n + 2 for n, _, _ in rows], dtype=float)
    ts = np.array([t for _, _, t in rows], dtype=float)
    slope = float((xs @ ts) / (xs @ xs)) if len(rows) else 0.0
    max_ratio = float(max(ts / xs)) if len(rows) else 0.0
    return RuntimeProfile(rows=tuple(rows), slope=slope, max_ratio=max_ratio)


def observe_halting(m: MachineSpec, inputs: Iterable, cutoff: float = DEFAULT_CUTOFF) -> dict:
    """Dynamic halting-position observation backing the static endmarker checks.

    Simulates each input and records at which position kinds ("left",
    "right", "interior") accepting and rejecting mass actually lands.
    """
    kinds = {"acc": set(), "rej": set()}
    for x in inputs:
        toks = parse_input(m.alphabet, x)
        n = len(toks)
        width = n + 2
        amps = {(m.initial, 0): 1.0 + 0j}
        columns: dict[tuple[str, int], tuple] = {}
        for i in range(width):
            sym = padded_symbol(toks, i)
            for p in m.states:
                entries = m.column(p, sym)
                if entries:
                    columns[(p, i)] = tuple((q, (i + d) % width, amp) for q, d, amp in entries)
        steps = 0
        budget = default_max_steps(m, n)
        while amps and steps <= budget:
            kept = {}
            for (q, i), amp in amps.items():
                if abs(amp) ** 2 < 1e-14:
                    continue
                cls = "acc" if q in m.acc else "rej" if q in m.rej else None
                if cls:
                    kinds[cls].add("left" if i == 0 else "right" if i == width - 1 else "interior")
                else:
                    kept[(q, i)] = amp
            nxt: dict[tuple[str, int], complex] = {}
            for cfg, amp in kept.items():
                for q, j, w in columns.get(cfg, ()):
                    nxt[(q, j)] = nxt.get((q, j), 0j) + amp * w
            amps = nxt
            steps += 1
            if sum(abs(a) ** 2 for a in amps.values()) < cutoff:
                break
    return kinds
