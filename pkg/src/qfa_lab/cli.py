"""Command-line surface: validate, simulate, compose, report, zoo export.

Exit codes: 0 for success (or a passing check), 1 for a domain refusal or a
failed check when that check is the command's question, 2 for input errors.
Output is deterministic given identical inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import classical, engine, fileformat, metrics, ops, wellformed, zoo
from .core import AlphabetError, QfaError, parse_input
from .fileformat import ParseError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def _load_machine(path, strict=False):
    warnings: list[str] = []
    obj = fileformat.load(path, strict=strict, warnings=warnings)
    for w in warnings:
        print(f"warning: {path}: {w}", file=sys.stderr)
    return obj


def cmd_validate(args) -> int:
    m = _load_machine(args.file, strict=args.strict)
    if isinstance(m, classical.Dfa):
        print("dfa container: structurally valid (no unitarity conditions apply)")
        return EXIT_OK
    if args.complete:
        m = wellformed.complete_machine(m)
        fileformat.save(m, args.complete)
    report = wellformed.check_wellformed(m, tolerance=args.tolerance)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=1, sort_keys=True))
    else:
        print(f"states: {report.n_states}")
        print(f"max residual: {report.max_residual:.3e} (tolerance {report.tolerance:.1e})")
        for name, violations in (
            ("condition 1", report.condition1_violations),
            ("condition 2", report.condition2_violations),
            ("condition 3", report.condition3_violations),
        ):
            print(f"{name}: {len(violations)} violation(s)")
            for sym, q1, q2, mag in violations[:5]:
                print(f"  {sym!r}: ({q1}, {q2}) residual {mag:.3e}")
        print(f"verdict: {report.verdict}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_simulate(args) -> int:
    m = _load_machine(args.file)
    if isinstance(m, classical.Dfa):
        x = parse_input(m.alphabet, args.input)
        accepted = classical.dfa_run(m, x)
        print(f"dfa run: {'accept' if accepted else 'reject'}")
        return EXIT_OK
    x = parse_input(m.alphabet, args.input)
    result = engine.simulate(m, x, max_steps=args.max_steps, cutoff=args.cutoff)
    payload = result.to_dict()
    if args.oracle:
        oracle = engine.simulate_oracle(m, x, max_steps=args.max_steps, cutoff=args.cutoff)
        payload["oracle_max_discrepancy"] = max(
            abs(result.p_acc - oracle.p_acc),
            abs(result.p_rej - oracle.p_rej),
            abs(result.residual - oracle.residual),
        )
    if args.format == "json":
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        c = result.clamped()
        print(f"p_acc    = {c.p_acc:.6f}")
        print(f"p_rej    = {c.p_rej:.6f}")
        print(f"residual = {c.residual:.3e}")
        print(f"expected halting time = {result.expected_halt_time:.2f} steps "
              f"({result.steps_run} steps run, halted={result.halted})")
        if args.oracle:
            print(f"oracle max discrepancy = {payload['oracle_max_discrepancy']:.3e}")
    return EXIT_OK


def cmd_compose(args) -> int:
    machines = [_load_machine(f) for f in args.files]
    if any(isinstance(m, classical.Dfa) for m in machines):
        raise AlphabetError("compose expects 2qfa containers")
    op = args.op
    if op == "complement":
        out, audit = ops.complement(machines[0])
    elif op == "reverse":
        out, audit = ops.reverse(machines[0])
    elif op in ("intersect", "union"):
        if args.n is None:
            print("error: --n is required for intersect/union", file=sys.stderr)
            return EXIT_INPUT
        fn = ops.intersect if op == "intersect" else ops.union
        out, audit = fn(machines[0], machines[1], args.n)
    elif op == "catenate":
        out, audit = ops.catenate(machines[0], machines[1], experimental=args.experimental)
    else:  # pragma: no cover - argparse choices rule this out
        return EXIT_INPUT
    if args.out:
        fileformat.save(out, args.out)
    if args.format == "json":
        print(json.dumps(audit.to_dict(), indent=1, sort_keys=True))
    else:
        d = audit.to_dict()
        print(f"operation: {d['operation']} on {', '.join(d['components'])}")
        print(f"state count: {d['state_count']}")
        if d["formula_id"]:
            print(f"{d['formula_id']}: formula value {d['formula_value']}, "
                  f"matches={d['formula_matches']}, gap={d['gap']}")
        for name, checked, held in d["side_conditions"]:
            print(f"side condition {name}: checked={checked} held={held}")
        for note in d["notes"]:
            print(f"note: {note}")
    return EXIT_OK


def _report_suite(suite: str, n: int, big_n: int) -> list[metrics.BoundReport]:
    reports: list[metrics.BoundReport] = []
    if suite in ("lemma1", "all"):
        m = zoo.lemma2_machine(n)
        pred = zoo.intended_predicate(m)
        reports += metrics.check_lemma1_bounds(m, pred, 2 * n, 0.0)
        for dfa in (
            classical.parity_dfa(),
            classical.mod3_dfa(),
            classical.minimize_dfa(classical.counting_dfa(2)),
            classical.universal_dfa(),
            classical.empty_dfa(),
        ):
            reports += metrics.check_lemma1_dfa_bound(dfa, maxlen=6)
    if suite in ("prop3", "all"):
        reports += metrics.check_prop3(n)
    if suite in ("remark1", "all"):
        reports += metrics.remark1_reports(big_n)
    return reports


def cmd_report(args) -> int:
    try:
        reports = _report_suite(args.suite, args.n, args.N)
    except metrics.PreconditionFailed as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.format == "json":
        print(json.dumps([r.to_dict() for r in reports], indent=1, sort_keys=True))
    else:
        print(metrics.render_table(reports))
    return EXIT_OK


def cmd_zoo(args) -> int:
    if args.id == "lemma2":
        m = zoo.lemma2_machine(args.n)
    elif args.id == "prop1":
        m = zoo.prop1_machine(args.N)
    elif args.id == "prop2_m1":
        m = zoo.prop2_machines(args.N)[0]
    elif args.id == "prop2_m2":
        m = zoo.prop2_machines(args.N)[1]
    elif args.id == "upal":
        m = zoo.upal_machine(args.N)
    elif args.id == "ab1":
        m = zoo.ab1_machine(args.N)
    elif args.id == "ab2":
        m = zoo.ab2_machine(args.N)
    else:  # pragma: no cover
        return EXIT_INPUT
    fileformat.save(m, args.out)
    print(f"wrote {ops.describe(m)} ({len(m.states)} states) to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qfa-lab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check the well-formedness conditions")
    v.add_argument("file")
    v.add_argument("--tolerance", type=float, default=wellformed.DEFAULT_TOLERANCE)
    v.add_argument("--complete", metavar="OUT", help="unitarily complete and write the result")
    v.add_argument("--strict", action="store_true", help="reject unknown container fields")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(fn=cmd_validate)

    s = sub.add_parser("simulate", help="run the measured evolution on one input")
    s.add_argument("file")
    s.add_argument("--input", required=True)
    s.add_argument("--max-steps", type=int, default=None)
    s.add_argument("--cutoff", type=float, default=engine.DEFAULT_CUTOFF)
    s.add_argument("--oracle", action="store_true", help="cross-run the dense oracle")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(fn=cmd_simulate)

    c = sub.add_parser("compose", help="apply a machine combinator")
    c.add_argument("--op", required=True,
                   choices=("complement", "intersect", "union", "reverse", "catenate"))
    c.add_argument("files", nargs="+")
    c.add_argument("--n", type=int, default=None, help="input length for intersect/union")
    c.add_argument("--out", help="write the composed machine here")
    c.add_argument("--experimental", action="store_true",
                   help="allow the overlapping-alphabet catenation fusion")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.set_defaults(fn=cmd_compose)

    r = sub.add_parser("report", help="render the bound-audit tables")
    r.add_argument("--suite", choices=("lemma1", "prop3", "remark1", "all"), required=True)
    r.add_argument("--n", type=int, default=2)
    r.add_argument("--N", type=int, default=3)
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.set_defaults(fn=cmd_report)

    z = sub.add_parser("zoo", help="export a built-in machine")
    z.add_argument("id", choices=("lemma2", "prop1", "prop2_m1", "prop2_m2", "upal", "ab1", "ab2"))
    z.add_argument("--n", type=int, default=2)
    z.add_argument("--N", type=int, default=2)
    z.add_argument("--out", required=True)
    z.set_defaults(fn=cmd_zoo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, AlphabetError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QfaError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
