"""Command-line entry point.

Subcommands: ``check``, ``vectorize``, ``validate-vec``, ``des`` and ``run``.
Exit status is 0 on success, 1 when a check or validation fails and 2 on
usage, configuration or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import des, memctl, slp, stack
from .models import BUILDERS
from .textfmt import ParseError
from .wfsk import DomainSpec, Verdict, check_model, default_workers

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(str(e)) from None


def _workers(requested: int) -> int:
    n = default_workers() if requested == 0 else requested
    cap = os.environ.get("SKIPCHECK_WORKERS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _domain(args) -> DomainSpec:
    random_mode = args.mode == "random"
    kw = dict(
        mode=args.mode,
        capacity=args.capacity,
        seed=args.seed,
        samples=args.samples,
        prog_len=args.prog_len if args.prog_len is not None else (12 if random_mode else 2),
        n_vars=args.vars if args.vars is not None else (6 if random_mode else 2),
    )
    for name in ("elems", "imem_max", "stack_max", "pc_slack", "addrs", "values", "mem_size", "reqs_max", "store_values"):
        v = getattr(args, name)
        if v is not None:
            kw[name] = v
    return DomainSpec(**kw)


def _print_table(report, out):
    d = report.to_dict()
    rows = [
        ("model", d["model"]),
        ("mode", d["mode"]),
        ("states checked", d["states_checked"]),
        ("non-good (skipped)", d["non_good"]),
    ]
    rows += [(f"  {v.value}", d["histogram"][v.value]) for v in Verdict]
    rows += [
        ("max skip", d["max_skip"]),
        ("counterexamples", d["total_counterexamples"]),
        ("wall time (s)", f"{report.wall_time:.2f}"),
        ("result", "PASS" if report.passed else "FAIL"),
    ]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}", file=out)
    for cex in report.counterexamples:
        print(cex.to_json(), file=out)


def cmd_check(args, out) -> int:
    try:
        domain = _domain(args)
        report = check_model(
            args.model,
            domain,
            max_counterexamples=args.max_cex,
            workers=_workers(args.workers),
            mutant=args.mutant,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None
    if args.format == "json":
        json.dump(report.to_dict(), out, indent=2)
        out.write("\n")
    else:
        _print_table(report, out)
    return EXIT_OK if report.passed else EXIT_FAIL


def _report_validation(res, out) -> int:
    if res.ok:
        print("validation: OK", file=out)
        return EXIT_OK
    print(f"validation: FAILED: {res.reason}", file=out)
    if res.store is not None:
        print(f"  initial store: {res.store!r}", file=out)
    return EXIT_FAIL


def cmd_vectorize(args, out) -> int:
    sprg = slp.parse_program(_read(args.input), allow_vector=False)
    vprg = slp.vectorize(sprg)
    stores = slp.validation_stores(slp.variables(sprg), trials=args.trials, seed=args.seed)
    res = slp.validate(sprg, vprg, stores)
    print(f"{len(sprg)} scalar -> {len(vprg)} vector instructions", file=out)
    status = _report_validation(res, out)
    if res.ok or args.force:
        text = slp.format_program(vprg)
        if args.output:
            Path(args.output).write_text(text)
        else:
            out.write(text)
    else:
        print("output not written (use --force to override)", file=out)
    return status


def cmd_validate_vec(args, out) -> int:
    sprg = slp.parse_program(_read(args.scalar), allow_vector=False)
    vprg = slp.parse_program(_read(args.vector))
    stores = slp.validation_stores(slp.variables(sprg), trials=args.trials, seed=args.seed)
    return _report_validation(slp.validate(sprg, vprg, stores), out)


def cmd_des(args, out) -> int:
    defs, sched = des.parse_events(_read(args.events))
    initial = des.DesState(args.start, sched, des.FrozenMap())
    if not initial.valid():
        raise UsageError(f"initial schedule has events before start time {args.start}")
    step = des.MUTANTS[args.mutant] if args.mutant else des.opt_step
    report = des.match_skipping_trace(initial, defs, args.steps, step=step)
    if args.format == "json":
        json.dump(
            {
                "ok": report.ok,
                "steps": [
                    {"index": r.index, "t": r.state.t, "t_next": r.successor.t, "skip_count": r.skip_count, "abstract_len": r.abstract_len}
                    for r in report.steps
                ],
                "mismatch": report.mismatch.index if report.mismatch else None,
            },
            out,
            indent=2,
        )
        out.write("\n")
    else:
        for r in report.steps:
            verdict = "match" if r.abstract_len is not None else "MISMATCH"
            print(f"step {r.index:>4}: t {r.state.t} -> {r.successor.t}  skip {r.skip_count}  {verdict}", file=out)
        print("trace: OK" if report.ok else f"trace: FAILED at {report.describe_mismatch()}", file=out)
    return EXIT_OK if report.ok else EXIT_FAIL


def _initial_mem(args) -> tuple:
    if args.mem is not None:
        return memctl.parse_memory(args.mem)
    return (0,) * args.mem_size


def cmd_run(args, out) -> int:
    text = _read(args.program)
    m = args.machine
    if m in ("stk", "bstk"):
        prog = stack.parse_program(text)
        if m == "stk":
            s, step = stack.SState(prog, 0, ()), lambda s: stack.spec_step(s, args.stack_cap)
        else:
            s, step = stack.IState(prog, 0, (), ()), lambda s: stack.impl_step(s, args.capacity, args.stack_cap)
    elif m in ("memc", "optmemc"):
        reqs = memctl.parse_requests(text)
        mem = _initial_mem(args)
        if m == "memc":
            s, step = memctl.MState(reqs, 0, mem), memctl.spec_step
        else:
            s, step = memctl.OptMState(reqs, 0, (), mem), lambda s: memctl.impl_step(s, args.capacity)
    else:
        prog = slp.parse_program(text, allow_vector=(m == "vector"))
        if m == "scalar":
            s, step = slp.ScalarState(prog, 0, slp.Store()), slp.spec_step
        else:
            s, step = slp.VectorState(prog, 0, slp.Store()), slp.vec_step
    n = args.steps if args.steps is not None else len(getattr(s, "imem", getattr(s, "reqs", getattr(s, "prog", ())))) + 1
    from .wfsk import jsonable

    for i in range(n + 1):
        view = {k: v for k, v in jsonable(s).items() if k not in ("imem", "reqs", "prog")}
        print(f"{i:>4} {json.dumps(view)}", file=out)
        s = step(s)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skipcheck", description="Skipping-refinement checks for optimized reactive systems.")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("check", help="check a bundled model over a bounded or sampled domain")
    c.add_argument("model", choices=sorted(BUILDERS))
    c.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    c.add_argument("--capacity", "-k", type=int, default=2)
    c.add_argument("--elems", type=_ints)
    c.add_argument("--imem-max", type=int)
    c.add_argument("--stack-max", type=int)
    c.add_argument("--pc-slack", type=int)
    c.add_argument("--addrs", type=_ints)
    c.add_argument("--values", type=_ints)
    c.add_argument("--mem-size", type=int)
    c.add_argument("--reqs-max", type=int)
    c.add_argument("--prog-len", type=int)
    c.add_argument("--vars", type=int)
    c.add_argument("--store-values", type=_ints)
    c.add_argument("--seed", type=int)
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--mutant")
    c.add_argument("--format", choices=("table", "json"), default="table")
    c.add_argument("--max-cex", type=int, default=10)
    c.add_argument("--workers", type=int, default=1, help="0 means one per CPU (capped by SKIPCHECK_WORKERS)")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("vectorize", help="pack a scalar program and validate the result")
    v.add_argument("input")
    v.add_argument("-o", "--output")
    v.add_argument("--force", action="store_true")
    v.add_argument("--trials", type=int, default=32)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_vectorize)

    vv = sub.add_parser("validate-vec", help="validate a vector program against its scalar source")
    vv.add_argument("scalar")
    vv.add_argument("vector")
    vv.add_argument("--trials", type=int, default=32)
    vv.add_argument("--seed", type=int, default=0)
    vv.set_defaults(func=cmd_validate_vec)

    d = sub.add_parser("des", help="run the optimized event simulation and match it against the abstract one")
    d.add_argument("events")
    d.add_argument("--steps", type=int, default=10)
    d.add_argument("--start", type=int, default=0)
    d.add_argument("--mutant", choices=sorted(des.MUTANTS))
    d.add_argument("--format", choices=("table", "json"), default="table")
    d.set_defaults(func=cmd_des)

    r = sub.add_parser("run", help="print a single machine's trace")
    r.add_argument("machine", choices=("stk", "bstk", "memc", "optmemc", "scalar", "vector"))
    r.add_argument("program")
    r.add_argument("--steps", type=int)
    r.add_argument("--capacity", "-k", type=int, default=2)
    r.add_argument("--stack-cap", type=int)
    r.add_argument("--mem-size", type=int, default=4)
    r.add_argument("--mem", help="comma-separated initial memory, overrides --mem-size")
    r.set_defaults(func=cmd_run)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, ParseError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
