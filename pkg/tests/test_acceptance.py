"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line."""

import itertools
import random
from functools import partial

import pytest

from oracle import oracle_verdict
from skipcheck import des, memctl, slp, stack
from skipcheck.models import get_model
from skipcheck.slp import ScalarInst, ScalarState, Store, VectorInst, VectorState
from skipcheck.wfsk import DomainSpec, check_model, enumerate_good_states, iter_results

STACK_K2 = DomainSpec(capacity=2, elems=(0, 1), imem_max=4, stack_max=3)
STACK_K3 = DomainSpec(capacity=3, elems=(0, 1), imem_max=3, stack_max=3)
MEMC_K2 = DomainSpec(capacity=2)

pytestmark = pytest.mark.slow


def test_1_stack_exhaustive(criterion):
    r2 = check_model("stack", STACK_K2)
    r3 = check_model("stack", STACK_K3)
    ok = r2.passed and r3.passed and r2.wall_time < 60 and r2.max_skip <= 3 and r3.max_skip <= 4
    criterion(
        "1 stack exhaustive k=2,3",
        ok,
        f"k=2: {r2.states_checked} states, {r2.total_counterexamples} cex, {r2.wall_time:.1f}s; "
        f"k=3: {r3.states_checked} states, {r3.total_counterexamples} cex",
    )


def test_2_good_state_closure(criterion):
    total = bad = 0
    for domain in (STACK_K2, STACK_K3):
        model = get_model("stack", capacity=domain.capacity)
        for s in enumerate_good_states(model, domain):
            total += 1
            if not model.config.good_state(model.concrete.step(s)):
                bad += 1
    criterion("2 good-state closure", total > 0 and bad == 0, f"{total} good states, {bad} escape")


def test_3_mutation_sensitivity(criterion):
    counts = {m: check_model("stack", STACK_K2, mutant=m).total_counterexamples for m in stack.MUTANTS}
    ok = len(counts) >= 3 and all(c >= 1 for c in counts.values())
    criterion("3 stack mutants caught", ok, ", ".join(f"{m}: {c}" for m, c in counts.items()))


def _last_write_wins(b, m):
    # reference semantics for a buffer: each address ends with its last write
    mem = list(m)
    for req in b:
        if req.kind == "write" and 0 <= req.addr < len(mem):
            mem[req.addr] = req.value
    return tuple(mem)


def test_4_memctl(criterion):
    rng = random.Random(4)
    randoms = [tuple(rng.randint(-10**9, 10**9) for _ in range(rng.randint(0, 16))) for _ in range(10**4)]
    small = [m for n in range(4) for m in itertools.product((0, 1), repeat=n)]
    refresh_ok = all(memctl.mrefresh(m) == m for m in randoms + small)

    alphabet = memctl.request_alphabet((0, 1, 2), (0, 1))
    mems = list(itertools.product((0, 1), repeat=3))
    buffers = [b for n in range(4) for b in itertools.product(alphabet, repeat=n)]
    coalesce_ok = all(
        memctl.execute_buffer(memctl.mark_redundant(b), m) == memctl.execute_buffer(b, m) == _last_write_wins(b, m)
        for b in buffers
        for m in mems
    )

    rep = check_model("memc", MEMC_K2)
    criterion(
        "4 memory controller",
        refresh_ok and coalesce_ok and rep.passed,
        f"mrefresh on {len(randoms) + len(small)} memories: {refresh_ok}; "
        f"coalescing on {len(buffers) * len(mems)} cases: {coalesce_ok}; "
        f"k=2: {rep.states_checked} states, {rep.total_counterexamples} cex",
    )


def _program_corpus():
    rng = random.Random(5)
    return [slp.random_program(rng, n_vars=6, max_len=12) for _ in range(10**4)], rng


def test_5_vectorizer(criterion):
    progs, rng = _program_corpus()
    names = slp.var_names(6)
    round_trip = steps_ok = stores_ok = 0
    for p in progs:
        vprg = slp.vectorize(p)
        round_trip += slp.scalarize_vprg(vprg) == p
        store = Store({v: rng.randint(-1000, 1000) for v in names})
        s = VectorState(vprg, 0, store)
        good = True
        for inst in vprg:
            r = slp.check_formula2(s)
            want = 2 if isinstance(inst, VectorInst) else 1
            good &= r.ok and r.steps == want
            s = slp.vec_step(s)
        steps_ok += good
        # independent final-store comparison: run the source straight through
        final = ScalarState(p, 0, store)
        for _ in p:
            final = slp.spec_step(final)
        stores_ok += final.store == s.store

    sprg = (ScalarInst("add", "a", "b", "c"), ScalarInst("add", "d", "a", "e"))
    forced = (VectorInst("vadd", ("a", "b", "c"), ("d", "a", "e")),)
    rejected = not slp.validate(sprg, forced).ok

    n = len(progs)
    ok = round_trip == steps_ok == stores_ok == n and rejected
    criterion(
        "5 vectorizer",
        ok,
        f"(a) {round_trip}/{n} (b) {steps_ok}/{n} (c) {stores_ok}/{n} (d) dependent pack rejected: {rejected}",
    )


def test_6_pcT_consistency(criterion):
    progs, _ = _program_corpus()
    bad = sum(
        slp.pcT(len(v) - 1, v) != len(slp.scalarize_vprg(v)) for v in (slp.vectorize(p) for p in progs)
    )
    criterion("6 pcT consistency", bad == 0, f"{len(progs)} programs, {bad} mismatches")


def test_7_des(criterion):
    rng = random.Random(7)
    traces = good = 0
    for _ in range(100):
        table = des.random_table(rng, max_events=5, max_delta=10)
        rep = des.match_skipping_trace(des.random_initial(rng, table), table, 50)
        traces += 1
        lengths_ok = all(
            r.abstract_len == (min(te for _, te in r.state.sched) - r.state.t + 1 if r.state.sched else 1)
            for r in rep.steps
        )
        good += rep.ok and len(rep.steps) == 50 and lengths_ok

    skips = {}
    for te in (0, 1, 9, 999, 1500):
        rep = des.match_skipping_trace(des.state(0, {("e2", te)}), des.DEFAULT_TABLE, 1)
        skips[te + 1] = rep.ok and rep.steps[0].abstract_len == te + 1
    ok = good == traces and all(skips.values()) and max(skips) >= 1000
    criterion("7 DES unbounded skipping", ok, f"{good}/{traces} traces matched; skip counts {sorted(skips)} matched")


def test_8_oracle_agreement(criterion):
    cases = {
        "stack": (STACK_K2, partial(stack.impl_step, k=2), stack.spec_step, stack.ref_map, partial(stack.rank, k=2)),
        "memc": (MEMC_K2, partial(memctl.impl_step, k=2), memctl.spec_step, memctl.ref_map, partial(memctl.rank, k=2)),
    }
    summary = []
    all_ok = True
    for name, (domain, impl, spec, refmap, rank) in cases.items():
        n = disagree = 0
        for s, _, r in iter_results(name, domain):
            n += 1
            verdict, m = oracle_verdict(s, impl, lambda x: [spec(x)], refmap, rank, 4)
            got_m = r.steps if verdict in ("MATCH", "SKIP") else None
            disagree += (verdict, m) != (r.verdict.value, got_m)
        summary.append(f"{name}: {n} states, {disagree} disagreements")
        all_ok &= n > 0 and disagree == 0
    criterion("8 oracle agreement", all_ok, "; ".join(summary))
