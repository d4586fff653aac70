"""Discrete-event simulation: a time-stepping abstract system and a priority-queue implementation.

The abstract system advances time by one when nothing is due and otherwise
picks any due event nondeterministically. The optimized system jumps
straight to the earliest scheduled event, so one of its steps stands for
``t_e - t + 1`` abstract steps, a number no constant bounds.
"""

from __future__ import annotations

import heapq
import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .frozenmap import FrozenMap
from .textfmt import ParseError, lines, parse_int
from .ts import RefinementConfig, TransitionSystem, identity, reachable_within


@dataclass(frozen=True)
class DesState:
    t: int
    sched: frozenset  # of (event_id, time)
    assign: FrozenMap = field(default_factory=FrozenMap)

    def valid(self) -> bool:
        return all(te >= self.t for _, te in self.sched)


@dataclass(frozen=True)
class EventDef:
    eid: str
    effects: tuple = ()  # (var, value)
    spawns: tuple = ()  # (event_id, delta)

    def __post_init__(self):
        if any(delta < 1 for _, delta in self.spawns):
            raise ValueError(f"event {self.eid}: spawn delta must be >= 1")


def state(t: int, sched=(), assign=None) -> DesState:
    return DesState(t, frozenset(sched), FrozenMap(assign or {}))


def execute(s: DesState, eid: str, defs: Mapping[str, EventDef]) -> DesState:
    """Run event ``eid`` due at ``s.t``: apply effects, schedule spawns, drop the pair."""
    ev = defs.get(eid, EventDef(eid))
    sched = set(s.sched)
    sched.discard((eid, s.t))
    sched.update((e, s.t + d) for e, d in ev.spawns)
    return DesState(s.t, frozenset(sched), s.assign.update(dict(ev.effects)))


def abstract_successors(s: DesState, defs: Mapping[str, EventDef]) -> list:
    due = sorted(e for e, te in s.sched if te == s.t)
    if not due:
        return [DesState(s.t + 1, s.sched, s.assign)]
    return [execute(s, e, defs) for e in due]


def next_event(s: DesState) -> Optional[tuple]:
    """Earliest scheduled ``(event_id, time)``, ties broken by smallest id."""
    if not s.sched:
        return None
    heap = [(te, e) for e, te in s.sched]
    heapq.heapify(heap)
    te, e = heap[0]
    return e, te


def opt_step(s: DesState, defs: Mapping[str, EventDef]) -> tuple:
    """One priority-queue step; returns the new state and how many abstract steps it covers."""
    nxt = next_event(s)
    if nxt is None:
        return DesState(s.t + 1, s.sched, s.assign), 1
    e, te = nxt
    jumped = DesState(te, s.sched, s.assign)
    return execute(jumped, e, defs), te - s.t + 1


def _opt_step_forget_remove(s: DesState, defs) -> tuple:
    # seeded bug: the executed event stays in the schedule
    nxt = next_event(s)
    if nxt is None:
        return opt_step(s, defs)
    e, te = nxt
    u, skip = opt_step(s, defs)
    return DesState(u.t, u.sched | {(e, te)}, u.assign), skip


MUTANTS = {"forget-remove": _opt_step_forget_remove}


def abstract_system(defs) -> TransitionSystem:
    return TransitionSystem(successors=lambda s: abstract_successors(s, defs), name="DES")


def optimized_system(defs, step=opt_step) -> TransitionSystem:
    return TransitionSystem.from_step(lambda s: step(s, defs)[0], name="OptDES")


@dataclass(frozen=True)
class TraceStep:
    index: int  # 1-based
    state: DesState
    successor: DesState
    skip_count: int
    abstract_len: Optional[int]


@dataclass
class TraceReport:
    ok: bool
    steps: list
    mismatch: Optional[TraceStep] = None

    def describe_mismatch(self) -> str:
        m = self.mismatch
        if m is None:
            return ""
        return f"step {m.index}: no abstract run of {m.skip_count} steps from {m.state} reaches {m.successor}"


def match_skipping_trace(initial: DesState, defs, n: int, step: Callable = opt_step) -> TraceReport:
    """Run the optimized system ``n`` steps, matching each step to an abstract run of its skip count."""
    if n < 0:
        raise ValueError("n must be non-negative")
    abstract = abstract_system(defs)
    steps = []
    s = initial
    for i in range(1, n + 1):
        u, skip = step(s, defs)
        found = reachable_within(abstract, s, u, skip, skip)
        rec = TraceStep(i, s, u, skip, found)
        steps.append(rec)
        if found is None:
            return TraceReport(False, steps, rec)
        s = u
    return TraceReport(True, steps)


def skip_count(s: DesState) -> int:
    nxt = next_event(s)
    return 1 if nxt is None else nxt[1] - s.t + 1


DEFAULT_TABLE = {
    "e0": EventDef("e0", (("x", 1),), (("e1", 2),)),
    "e1": EventDef("e1", (("y", 1),), (("e0", 1), ("e2", 3))),
    "e2": EventDef("e2", (("x", 0),), ()),
}


def random_table(rng, max_events: int = 5, max_delta: int = 10) -> dict:
    ids = [f"e{i}" for i in range(rng.randint(1, max_events))]
    table = {}
    for eid in ids:
        effects = tuple((rng.choice("xyz"), rng.randint(-9, 9)) for _ in range(rng.randint(0, 2)))
        spawns = tuple((rng.choice(ids), rng.randint(1, max_delta)) for _ in range(rng.randint(0, 2)))
        table[eid] = EventDef(eid, effects, spawns)
    return table


def random_initial(rng, table, max_delta: int = 10) -> DesState:
    ids = sorted(table)
    sched = {(rng.choice(ids), rng.randint(0, max_delta)) for _ in range(rng.randint(1, len(ids) + 1))}
    return state(0, sched)


def enumerate_candidates(domain):
    ids = sorted(DEFAULT_TABLE)[:2]
    assigns = [FrozenMap(), FrozenMap({"x": 1}), FrozenMap({"x": 1, "y": 1})]
    for t in range(3):
        slots = [(e, te) for e in ids for te in range(t - 1, t + 4)]
        for r in range(len(slots) + 1):
            for sched in itertools.combinations(slots, r):
                for a in assigns:
                    yield DesState(t, frozenset(sched), a)


def sample_states(domain, rng):
    for _ in range(domain.samples):
        s = random_initial(rng, DEFAULT_TABLE, domain.max_delta)
        if rng.random() < 0.2:
            s = DesState(s.t, s.sched | {("e2", rng.randint(0, 2000))}, s.assign)
        for _ in range(rng.randint(1, domain.des_steps)):
            yield s
            s = opt_step(s, DEFAULT_TABLE)[0]


def build_model(mutant: Optional[str] = None, **_):
    from .wfsk import Model

    step = MUTANTS[mutant] if mutant else opt_step
    config = RefinementConfig(
        refmap=identity,
        rank=lambda s: 0,
        skip_bound_fn=lambda s, u: skip_count(s) + 1,
        good_state=DesState.valid,
    )
    return Model(
        name="des" if not mutant else f"des[{mutant}]",
        abstract=abstract_system(DEFAULT_TABLE),
        concrete=optimized_system(DEFAULT_TABLE, step),
        config=config,
        candidates=enumerate_candidates,
        samples=sample_states,
        params={"model": "des", "mutant": mutant},
    )


_EVENT = re.compile(r"^event\s+(\S+?)\s*:(.*)$")
_SPAWN = re.compile(r"^(\S+?)\s*\+\s*(-?\d+)$")


def _parse_clause(clause: str, lineno: int, line: str, effects: list, spawns: list):
    items = [x.strip() for x in clause.split(",")]
    kind = None
    for item in items:
        toks = item.split(None, 1)
        if toks and toks[0] in ("set", "spawn"):
            kind, item = toks[0], (toks[1] if len(toks) > 1 else "")
        if kind == "set":
            parts = item.split()
            if len(parts) != 2:
                raise ParseError(lineno, line, f"expected 'set <var> <int>', got {item!r}")
            effects.append((parts[0], parse_int(parts[1], lineno, line)))
        elif kind == "spawn":
            m = _SPAWN.match(item.strip())
            if not m:
                raise ParseError(lineno, line, f"expected 'spawn <id>+<delta>', got {item!r}")
            delta = int(m.group(2))
            if delta < 1:
                raise ParseError(lineno, line, "spawn delta must be >= 1")
            spawns.append((m.group(1), delta))
        else:
            raise ParseError(lineno, line, f"expected 'set' or 'spawn', got {item!r}")


def parse_events(text: str) -> tuple:
    """Parse an event table with its initial schedule; returns ``(defs, sched)``."""
    defs, sched = {}, set()
    for lineno, line in lines(text):
        m = _EVENT.match(line)
        if m:
            eid, body = m.group(1), m.group(2)
            if eid in defs:
                raise ParseError(lineno, line, f"event {eid} defined twice")
            effects, spawns = [], []
            for clause in body.split(";"):
                if clause.strip():
                    _parse_clause(clause.strip(), lineno, line, effects, spawns)
            defs[eid] = EventDef(eid, tuple(effects), tuple(spawns))
            continue
        toks = line.split()
        if toks[0] == "at" and len(toks) == 3:
            sched.add((toks[2], parse_int(toks[1], lineno, line, natural=True)))
            continue
        raise ParseError(lineno, line, "expected 'event <id>: ...' or 'at <time> <id>'")
    return defs, frozenset(sched)


def format_events(defs, sched) -> str:
    out = []
    for eid in sorted(defs):
        ev = defs[eid]
        clauses = []
        if ev.effects:
            clauses.append("set " + ", ".join(f"{v} {x}" for v, x in ev.effects))
        if ev.spawns:
            clauses.append("spawn " + ", ".join(f"{e}+{d}" for e, d in ev.spawns))
        out.append(f"event {eid}: " + "; ".join(clauses))
    for e, te in sorted(sched, key=lambda p: (p[1], p[0])):
        out.append(f"at {te} {e}")
    return "\n".join(out) + "\n"
