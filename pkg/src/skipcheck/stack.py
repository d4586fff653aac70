"""Stack machine (STK) and its buffered implementation (BSTK).

STK fetches ``imem[pc]``, executes it on the stack and increments ``pc``.
BSTK queues fetched instructions in a buffer of capacity ``k`` and only
touches the stack when the buffer is full, a ``top`` is fetched, or the
fetch falls outside ``imem``; then it executes every buffered instruction
in enqueue order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import partial
from typing import Any, Optional

from .textfmt import ParseError, lines, parse_int
from .ts import RefinementConfig, TransitionSystem

OPS = ("push", "pop", "top", "nop")


@dataclass(frozen=True)
class Instruction:
    op: str
    arg: Any = None

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown stack op {self.op!r}")
        if (self.op == "push") != (self.arg is not None):
            raise ValueError("push takes exactly one operand, other ops none")

    def to_text(self) -> str:
        return f"push {self.arg}" if self.op == "push" else self.op

    def __repr__(self):
        return f"<{self.to_text()}>"


def push(v) -> Instruction:
    return Instruction("push", v)


POP = Instruction("pop")
TOP = Instruction("top")
NOP = Instruction("nop")


@dataclass(frozen=True)
class SState:
    imem: tuple
    pc: int
    stk: tuple


@dataclass(frozen=True)
class IState:
    imem: tuple
    pc: int
    stk: tuple
    ibuf: tuple = ()


def instp(x) -> bool:
    return isinstance(x, Instruction)


def fetch(imem, pc):
    return imem[pc] if 0 <= pc < len(imem) else None


def stk_step_inst(inst: Instruction, stk: tuple, cap: Optional[int] = None) -> tuple:
    """Effect of one instruction on the stack (head of the tuple is the top).

    With ``cap`` set, a push onto a full stack is a no-op.
    """
    if inst.op == "push":
        if cap is not None and len(stk) >= cap:
            return stk
        return (inst.arg,) + stk
    if inst.op == "pop":
        return stk[1:]
    return stk


def spec_step(s: SState, cap: Optional[int] = None) -> SState:
    inst = fetch(s.imem, s.pc)
    stk = stk_step_inst(inst, s.stk, cap) if instp(inst) else s.stk
    return SState(s.imem, s.pc + 1, stk)


def stutterp(inst: Instruction, ibuf: tuple, k: int = 2) -> bool:
    return len(ibuf) < k and inst.op != "top"


def execute_all(ibuf, stk: tuple, cap: Optional[int] = None) -> tuple:
    for inst in ibuf:
        stk = stk_step_inst(inst, stk, cap)
    return stk


def impl_step(s: IState, k: int = 2, cap: Optional[int] = None) -> IState:
    inst = fetch(s.imem, s.pc)
    if not instp(inst):
        return IState(s.imem, s.pc + 1, execute_all(s.ibuf, s.stk, cap), ())
    if stutterp(inst, s.ibuf, k):
        return IState(s.imem, s.pc + 1, s.stk, s.ibuf + (inst,))
    stk = execute_all(s.ibuf, s.stk, cap)
    if inst.op == "top":
        return IState(s.imem, s.pc + 1, stk_step_inst(inst, stk, cap), ())
    return IState(s.imem, s.pc + 1, stk, (inst,))


def committed_state(s: IState) -> IState:
    return IState(s.imem, max(0, s.pc - len(s.ibuf)), s.stk, ())


def good_statep(s: IState, k: int = 2, cap: Optional[int] = None, step=None) -> bool:
    """``s`` is reached from its committed state in exactly ``|ibuf|`` steps."""
    if s.pc < len(s.ibuf) or len(s.ibuf) > k:
        return False
    step = step or partial(impl_step, k=k, cap=cap)
    t = committed_state(s)
    for _ in range(len(s.ibuf)):
        t = step(t)
    return t == s


def ref_map(s: IState) -> SState:
    return SState(s.imem, max(0, s.pc - len(s.ibuf)), s.stk)


def rank(s: IState, k: int = 2) -> int:
    return k - len(s.ibuf)


# Seeded bugs, used to show the checker is sensitive to real mistakes.


def _impl_step_no_drain(s: IState, k: int = 2, cap=None) -> IState:
    inst = fetch(s.imem, s.pc)
    if instp(inst) and inst.op == "top":
        return IState(s.imem, s.pc + 1, s.stk, s.ibuf)
    return impl_step(s, k, cap)


def _impl_step_drop_oldest(s: IState, k: int = 2, cap=None) -> IState:
    inst = fetch(s.imem, s.pc)
    if instp(inst) and inst.op != "top" and len(s.ibuf) >= k:
        return IState(s.imem, s.pc + 1, execute_all(s.ibuf[1:], s.stk, cap), (inst,))
    return impl_step(s, k, cap)


def _ref_map_off_by_one(s: IState) -> SState:
    return SState(s.imem, max(0, s.pc - len(s.ibuf) + 1), s.stk)


MUTANTS = {
    "no-drain": (_impl_step_no_drain, ref_map),
    "drop-oldest": (_impl_step_drop_oldest, ref_map),
    "rpc-off-by-one": (impl_step, _ref_map_off_by_one),
}


def instruction_alphabet(elems) -> list:
    return [push(e) for e in elems] + [POP, TOP, NOP]


def _committed(imem, domain, stacks):
    for pc in range(len(imem) + domain.pc_slack + 1):
        for stk in stacks:
            yield IState(imem, pc, stk, ())


def _expand(c: IState, k: int, step):
    # committed state plus the states it reaches while only buffering
    yield c
    s = c
    for n in range(1, k + 1):
        s = step(s)
        if len(s.ibuf) != n:
            return
        yield s


def enumerate_candidates(domain, k: int, step):
    insts = instruction_alphabet(domain.elems)
    stacks = [stk for d in range(domain.stack_max + 1) for stk in itertools.product(domain.elems, repeat=d)]
    for n in range(domain.imem_max + 1):
        for imem in itertools.product(insts, repeat=n):
            for c in _committed(imem, domain, stacks):
                yield from _expand(c, k, step)


def sample_states(domain, rng, k: int, step):
    def rand_inst():
        op = rng.choice(OPS)
        return push(rng.randint(-10**6, 10**6)) if op == "push" else Instruction(op)

    for _ in range(domain.samples):
        imem = tuple(rand_inst() for _ in range(rng.randint(0, domain.imem_max)))
        stk = tuple(rng.randint(-10**6, 10**6) for _ in range(rng.randint(0, domain.stack_max)))
        s = IState(imem, rng.randint(0, len(imem) + domain.pc_slack), stk, ())
        for _ in range(rng.randint(0, k)):
            s = step(s)
        yield s


def build_model(capacity: int = 2, mutant: Optional[str] = None, stack_cap: Optional[int] = None, **_):
    from .wfsk import Model

    k = capacity
    impl, refmap = MUTANTS[mutant] if mutant else (impl_step, ref_map)
    step = partial(impl, k=k, cap=stack_cap)
    config = RefinementConfig(
        refmap=refmap,
        rank=partial(rank, k=k),
        skip_bound=k + 2,
        good_state=partial(good_statep, k=k, step=step),
    )
    return Model(
        name="stack" if not mutant else f"stack[{mutant}]",
        abstract=TransitionSystem.from_step(partial(spec_step, cap=stack_cap), name="STK"),
        concrete=TransitionSystem.from_step(step, name="BSTK"),
        config=config,
        candidates=partial(enumerate_candidates, k=k, step=step),
        samples=lambda domain, rng: sample_states(domain, rng, k, step),
        params={"model": "stack", "capacity": k, "mutant": mutant, "stack_cap": stack_cap},
    )


def parse_program(text: str) -> tuple:
    prog = []
    for lineno, line in lines(text):
        toks = line.split()
        op = toks[0]
        if op == "push" and len(toks) == 2:
            prog.append(push(parse_int(toks[1], lineno, line)))
        elif op in ("pop", "top", "nop") and len(toks) == 1:
            prog.append(Instruction(op))
        else:
            raise ParseError(lineno, line, "expected 'push <int>', 'pop', 'top' or 'nop'")
    return tuple(prog)


def format_program(prog) -> str:
    return "".join(inst.to_text() + "\n" for inst in prog)
