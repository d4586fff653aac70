"""
A buffered stack machine, step by step
======================================

The buffered machine holds up to ``k`` fetched instructions before touching
the stack. Watching its trace next to the plain machine shows both
stuttering (the buffer fills, nothing visible happens) and skipping (one
drain step covers several plain steps).
"""

from skipcheck import stack
from skipcheck.models import get_model
from skipcheck.stack import TOP, IState, SState, push
from skipcheck.wfsk import DomainSpec, check_model, check_obligation

prog = (push(1), push(2), TOP, push(3))

# The plain machine executes one instruction per step.
s = SState(prog, 0, ())
for _ in range(len(prog)):
    s = stack.spec_step(s)
    print("STK ", s.pc, s.stk)

# The buffered one, with capacity 2, queues the two pushes and drains on top.
model = get_model("stack", capacity=2)
b = IState(prog, 0, (), ())
for _ in range(len(prog)):
    res = check_obligation(b, model.config, model.abstract, model.concrete)
    print(f"BSTK pc={b.pc} ibuf={[i.to_text() for i in b.ibuf]} stk={b.stk}  -> {res.verdict.value}", res.steps or "")
    b = stack.impl_step(b, k=2)

# Exhaustively, every good state with short programs satisfies the obligation.
report = check_model("stack", DomainSpec(capacity=2, imem_max=3, stack_max=2))
print(f"\n{report.states_checked} good states, {report.total_counterexamples} counterexamples, max skip {report.max_skip}")
