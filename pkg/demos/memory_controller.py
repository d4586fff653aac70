"""
Write coalescing in a memory controller
=======================================

Writes are buffered; a read, a refresh or a full buffer drains them, and any
write overwritten later in the same buffer is dropped on the way.
"""

from skipcheck import memctl
from skipcheck.memctl import REFRESH, OptMState, read, write
from skipcheck.wfsk import DomainSpec, check_model

reqs = (write(0, 5), write(0, 6), read(0), write(1, 7), REFRESH)

s = OptMState(reqs, 0, (), (0, 0))
for _ in range(len(reqs)):
    s = memctl.impl_step(s, k=2)
    print(f"pt={s.pt} rbuf={[r.to_text() for r in s.rbuf]} mem={s.mem}")

# Which writes are redundant?
for req, dropped in memctl.mark_redundant((write(0, 5), write(1, 1), write(0, 6))):
    print(f"{req.to_text():<12} {'dropped' if dropped else 'kept'}")

# Refreshing memory never changes its contents.
print("refresh identity:", memctl.mrefresh((3, 1, 4, 1, 5)) == (3, 1, 4, 1, 5))

report = check_model("memc", DomainSpec(capacity=2, reqs_max=3))
print(f"{report.states_checked} good states, {report.total_counterexamples} counterexamples")
