"""
Skipping in a discrete-event simulator
======================================

The abstract simulator ticks time forward one unit at a time. The optimized
one jumps to the earliest scheduled event. How many abstract steps one jump
stands for depends on the schedule, so no constant bounds it.
"""

from skipcheck import des

defs, sched = des.parse_events(
    """
    event arrive: set queue 1; spawn depart+4
    event depart: set queue 0
    at 2 arrive
    """
)
report = des.match_skipping_trace(des.DesState(0, sched, des.FrozenMap()), defs, 4)
for step in report.steps:
    print(f"t {step.state.t:>2} -> {step.successor.t:>2}  covers {step.skip_count} abstract steps")
print("matched:", report.ok)

# A single far-away event makes one optimized step stand for 10001 abstract ones.
far = des.state(0, {("arrive", 10_000)})
print("far event skip:", des.match_skipping_trace(far, defs, 1).steps[0].abstract_len)

# Forgetting to remove the executed event is noticed immediately.
bad = des.match_skipping_trace(des.state(0, {("arrive", 2)}), defs, 3, step=des.MUTANTS["forget-remove"])
print(bad.describe_mismatch())
