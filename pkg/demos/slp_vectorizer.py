"""
Packing scalar code into two-lane vector instructions
=====================================================

The packer pairs adjacent instructions with the same operation when the
second neither writes nor reads the first one's destination. Each output is
then validated against its source: every vector step has to land where one
or two scalar steps would.
"""

from skipcheck import slp

source = slp.parse_program(
    """
    add a b c
    add d e f
    mul g a d
    sub h g g
    sub a b b
    """
)
packed = slp.vectorize(source)
print(slp.format_program(packed))

# The scalar pc corresponding to each vector pc.
print("pc table:", slp.pc_table(packed))

for pc in range(len(packed)):
    s = slp.VectorState(packed, pc, slp.Store({"b": 2, "c": 3, "e": 4, "f": 5}))
    r = slp.check_formula2(s)
    print(f"vector pc {pc}: {r.verdict.value} over {r.steps} scalar step(s)")

print("validated:", slp.validate(source, packed).ok)

# A pack that ignores the dependence on a is caught.
bad = slp.parse_program("vadd a b c | d a e")
print("dependent pack:", slp.validate(slp.parse_program("add a b c\nadd d a e"), bad).reason)
