"""Scalar and two-lane vector machines, a minimal SLP packer and its validator.

A vector program is checked against the scalar program it came from by
mapping each vector state to the scalar state whose pc counts the scalar
instructions underlying the vector instructions already executed. Every
vector step must then match one or two scalar steps.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass
from typing import Optional, Sequence

from .frozenmap import FrozenMap
from .textfmt import ParseError, lines
from .ts import RefinementConfig, TransitionSystem

SOPS = ("add", "sub", "mul", "and", "or", "nop")
VOPS = tuple("v" + op for op in SOPS)


class Store(FrozenMap):
    def read(self, var) -> int:
        return self._d.get(var, 0)


@dataclass(frozen=True)
class ScalarInst:
    op: str
    z: str
    x: str
    y: str

    def __post_init__(self):
        if self.op not in SOPS:
            raise ValueError(f"unknown scalar op {self.op!r}")

    def to_text(self) -> str:
        return f"{self.op} {self.z} {self.x} {self.y}"

    def __repr__(self):
        return f"<{self.to_text()}>"


@dataclass(frozen=True)
class VectorInst:
    op: str
    lane1: tuple  # (dest, src1, src2)
    lane2: tuple

    def __post_init__(self):
        if self.op not in VOPS:
            raise ValueError(f"unknown vector op {self.op!r}")
        if len(self.lane1) != 3 or len(self.lane2) != 3:
            raise ValueError("each lane is (dest, src1, src2)")
        if self.lane1[0] == self.lane2[0]:
            raise ValueError("vector lanes must write distinct destinations")

    @property
    def scalar_op(self) -> str:
        return self.op[1:]

    def to_text(self) -> str:
        return f"{self.op} {' '.join(self.lane1)} | {' '.join(self.lane2)}"

    def __repr__(self):
        return f"<{self.to_text()}>"


@dataclass(frozen=True)
class ScalarState:
    prog: tuple
    pc: int
    store: Store


@dataclass(frozen=True)
class VectorState:
    prog: tuple
    pc: int
    store: Store


def eval_sop(op: str, vx: int, vy: int) -> int:
    if op == "add":
        return vx + vy
    if op == "sub":
        return vx - vy
    if op == "mul":
        return vx * vy
    if op == "and":
        return vx & vy
    if op == "or":
        return vx | vy
    if op == "nop":
        return vx
    raise ValueError(f"unknown scalar op {op!r}")


def fetch(prog, pc):
    return prog[pc] if 0 <= pc < len(prog) else None


def _exec_scalar(inst: ScalarInst, store: Store) -> Store:
    if inst.op == "nop":
        return store
    return store.update({inst.z: eval_sop(inst.op, store.read(inst.x), store.read(inst.y))})


def spec_step(s: ScalarState) -> ScalarState:
    inst = fetch(s.prog, s.pc)
    store = _exec_scalar(inst, s.store) if isinstance(inst, ScalarInst) else s.store
    return ScalarState(s.prog, s.pc + 1, store)


def vec_step(s: VectorState) -> VectorState:
    inst = fetch(s.prog, s.pc)
    store = s.store
    if isinstance(inst, ScalarInst):
        store = _exec_scalar(inst, store)
    elif isinstance(inst, VectorInst) and inst.op != "vnop":
        op = inst.scalar_op
        (c, a, b), (f, d, e) = inst.lane1, inst.lane2
        # all four sources come from the pre-state
        vc = eval_sop(op, store.read(a), store.read(b))
        vf = eval_sop(op, store.read(d), store.read(e))
        store = store.update({c: vc, f: vf})
    return VectorState(s.prog, s.pc + 1, store)


def num_scalar_inst(inst) -> int:
    if isinstance(inst, VectorInst):
        return 2
    if isinstance(inst, ScalarInst):
        return 1
    return 0


def pcT(pc: int, vprg: Sequence) -> int:
    """Scalar pc corresponding to having executed ``vprg[0..pc]``."""
    if pc < 0:
        return 0
    return sum(num_scalar_inst(inst) for inst in vprg[: pc + 1])


def pc_table(vprg: Sequence) -> tuple:
    """``pcT(pc - 1)`` for every vector pc ``0..len(vprg)``, via a running counter."""
    out = [0]
    for inst in vprg:
        out.append(out[-1] + num_scalar_inst(inst))
    return tuple(out)


def scalarize(inst) -> list:
    if isinstance(inst, VectorInst):
        op = inst.scalar_op
        return [ScalarInst(op, *inst.lane1), ScalarInst(op, *inst.lane2)]
    if isinstance(inst, ScalarInst):
        return [inst]
    return []


def scalarize_vprg(vprg: Sequence) -> tuple:
    return tuple(si for inst in vprg for si in scalarize(inst))


def can_pack(i1: ScalarInst, i2: ScalarInst) -> bool:
    return i1.op == i2.op and i1.op != "nop" and i1.z != i2.z and i1.z not in (i2.x, i2.y)


def vectorize(sprg: Sequence[ScalarInst]) -> tuple:
    """Pack adjacent independent same-op pairs into vector instructions, left to right."""
    out = []
    i = 0
    while i < len(sprg):
        a = sprg[i]
        b = sprg[i + 1] if i + 1 < len(sprg) else None
        if b is not None and can_pack(a, b):
            out.append(VectorInst("v" + a.op, (a.z, a.x, a.y), (b.z, b.x, b.y)))
            i += 2
        else:
            out.append(a)
            i += 1
    return tuple(out)


def ref_map(s: VectorState, table: Optional[tuple] = None) -> ScalarState:
    """Abstract scalar state of a vector state.

    ``table`` is an optional precomputed :func:`pc_table`; it must agree with
    recomputing the scalar pc from scratch.
    """
    if table is not None and 0 <= s.pc < len(table):
        apc = table[s.pc]
        assert apc == pcT(s.pc - 1, s.prog)
    else:
        apc = pcT(s.pc - 1, s.prog)
    return ScalarState(scalarize_vprg(s.prog), apc, s.store)


def at_instruction(s: VectorState) -> bool:
    return 0 <= s.pc < len(s.prog)


CONFIG = RefinementConfig(refmap=ref_map, rank=lambda s: 0, skip_bound=3, good_state=at_instruction)
SCALAR_TS = TransitionSystem.from_step(spec_step, name="scalar")
VECTOR_TS = TransitionSystem.from_step(vec_step, name="vector")


def check_formula2(s: VectorState):
    """The vector step out of ``s`` matches one or two scalar steps of the image."""
    from .wfsk import check_triple

    return check_triple(s, vec_step(s), CONFIG, SCALAR_TS)


@dataclass(frozen=True)
class Validation:
    ok: bool
    reason: str = ""
    step: Optional[int] = None
    store: Optional[Store] = None
    state: Optional[VectorState] = None


def run_to_end(step, state, n: int):
    for _ in range(n):
        state = step(state)
    return state


def variables(prog) -> list:
    names = set()
    for inst in prog:
        if isinstance(inst, ScalarInst):
            names.update((inst.z, inst.x, inst.y))
        elif isinstance(inst, VectorInst):
            names.update(inst.lane1 + inst.lane2)
    return sorted(names)


def validation_stores(names, trials: int = 32, seed: int = 0) -> list:
    import random

    rng = random.Random(seed)
    stores = [Store({v: 2 + 3 * i for i, v in enumerate(names)})]
    for _ in range(trials):
        stores.append(Store({v: rng.randint(-10**6, 10**6) for v in names}))
    return stores


def validate(sprg: Sequence, vprg: Sequence, stores=None) -> Validation:
    """Translation-validate ``vprg`` against ``sprg`` on the given initial stores."""
    sprg, vprg = tuple(sprg), tuple(vprg)
    if scalarize_vprg(vprg) != sprg:
        return Validation(False, "vector program does not scalarize to the source program")
    if stores is None:
        stores = validation_stores(variables(sprg))
    table = pc_table(vprg)
    for store in stores:
        s = VectorState(vprg, 0, store)
        for i in range(len(vprg)):
            res = check_formula2(s)
            if not res.ok:
                return Validation(False, f"step {i} ({vprg[i].to_text()}): {res.verdict.value}", i, store, s)
            s = vec_step(s)
        if ref_map(s, table).pc != len(sprg):
            return Validation(False, "final abstract pc differs from source length", len(vprg), store, s)
        final = run_to_end(spec_step, ScalarState(sprg, 0, store), len(sprg))
        if final.store != s.store:
            return Validation(False, "final stores differ", len(vprg), store, s)
    return Validation(True)


def var_names(n: int) -> list:
    return list(string.ascii_lowercase[:n])


def random_program(rng, n_vars: int = 6, max_len: int = 12) -> tuple:
    names = var_names(n_vars)
    return tuple(
        ScalarInst(rng.choice(SOPS), rng.choice(names), rng.choice(names), rng.choice(names))
        for _ in range(rng.randint(0, max_len))
    )


def enumerate_candidates(domain):
    names = var_names(domain.n_vars)
    insts = [ScalarInst(op, z, x, y) for op in SOPS for z in names for x in names for y in names]
    stores = [Store(zip(names, vals)) for vals in itertools.product(domain.store_values, repeat=len(names))]
    for n in range(domain.prog_len + 1):
        for sprg in itertools.product(insts, repeat=n):
            vprg = vectorize(sprg)
            for pc in range(len(vprg) + 1):
                for store in stores:
                    yield VectorState(vprg, pc, store)


def sample_states(domain, rng):
    names = var_names(domain.n_vars)
    for _ in range(domain.samples):
        vprg = vectorize(random_program(rng, domain.n_vars, domain.prog_len))
        s = VectorState(vprg, 0, Store({v: rng.randint(-50, 50) for v in names if rng.random() < 0.9}))
        for _ in range(len(vprg) + 1):
            yield s
            s = vec_step(s)


def build_model(**_):
    from .wfsk import Model

    return Model(
        name="vec",
        abstract=SCALAR_TS,
        concrete=VECTOR_TS,
        config=CONFIG,
        candidates=enumerate_candidates,
        samples=sample_states,
        params={"model": "vec"},
    )


def _parse_regs(toks, lineno, line, n):
    if len(toks) != n or not all(t.isidentifier() for t in toks):
        raise ParseError(lineno, line, f"expected {n} variable names")
    return tuple(toks)


def parse_program(text: str, allow_vector: bool = True) -> tuple:
    prog = []
    for lineno, line in lines(text):
        op, _, rest = line.partition(" ")
        if op in SOPS:
            prog.append(ScalarInst(op, *_parse_regs(rest.split(), lineno, line, 3)))
        elif op in VOPS and allow_vector:
            left, bar, right = rest.partition("|")
            if not bar:
                raise ParseError(lineno, line, "vector instruction needs two lanes separated by '|'")
            lane1 = _parse_regs(left.split(), lineno, line, 3)
            lane2 = _parse_regs(right.split(), lineno, line, 3)
            try:
                prog.append(VectorInst(op, lane1, lane2))
            except ValueError as e:
                raise ParseError(lineno, line, str(e)) from None
        else:
            kinds = "scalar or vector" if allow_vector else "scalar"
            raise ParseError(lineno, line, f"not a {kinds} instruction")
    return tuple(prog)


def format_program(prog) -> str:
    return "".join(inst.to_text() + "\n" for inst in prog)
