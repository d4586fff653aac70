"""Memory controller (MEMC) and the write-coalescing OptMEMC.

MEMC executes each request as soon as it is fetched. OptMEMC buffers writes
(capacity ``k``); a read, a refresh, a full buffer or running off the end of
``reqs`` drains the buffer, skipping any write that a later write to the same
address supersedes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import partial
from typing import Optional

from .textfmt import ParseError, lines, parse_int
from .ts import RefinementConfig, TransitionSystem

KINDS = ("write", "read", "refresh")


@dataclass(frozen=True)
class Request:
    kind: str
    addr: Optional[int] = None
    value: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown request {self.kind!r}")
        if self.kind == "refresh":
            if self.addr is not None or self.value is not None:
                raise ValueError("refresh takes no operands")
        elif self.addr is None or self.addr < 0:
            raise ValueError(f"{self.kind} needs a natural address")
        if (self.kind == "write") != (self.value is not None):
            raise ValueError("only write carries a value")

    def to_text(self) -> str:
        if self.kind == "write":
            return f"write {self.addr} {self.value}"
        if self.kind == "read":
            return f"read {self.addr}"
        return "refresh"

    def __repr__(self):
        return f"<{self.to_text()}>"


def write(addr: int, value: int) -> Request:
    return Request("write", addr, value)


def read(addr: int) -> Request:
    return Request("read", addr)


REFRESH = Request("refresh")


@dataclass(frozen=True)
class MState:
    reqs: tuple
    pt: int
    mem: tuple


@dataclass(frozen=True)
class OptMState:
    reqs: tuple
    pt: int
    rbuf: tuple
    mem: tuple


def mrefresh(mem: tuple) -> tuple:
    """Read every location and write it straight back."""
    cells = list(mem)
    for addr in range(len(cells)):
        v = cells[addr]
        cells[addr] = v
    out = tuple(cells)
    assert out == mem
    return out


def exec_request(req: Request, mem: tuple) -> tuple:
    if req.kind == "write":
        if req.addr < len(mem):
            return mem[: req.addr] + (req.value,) + mem[req.addr + 1 :]
        return mem
    if req.kind == "refresh":
        return mrefresh(mem)
    return mem


def mark_redundant(rbuf, adjacent_only: bool = False) -> tuple:
    """Pair every request with a flag telling whether a later write supersedes it."""
    out = []
    for i, req in enumerate(rbuf):
        if req.kind != "write":
            out.append((req, False))
            continue
        later = rbuf[i + 1 : i + 2] if adjacent_only else rbuf[i + 1 :]
        out.append((req, any(r.kind == "write" and r.addr == req.addr for r in later)))
    return tuple(out)


def execute_buffer(rbuf, mem: tuple, honor_flags: bool = True) -> tuple:
    """Execute buffered requests in enqueue order.

    Entries may be plain requests or ``(request, redundant)`` pairs from
    :func:`mark_redundant`.
    """
    for item in rbuf:
        req, flagged = (item, False) if isinstance(item, Request) else item
        if flagged and honor_flags:
            continue
        mem = exec_request(req, mem)
    return mem


def fetch(reqs, pt):
    return reqs[pt] if 0 <= pt < len(reqs) else None


def spec_step(s: MState) -> MState:
    req = fetch(s.reqs, s.pt)
    mem = exec_request(req, s.mem) if req is not None else s.mem
    return MState(s.reqs, s.pt + 1, mem)


def drain(rbuf, mem, adjacent_only: bool = False) -> tuple:
    return execute_buffer(mark_redundant(rbuf, adjacent_only), mem, honor_flags=True)


def impl_step(s: OptMState, k: int = 2, adjacent_only: bool = False) -> OptMState:
    req = fetch(s.reqs, s.pt)
    if req is None:
        return OptMState(s.reqs, s.pt + 1, (), drain(s.rbuf, s.mem, adjacent_only))
    if req.kind != "write":
        mem = exec_request(req, drain(s.rbuf, s.mem, adjacent_only))
        return OptMState(s.reqs, s.pt + 1, (), mem)
    if len(s.rbuf) >= k:
        return OptMState(s.reqs, s.pt + 1, (req,), drain(s.rbuf, s.mem, adjacent_only))
    return OptMState(s.reqs, s.pt + 1, s.rbuf + (req,), s.mem)


def committed_state(s: OptMState) -> OptMState:
    return OptMState(s.reqs, max(0, s.pt - len(s.rbuf)), (), s.mem)


def good_statep(s: OptMState, k: int = 2, step=None) -> bool:
    if s.pt < len(s.rbuf) or len(s.rbuf) > k:
        return False
    step = step or partial(impl_step, k=k)
    t = committed_state(s)
    for _ in range(len(s.rbuf)):
        t = step(t)
    return t == s


def ref_map(s: OptMState) -> MState:
    return MState(s.reqs, max(0, s.pt - len(s.rbuf)), s.mem)


def rank(s: OptMState, k: int = 2) -> int:
    return k - len(s.rbuf)


def _impl_step_keep_oldest(s: OptMState, k: int = 2, adjacent_only: bool = False) -> OptMState:
    # seeded bug: drops the newest of two same-address writes instead of the oldest
    def bad_drain(rbuf, mem):
        marked = mark_redundant(tuple(reversed(rbuf)), adjacent_only)[::-1]
        return execute_buffer(tuple(zip(rbuf, (f for _, f in marked))), mem)

    req = fetch(s.reqs, s.pt)
    if req is not None and req.kind == "write" and len(s.rbuf) < k:
        return OptMState(s.reqs, s.pt + 1, s.rbuf + (req,), s.mem)
    mem = bad_drain(s.rbuf, s.mem)
    if req is None or req.kind != "write":
        return OptMState(s.reqs, s.pt + 1, (), exec_request(req, mem) if req else mem)
    return OptMState(s.reqs, s.pt + 1, (req,), mem)


MUTANTS = {"keep-oldest": _impl_step_keep_oldest}


def request_alphabet(addrs, values) -> list:
    return [write(a, v) for a in addrs for v in values] + [read(a) for a in addrs] + [REFRESH]


def enumerate_candidates(domain, k: int, step):
    alphabet = request_alphabet(domain.addrs, domain.values)
    mems = list(itertools.product(domain.values, repeat=domain.mem_size))
    for n in range(domain.reqs_max + 1):
        for reqs in itertools.product(alphabet, repeat=n):
            for pt in range(n + domain.pc_slack + 1):
                for mem in mems:
                    s = OptMState(reqs, pt, (), mem)
                    yield s
                    for j in range(1, k + 1):
                        s = step(s)
                        if len(s.rbuf) != j:
                            break
                        yield s


def sample_states(domain, rng, k: int, step):
    def rand_req():
        kind = rng.choice(KINDS)
        if kind == "refresh":
            return REFRESH
        addr = rng.randint(0, domain.mem_size)  # one past the end on purpose
        return write(addr, rng.randint(0, 2**16)) if kind == "write" else read(addr)

    for _ in range(domain.samples):
        reqs = tuple(rand_req() for _ in range(rng.randint(0, domain.reqs_max)))
        mem = tuple(rng.randint(0, 2**16) for _ in range(domain.mem_size))
        s = OptMState(reqs, rng.randint(0, len(reqs) + domain.pc_slack), (), mem)
        for _ in range(rng.randint(0, k)):
            s = step(s)
        yield s


def build_model(capacity: int = 2, mutant: Optional[str] = None, adjacent_only: bool = False, **_):
    from .wfsk import Model

    k = capacity
    impl = MUTANTS[mutant] if mutant else impl_step
    step = partial(impl, k=k, adjacent_only=adjacent_only)
    config = RefinementConfig(
        refmap=ref_map,
        rank=partial(rank, k=k),
        skip_bound=k + 2,
        good_state=partial(good_statep, k=k, step=step),
    )
    return Model(
        name="memc" if not mutant else f"memc[{mutant}]",
        abstract=TransitionSystem.from_step(spec_step, name="MEMC"),
        concrete=TransitionSystem.from_step(step, name="OptMEMC"),
        config=config,
        candidates=partial(enumerate_candidates, k=k, step=step),
        samples=lambda domain, rng: sample_states(domain, rng, k, step),
        params={"model": "memc", "capacity": k, "mutant": mutant, "adjacent_only": adjacent_only},
    )


def parse_requests(text: str) -> tuple:
    reqs = []
    for lineno, line in lines(text):
        toks = line.split()
        if toks[0] == "write" and len(toks) == 3:
            reqs.append(write(parse_int(toks[1], lineno, line, natural=True), parse_int(toks[2], lineno, line, natural=True)))
        elif toks[0] == "read" and len(toks) == 2:
            reqs.append(read(parse_int(toks[1], lineno, line, natural=True)))
        elif toks == ["refresh"]:
            reqs.append(REFRESH)
        else:
            raise ParseError(lineno, line, "expected 'write <addr> <val>', 'read <addr>' or 'refresh'")
    return tuple(reqs)


def format_requests(reqs) -> str:
    return "".join(r.to_text() + "\n" for r in reqs)


def parse_memory(spec: str) -> tuple:
    """Parse comma-separated memory contents, e.g. ``"0,5,0"``."""
    spec = spec.strip()
    if not spec:
        return ()
    try:
        mem = tuple(int(x) for x in spec.split(","))
    except ValueError:
        raise ValueError(f"bad memory list {spec!r}") from None
    if any(v < 0 for v in mem):
        raise ValueError("memory values are natural numbers")
    return mem
