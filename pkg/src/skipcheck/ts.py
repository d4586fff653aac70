"""Labeled transition systems, runs, bounded reachability and disjoint unions.

States are immutable, hashable values. A system is given by a successor
enumerator (finite, never empty) and a labeling function. Deterministic
systems are usually built from a plain step function with
:meth:`TransitionSystem.from_step`.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterator, Optional, Sequence


def identity(x):
    return x


@dataclass(frozen=True)
class TransitionSystem:
    successors: Callable[[Any], Sequence[Any]]
    label: Callable[[Any], Hashable] = identity
    deterministic: bool = False
    name: str = ""

    @classmethod
    def from_step(cls, step: Callable[[Any], Any], label=identity, name: str = "") -> "TransitionSystem":
        return cls(successors=lambda s: (step(s),), label=label, deterministic=True, name=name)

    def step(self, s):
        """Unique successor of ``s``; only valid for deterministic systems."""
        if not self.deterministic:
            raise ValueError(f"{self.name or 'system'} is not deterministic")
        (u,) = self.successors(s)
        return u

    def next_states(self, s) -> tuple:
        succ = tuple(self.successors(s))
        if not succ:
            raise ValueError(f"left-totality violated: {s!r} has no successor")
        if self.deterministic and len(succ) != 1:
            raise ValueError(f"deterministic system produced {len(succ)} successors for {s!r}")
        return succ


@dataclass(frozen=True)
class Run:
    states: tuple

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def __iter__(self) -> Iterator:
        return iter(self.states)

    @property
    def last(self):
        return self.states[-1]

    @property
    def steps(self) -> int:
        return len(self.states) - 1

    def is_valid(self, system: TransitionSystem) -> bool:
        return all(b in system.next_states(a) for a, b in zip(self.states, self.states[1:]))


def run(system: TransitionSystem, start, n: int) -> Run:
    """The unique ``n``-step run of a deterministic system from ``start``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if not system.deterministic:
        raise ValueError("run() needs a deterministic system; use successors() directly")
    states = [start]
    s = start
    for _ in range(n):
        s = system.step(s)
        states.append(s)
    return Run(tuple(states))


def reachable_within(system: TransitionSystem, src, target, lo: int, hi: int) -> Optional[int]:
    """Least ``m`` in ``[lo, hi]`` such that ``target`` is reachable from ``src`` in exactly ``m`` steps.

    Explores breadth-first over all branches. Each level is de-duplicated on
    structural equality; states are not pruned across levels since the same
    state may be needed again at a larger depth.
    """
    if not 1 <= lo <= hi:
        raise ValueError(f"need 1 <= lo <= hi, got lo={lo}, hi={hi}")
    frontier = {src}
    for m in range(1, hi + 1):
        nxt = set()
        for s in frontier:
            nxt.update(system.next_states(s))
        frontier = nxt
        if m >= lo and target in frontier:
            return m
    return None


def find_run(system: TransitionSystem, src, target, m: int) -> Optional[Run]:
    """One run of exactly ``m`` steps from ``src`` to ``target``, if any."""
    levels = [{src: None}]
    for _ in range(m):
        nxt = {}
        for s in levels[-1]:
            for v in system.next_states(s):
                nxt.setdefault(v, s)
        levels.append(nxt)
    if target not in levels[-1]:
        return None
    path = [target]
    for level in reversed(levels[1:]):
        path.append(level[path[-1]])
    return Run(tuple(reversed(path)))


def abstract_runs(system: TransitionSystem, src, depth: int, limit: int = 64) -> list:
    """All runs of exactly ``depth`` steps from ``src``, at most ``limit`` of them."""
    runs = [(src,)]
    for _ in range(depth):
        grown = []
        for r in runs:
            for v in system.next_states(r[-1]):
                grown.append(r + (v,))
                if len(grown) >= limit:
                    break
            if len(grown) >= limit:
                break
        runs = grown
    return [Run(r) for r in runs]


Tagged = namedtuple("Tagged", "side state")
ABSTRACT = "A"
CONCRETE = "C"


def disjoint_union(abstract: TransitionSystem, concrete: TransitionSystem, refmap: Callable) -> TransitionSystem:
    """Union of both systems over tagged states.

    Steps never leave the side they start on. Abstract states keep their own
    label, concrete states are labeled through the refinement map.
    """

    def successors(t: Tagged):
        side = abstract if t.side == ABSTRACT else concrete
        return tuple(Tagged(t.side, v) for v in side.next_states(t.state))

    def label(t: Tagged):
        if t.side == ABSTRACT:
            return abstract.label(t.state)
        return abstract.label(refmap(t.state))

    return TransitionSystem(
        successors=successors,
        label=label,
        deterministic=abstract.deterministic and concrete.deterministic,
        name=f"{concrete.name}+{abstract.name}",
    )


@dataclass(frozen=True)
class RefinementConfig:
    """Refinement map, rank functions and skip bound for one concrete/abstract pair.

    ``skip_bound`` is the constant ``j``: skipping is searched for among
    abstract runs of length ``1 .. j-1``. Systems whose bound depends on the
    step supply ``skip_bound_fn(s, u)`` instead. ``rank_right`` is the
    three-argument rank used when the abstract side stutters; none of the
    bundled models need it.
    """

    refmap: Callable[[Any], Any]
    rank: Callable[[Any], int]
    skip_bound: Optional[int] = None
    skip_bound_fn: Optional[Callable[[Any, Any], int]] = None
    rank_right: Optional[Callable[[Any, Any, Any], int]] = None
    good_state: Optional[Callable[[Any], bool]] = None

    def __post_init__(self):
        if (self.skip_bound is None) == (self.skip_bound_fn is None):
            raise ValueError("give exactly one of skip_bound or skip_bound_fn")
        if self.skip_bound is not None and self.skip_bound < 2:
            raise ValueError(f"skip bound must be >= 2, got {self.skip_bound}")

    def bound_for(self, s, u) -> int:
        if self.skip_bound is not None:
            return self.skip_bound
        return self.skip_bound_fn(s, u)
