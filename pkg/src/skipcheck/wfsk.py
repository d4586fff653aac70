"""Local checking of well-founded skipping obligations.

For a related pair ``(s, w)`` with ``w = r(s)`` and a concrete step
``s -> u`` exactly one verdict is produced:

* ``STUTTER_LEFT``  ``r(u) == w`` and ``rank(u) < rank(s)``
* ``MATCH``         ``w`` reaches ``r(u)`` in one abstract step
* ``SKIP``          ``w`` reaches ``r(u)`` in ``m`` steps, ``2 <= m < j``
* ``STUTTER_RIGHT`` some abstract successor ``v`` of ``w`` is related to
  ``s`` and the right-stutter rank decreases
* ``LABEL_MISMATCH`` ``s`` and ``w`` disagree on their observation
* ``VIOLATION``     none of the above

Models are checked over finite enumerated domains or seeded samples.
"""

from __future__ import annotations

import enum
import json
import logging
import os
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, is_dataclass
from typing import Any, Callable, Iterable, Iterator, Optional

from .frozenmap import FrozenMap
from .ts import ABSTRACT, CONCRETE, RefinementConfig, Tagged, TransitionSystem, abstract_runs, find_run, reachable_within

log = logging.getLogger(__name__)


class Verdict(enum.Enum):
    MATCH = "MATCH"
    STUTTER_LEFT = "STUTTER_LEFT"
    STUTTER_RIGHT = "STUTTER_RIGHT"
    SKIP = "SKIP"
    LABEL_MISMATCH = "LABEL_MISMATCH"
    VIOLATION = "VIOLATION"

    @property
    def ok(self) -> bool:
        return self not in (Verdict.VIOLATION, Verdict.LABEL_MISMATCH)


class MalformedStateError(ValueError):
    """Raised when an obligation is requested for a state outside the good-state set."""


@dataclass(frozen=True)
class ObligationResult:
    verdict: Verdict
    steps: Optional[int] = None
    witness: tuple = ()
    ranks: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return self.verdict.ok


def jsonable(obj: Any) -> Any:
    """Convert model states into plain JSON values."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if hasattr(obj, "to_text"):
        return obj.to_text()
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, (FrozenMap, dict)):
        return {str(k): jsonable(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (set, frozenset)):
        return sorted((jsonable(x) for x in obj), key=repr)
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return repr(obj)


@dataclass(frozen=True)
class Counterexample:
    model: str
    state: Any
    successor: Any
    abstract_image: Any
    explored_runs: tuple
    rank_s: Optional[int]
    rank_u: Optional[int]
    obligation: str

    FIELDS = ("model", "state", "successor", "abstract_image", "explored_runs", "rank_s", "rank_u", "obligation")

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "state": jsonable(self.state),
            "successor": jsonable(self.successor),
            "abstract_image": jsonable(self.abstract_image),
            "explored_runs": [[jsonable(x) for x in r] for r in self.explored_runs],
            "rank_s": self.rank_s,
            "rank_u": self.rank_u,
            "obligation": self.obligation,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def replay(self, config: RefinementConfig, abstract: TransitionSystem) -> ObligationResult:
        return check_triple(self.state, self.successor, config, abstract, w=self.abstract_image)


def check_wfsk1(s, w, union: TransitionSystem) -> bool:
    """Label agreement between concrete ``s`` and abstract ``w`` in the disjoint union."""
    return union.label(Tagged(CONCRETE, s)) == union.label(Tagged(ABSTRACT, w))


def check_triple(s, u, config: RefinementConfig, abstract: TransitionSystem, w=None) -> ObligationResult:
    refmap = config.refmap
    image = refmap(s)
    if w is None:
        w = image
    elif abstract.label(w) != abstract.label(image):
        return ObligationResult(Verdict.LABEL_MISMATCH, witness=(w, image))

    ru = refmap(u)
    rank_s, rank_u = config.rank(s), config.rank(u)
    ranks = (rank_s, rank_u)
    if ru == w and rank_u < rank_s:
        return ObligationResult(Verdict.STUTTER_LEFT, witness=(w,), ranks=ranks)

    j = config.bound_for(s, u)
    if j >= 2:
        m = reachable_within(abstract, w, ru, 1, j - 1)
        if m is not None:
            verdict = Verdict.MATCH if m == 1 else Verdict.SKIP
            return ObligationResult(verdict, steps=m, witness=_witness_run(abstract, w, ru, m), ranks=ranks)

    if config.rank_right is not None:
        for v in abstract.next_states(w):
            if v == image and config.rank_right(v, s, u) < config.rank_right(w, s, u):
                return ObligationResult(Verdict.STUTTER_RIGHT, steps=1, witness=(w, v), ranks=ranks)

    return ObligationResult(Verdict.VIOLATION, ranks=ranks)


def _witness_run(abstract: TransitionSystem, w, target, m: int) -> tuple:
    found = find_run(abstract, w, target, m)
    return found.states if found else ()


def check_obligation(s, config: RefinementConfig, abstract: TransitionSystem, concrete: TransitionSystem) -> ObligationResult:
    """Check the skipping obligation for the unique concrete step out of ``s``."""
    if config.good_state is not None and not config.good_state(s):
        raise MalformedStateError(f"not a good state: {s!r}")
    return check_triple(s, concrete.step(s), config, abstract)


@dataclass(frozen=True)
class DomainSpec:
    """Bounds for exhaustive enumeration, or a seed and sample count for random mode.

    Fields not relevant to a model are ignored by it.
    """

    mode: str = "exhaustive"
    capacity: int = 2
    # stack machine
    elems: tuple = (0, 1)
    imem_max: int = 4
    stack_max: int = 3
    pc_slack: int = 1
    # memory controller
    addrs: tuple = (0, 1)
    values: tuple = (0, 1)
    mem_size: int = 2
    reqs_max: int = 4
    # vectorizer
    prog_len: int = 2
    n_vars: int = 2
    store_values: tuple = (-1, 2)
    # discrete-event simulation
    max_events: int = 5
    max_delta: int = 10
    des_steps: int = 50
    # random mode
    seed: Optional[int] = None
    samples: int = 1000

    def __post_init__(self):
        if self.mode not in ("exhaustive", "random"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "random" and self.seed is None:
            raise ValueError("random mode requires a seed")
        if self.capacity < 1:
            raise ValueError("capacity must be positive")


@dataclass(frozen=True)
class Model:
    """A concrete/abstract pair with its refinement configuration and state generators."""

    name: str
    abstract: TransitionSystem
    concrete: TransitionSystem
    config: RefinementConfig
    candidates: Callable[[DomainSpec], Iterable]
    samples: Callable[[DomainSpec, random.Random], Iterable]
    params: dict = field(default_factory=dict)

    def states(self, domain: DomainSpec) -> Iterable:
        if domain.mode == "exhaustive":
            return self.candidates(domain)
        return self.samples(domain, random.Random(domain.seed))


def enumerate_good_states(model, domain: DomainSpec) -> Iterator:
    model = _resolve(model, domain)
    good = model.config.good_state or (lambda s: True)
    return (s for s in model.states(domain) if good(s))


@dataclass
class CheckReport:
    model: str
    mode: str
    states_checked: int = 0
    non_good: int = 0
    histogram: Counter = field(default_factory=Counter)
    max_skip: int = 0
    counterexamples: list = field(default_factory=list)
    total_counterexamples: int = 0
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return self.total_counterexamples == 0

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "mode": self.mode,
            "states_checked": self.states_checked,
            "non_good": self.non_good,
            "histogram": {v.value: self.histogram.get(v.value, 0) for v in Verdict},
            "max_skip": self.max_skip,
            "total_counterexamples": self.total_counterexamples,
            "counterexamples": [c.to_dict() for c in self.counterexamples],
            "passed": self.passed,
            "wall_time": round(self.wall_time, 3),
        }


def _resolve(model, domain: DomainSpec, **params) -> Model:
    if isinstance(model, Model):
        return model
    from .models import get_model

    return get_model(model, capacity=domain.capacity, **params)


def _make_counterexample(model: Model, s, u, res: ObligationResult, config: RefinementConfig) -> Counterexample:
    w = config.refmap(s)
    depth = max(config.bound_for(s, u) - 1, 1)
    runs = tuple(tuple(r) for r in abstract_runs(model.abstract, w, depth))
    rs, ru = res.ranks if res.ranks else (None, None)
    return Counterexample(model.name, s, u, w, runs, rs, ru, res.verdict.value)


def _check_states(model: Model, config: RefinementConfig, states: Iterable) -> list:
    out = []
    good = config.good_state
    for s in states:
        if good is not None and not good(s):
            out.append(None)
            continue
        u = model.concrete.step(s)
        out.append((s, u, check_triple(s, u, config, model.abstract)))
    return out


def iter_results(model, domain: DomainSpec, config: Optional[RefinementConfig] = None) -> Iterator[tuple]:
    """Yield ``(s, u, result)`` for every good state of the domain, in enumeration order."""
    model = _resolve(model, domain)
    cfg = config or model.config
    good = cfg.good_state or (lambda s: True)
    for s in model.states(domain):
        if good(s):
            u = model.concrete.step(s)
            yield s, u, check_triple(s, u, cfg, model.abstract)


def _worker(params: dict, states: list) -> list:
    from .models import get_model

    params = dict(params)
    model = get_model(params.pop("model"), **params)
    return _check_states(model, model.config, states)


def default_workers() -> int:
    cap = os.environ.get("SKIPCHECK_WORKERS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def check_model(
    model,
    domain: DomainSpec,
    config: Optional[RefinementConfig] = None,
    *,
    max_counterexamples: int = 10,
    workers: int = 1,
    mutant: Optional[str] = None,
) -> CheckReport:
    """Check every good state of ``domain`` and collect a report.

    Results are merged in enumeration order, so the report does not depend on
    ``workers``. Only the first ``max_counterexamples`` are kept, but all are
    counted.
    """
    start = time.perf_counter()
    model = _resolve(model, domain, **({"mutant": mutant} if mutant else {}))
    cfg = config or model.config
    report = CheckReport(model=model.name, mode=domain.mode)
    states = list(model.states(domain))

    if workers > 1 and config is None and "model" in model.params and len(states) > 2000:
        chunk = -(-len(states) // (workers * 4))
        parts = [states[i : i + chunk] for i in range(0, len(states), chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = []
            for part in pool.map(_worker, [model.params] * len(parts), parts):
                results.extend(part)
    else:
        results = _check_states(model, cfg, states)

    for item in results:
        if item is None:
            report.non_good += 1
            continue
        s, u, res = item
        report.states_checked += 1
        report.histogram[res.verdict.value] += 1
        if res.steps:
            report.max_skip = max(report.max_skip, res.steps)
        if not res.ok:
            report.total_counterexamples += 1
            if len(report.counterexamples) < max_counterexamples:
                report.counterexamples.append(_make_counterexample(model, s, u, res, cfg))
    report.wall_time = time.perf_counter() - start
    log.info("%s: %d states, %d counterexamples", model.name, report.states_checked, report.total_counterexamples)
    return report
