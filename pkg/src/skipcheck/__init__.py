"""Executable skipping-refinement checks for optimized reactive systems."""

from .ts import RefinementConfig, Run, TransitionSystem, disjoint_union, reachable_within, run
from .wfsk import (
    CheckReport,
    Counterexample,
    DomainSpec,
    MalformedStateError,
    Model,
    ObligationResult,
    Verdict,
    check_model,
    check_obligation,
    check_triple,
    check_wfsk1,
    enumerate_good_states,
    iter_results,
)
from .models import get_model

__all__ = [
    "CheckReport",
    "Counterexample",
    "DomainSpec",
    "MalformedStateError",
    "Model",
    "ObligationResult",
    "RefinementConfig",
    "Run",
    "TransitionSystem",
    "Verdict",
    "check_model",
    "check_obligation",
    "check_triple",
    "check_wfsk1",
    "disjoint_union",
    "enumerate_good_states",
    "get_model",
    "iter_results",
    "reachable_within",
    "run",
]
