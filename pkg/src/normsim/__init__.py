"""Explicit-state checking of normed simulations, history and prophecy relations."""
from .lts import TAU, Action, Automaton, ExecutionFragment, Relation, after, past, trace_of
from .oracle import trace_equivalence, trace_inclusion
from .simulation import (
    Backward, CheckReport, Forward, History, NormTable, Prophecy, Refinement,
    check_certificate, check_normed_backward, check_normed_forward, check_step_refinement,
    find_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "TAU", "Action", "Automaton", "ExecutionFragment", "Relation", "after", "past", "trace_of",
    "trace_equivalence", "trace_inclusion", "Backward", "CheckReport", "Forward", "History",
    "NormTable", "Prophecy", "Refinement", "check_certificate", "check_normed_backward",
    "check_normed_forward", "check_step_refinement", "find_certificate",
]
