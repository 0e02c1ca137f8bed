from .commands import (
    CircuitOutcome,
    EncodeOutcome,
    ValidateOutcome,
    analytic_constants,
    build_mps,
    cmd_circuit,
    cmd_encode,
    cmd_validate,
    evaluate_circuit,
    ideal_probabilities,
    load_circuit,
    load_or_build_mps,
)
from .reproduce import cmd_reproduce

__all__ = [
    "CircuitOutcome",
    "EncodeOutcome",
    "ValidateOutcome",
    "analytic_constants",
    "build_mps",
    "cmd_circuit",
    "cmd_encode",
    "cmd_reproduce",
    "cmd_validate",
    "evaluate_circuit",
    "ideal_probabilities",
    "load_circuit",
    "load_or_build_mps",
]
