"""Depth and gate counts on the RX/RY/RZ/CNOT basis."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Dict, Iterable

from .circuit import Circuit
from .gates import Gate, GateKind


@dataclass(frozen=True)
class CircuitMetrics:
    depth: int
    cnot_count: int
    gate_count: int
    two_qubit_depth: int

    def as_dict(self) -> Dict[str, int]:
        return asdict(self)


def _depth(gates: Iterable[Gate], n_qubits: int) -> int:
    frontier = [0] * n_qubits
    for g in gates:
        level = max(frontier[q] for q in g.qubits) + 1
        for q in g.qubits:
            frontier[q] = level
    return max(frontier, default=0)


def two_qubit_depth(c: Circuit) -> int:
    """Depth counting only two-qubit gates."""
    return _depth((g for g in c.gates if g.is_two_qubit), c.n_qubits)


def circuit_metrics(c: Circuit) -> CircuitMetrics:
    """Longest dependency chain over all gates, one-qubit gates included."""
    c.require_lowered()
    return CircuitMetrics(
        depth=_depth(c.gates, c.n_qubits),
        cnot_count=sum(1 for g in c.gates if g.kind is GateKind.CNOT),
        gate_count=len(c.gates),
        two_qubit_depth=two_qubit_depth(c),
    )
