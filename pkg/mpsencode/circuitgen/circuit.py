"""Ordered gate lists with layer annotations."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from ..errors import CircuitStateError, PreconditionError
from .gates import Gate, GateKind, rotation


@dataclass(frozen=True)
class LayerInfo:
    """Gates [start, stop) of the circuit form one V-layer grown from bond `origin`."""

    origin: int
    start: int
    stop: int
    skipped_bonds: Tuple[int, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "origin": self.origin,
            "start": self.start,
            "stop": self.stop,
            "skipped_bonds": list(self.skipped_bonds),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LayerInfo":
        return cls(int(data["origin"]), int(data["start"]), int(data["stop"]), tuple(data.get("skipped_bonds", ())))


@dataclass
class Circuit:
    """Gates applied left to right to |0...0>. Qubit 0 is the most significant digit."""

    n_qubits: int
    gates: List[Gate] = field(default_factory=list)
    layers: List[LayerInfo] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise PreconditionError("a circuit needs at least one qubit")
        for g in self.gates:
            self._check(g)

    def __len__(self) -> int:
        return len(self.gates)

    def _check(self, gate: Gate) -> None:
        if any(not 0 <= q < self.n_qubits for q in gate.qubits):
            raise PreconditionError(f"gate {gate.kind.value} on {gate.qubits} outside {self.n_qubits} qubits")

    def append(self, gate: Gate) -> None:
        self._check(gate)
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def add_layer(self, gates: Iterable[Gate], origin: int, skipped_bonds: Iterable[int] = ()) -> LayerInfo:
        start = len(self.gates)
        self.extend(gates)
        info = LayerInfo(origin, start, len(self.gates), tuple(sorted(skipped_bonds)))
        self.layers.append(info)
        return info

    def layer_gates(self, index: int) -> List[Gate]:
        info = self.layers[index]
        return self.gates[info.start : info.stop]

    @property
    def has_unlowered(self) -> bool:
        return any(g.kind is GateKind.U2Q for g in self.gates)

    def inverse(self) -> "Circuit":
        """U^dagger: reversed order, each gate inverted; layer ranges follow."""
        total = len(self.gates)
        gates = [g.inverse() for g in reversed(self.gates)]
        layers = [
            LayerInfo(l.origin, total - l.stop, total - l.start, l.skipped_bonds) for l in reversed(self.layers)
        ]
        return Circuit(self.n_qubits, gates, layers)

    def lowered(self) -> "Circuit":
        """Same circuit with every U2Q replaced by at most 3 CNOTs and rotations."""
        from .two_qubit import lower_two_qubit

        gates: List[Gate] = []
        position = [0] * (len(self.gates) + 1)
        for i, g in enumerate(self.gates):
            position[i] = len(gates)
            if g.kind is GateKind.U2Q:
                gates.extend(lower_two_qubit(g.unitary, g.qubits))
            else:
                gates.append(g)
        position[len(self.gates)] = len(gates)
        layers = [
            LayerInfo(l.origin, position[l.start], position[l.stop], l.skipped_bonds) for l in self.layers
        ]
        return Circuit(self.n_qubits, gates, layers)

    def require_lowered(self) -> None:
        if self.has_unlowered:
            raise CircuitStateError("circuit still contains generic two-qubit gates; call lowered() first")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_qubits": self.n_qubits,
            "gates": [g.to_dict() for g in self.gates],
            "layers": [l.to_dict() for l in self.layers],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Circuit":
        return cls(
            int(data["n_qubits"]),
            [Gate.from_dict(g) for g in data.get("gates", [])],
            [LayerInfo.from_dict(l) for l in data.get("layers", [])],
        )

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


def merge_rotations(gates: Sequence[Gate], threshold: float = 1e-12) -> List[Gate]:
    """Fuse consecutive same-axis rotations on a qubit and drop the ones that cancel."""
    out: List[Optional[Gate]] = []
    last: Dict[int, int] = {}
    for g in gates:
        if g.kind.is_rotation:
            (q,) = g.qubits
            idx = last.get(q)
            prev = out[idx] if idx is not None else None
            if prev is not None and prev.kind is g.kind:
                fused = rotation(g.kind, q, prev.angle + g.angle, threshold)
                out[idx] = fused
                if fused is None:
                    del last[q]
                continue
            last[q] = len(out)
            out.append(g)
            continue
        for q in g.qubits:
            last[q] = len(out)
        out.append(g)
    return [g for g in out if g is not None]
