"""OpenQASM 2.0 and JSON exports. Qubit 0 is the most significant grid digit."""
from __future__ import annotations

from typing import Dict, List

from .circuit import Circuit
from .gates import Gate, GateKind

_QASM_NAMES = {GateKind.RX: "rx", GateKind.RY: "ry", GateKind.RZ: "rz"}


def _qasm_line(g: Gate) -> str:
    if g.kind is GateKind.CNOT:
        control, target = g.qubits
        return f"cx q[{control}],q[{target}];"
    return f"{_QASM_NAMES[g.kind]}({g.angle:.17g}) q[{g.qubits[0]}];"


def to_qasm(c: Circuit) -> str:
    """QASM text using rx/ry/rz/cx only; layer boundaries become comments."""
    c.require_lowered()
    starts: Dict[int, List[str]] = {}
    for i, info in enumerate(c.layers):
        skipped = ",".join(str(k) for k in info.skipped_bonds) or "none"
        starts.setdefault(info.start, []).append(
            f"// layer {i + 1}: origin bond {info.origin}, skipped bonds {skipped}"
        )
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.n_qubits}];"]
    for i, g in enumerate(c.gates):
        lines.extend(starts.pop(i, []))
        lines.append(_qasm_line(g))
    for comments in starts.values():
        lines.extend(comments)
    return "\n".join(lines) + "\n"


def to_json(c: Circuit, indent: int = 2) -> str:
    return c.to_json(indent=indent)
