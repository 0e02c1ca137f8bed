"""Gate set: RX, RY, RZ, CNOT and unlowered generic two-qubit unitaries (U2Q).

Two-qubit matrices act on the basis index 2 b_{q0} + b_{q1}, so the first
listed qubit is the more significant one. For CNOT the first qubit is the control.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..errors import PreconditionError

UNITARY_TOLERANCE = 1e-10

_TWO_PI = 2.0 * math.pi
_FOUR_PI = 4.0 * math.pi


class GateKind(str, Enum):
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CNOT = "CNOT"
    U2Q = "U2Q"

    @property
    def is_rotation(self) -> bool:
        return self in (GateKind.RX, GateKind.RY, GateKind.RZ)


def wrap_angle(angle: float) -> float:
    """Map a rotation angle into (-2 pi, 2 pi]; rotations are 4 pi periodic."""
    a = math.fmod(float(angle), _FOUR_PI)
    if a <= -_TWO_PI:
        a += _FOUR_PI
    elif a > _TWO_PI:
        a -= _FOUR_PI
    return a


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.float64)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.float64)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.float64)

_ROTATIONS = {GateKind.RX: rx, GateKind.RY: ry, GateKind.RZ: rz}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: Tuple[int, ...]
    angle: Optional[float] = None
    unitary: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if kind.is_rotation:
            if len(qubits) != 1 or self.angle is None:
                raise PreconditionError(f"{kind.value} needs one qubit and an angle")
            object.__setattr__(self, "angle", wrap_angle(self.angle))
            return
        if len(qubits) != 2 or qubits[0] == qubits[1]:
            raise PreconditionError(f"{kind.value} needs two distinct qubits, got {qubits}")
        if kind is GateKind.U2Q:
            u = np.asarray(self.unitary, dtype=np.complex128)
            if u.shape != (4, 4) or not np.allclose(u.conj().T @ u, np.eye(4), atol=UNITARY_TOLERANCE):
                raise PreconditionError("U2Q needs a 4x4 unitary matrix")
            object.__setattr__(self, "unitary", u)

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2

    def matrix(self) -> np.ndarray:
        if self.kind.is_rotation:
            return _ROTATIONS[self.kind](self.angle)
        if self.kind is GateKind.CNOT:
            return CNOT
        return self.unitary

    def inverse(self) -> "Gate":
        if self.kind.is_rotation:
            return Gate(self.kind, self.qubits, -self.angle)
        if self.kind is GateKind.CNOT:
            return self
        return Gate(GateKind.U2Q, self.qubits, unitary=self.unitary.conj().T)

    def shifted(self, offset: int) -> "Gate":
        return Gate(self.kind, tuple(q + offset for q in self.qubits), self.angle, self.unitary)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind.value, "qubits": list(self.qubits)}
        if self.angle is not None:
            out["angle"] = self.angle
        if self.kind is GateKind.U2Q:
            out["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.unitary]
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Gate":
        matrix = data.get("matrix")
        unitary = None
        if matrix is not None:
            unitary = np.array([[complex(re, im) for re, im in row] for row in matrix])
        return cls(GateKind(data["kind"]), tuple(data["qubits"]), data.get("angle"), unitary)


def rotation(kind: GateKind, qubit: int, angle: float, threshold: float = 1e-12) -> Optional[Gate]:
    """A rotation gate, or None when the angle is negligible."""
    if abs(wrap_angle(angle)) < threshold:
        return None
    return Gate(kind, (qubit,), angle)


def cnot(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (control, target))


def embed_two_qubit(matrix: np.ndarray, reverse: bool) -> np.ndarray:
    """Matrix of a gate on (q1, q0) rewritten on (q0, q1)."""
    return SWAP @ matrix @ SWAP if reverse else matrix


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-9) -> bool:
    """True when a = e^{i phi} b for some phase phi."""
    overlap = np.vdot(b, a)
    if abs(overlap) == 0.0:
        return bool(np.allclose(a, b, atol=atol))
    phase = overlap / abs(overlap)
    return bool(np.allclose(a, phase * b, atol=atol))
