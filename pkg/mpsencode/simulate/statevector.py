"""Dense statevector execution for small registers."""
from __future__ import annotations

import numpy as np

from ..errors import PreconditionError, SizeLimitError
from ..funcspace.grid import MAX_DENSE_QUBITS
from ..circuitgen.circuit import Circuit
from ..circuitgen.gates import Gate

MAX_UNITARY_QUBITS = 12


def apply_gate(psi: np.ndarray, gate: Gate, n_qubits: int) -> np.ndarray:
    """Apply one gate to a (2,)*N tensor; returns a new tensor."""
    mat = gate.matrix()
    if not gate.is_two_qubit:
        (q,) = gate.qubits
        out = np.tensordot(mat, psi, axes=([1], [q]))
        return np.moveaxis(out, 0, q)
    q0, q1 = gate.qubits
    out = np.tensordot(mat.reshape(2, 2, 2, 2), psi, axes=([2, 3], [q0, q1]))
    return np.moveaxis(out, [0, 1], [q0, q1])


def apply_dense(circuit: Circuit, vector: np.ndarray) -> np.ndarray:
    n = circuit.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise SizeLimitError(f"dense simulation limited to {MAX_DENSE_QUBITS} qubits")
    vector = np.asarray(vector)
    if vector.shape != (1 << n,):
        raise PreconditionError(f"state has {vector.shape[0]} amplitudes, circuit acts on {n} qubits")
    psi = vector.astype(np.complex128).reshape((2,) * n)
    for g in circuit.gates:
        psi = apply_gate(psi, g, n)
    return psi.reshape(-1)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full 2^N x 2^N matrix; column j is the image of basis state j."""
    n = circuit.n_qubits
    if n > MAX_UNITARY_QUBITS:
        raise SizeLimitError(f"unitaries limited to {MAX_UNITARY_QUBITS} qubits")
    dim = 1 << n
    psi = np.eye(dim, dtype=np.complex128).reshape((2,) * n + (dim,))
    for g in circuit.gates:
        psi = apply_gate(psi, g, n)
    return psi.reshape(dim, dim)
