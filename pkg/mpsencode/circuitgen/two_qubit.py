"""Lowering of generic two-qubit unitaries to at most three CNOTs plus rotations.

Works in the magic basis E, where SO(4) maps onto SU(2) x SU(2); the number of
CNOTs is read off the trace and spectrum of gamma(U) = (E^dag U E)(E^dag U E)^T.
"""
from __future__ import annotations

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import NumericalConsistencyError
from .gates import CNOT, SWAP, Gate, GateKind, cnot, equal_up_to_phase, rotation, rx, ry, rz

logger = logging.getLogger(__name__)

E = np.array([[1, 1j, 0, 0], [0, 0, 1j, 1], [0, 0, 1j, -1], [1, -1j, 0, 0]]) / np.sqrt(2)
E_DAG = E.conj().T

CNOT10 = SWAP @ CNOT @ SWAP

# S (x) SX
S_SX = np.array(
    [
        [0.5 + 0.5j, 0.5 - 0.5j, 0, 0],
        [0.5 - 0.5j, 0.5 + 0.5j, 0, 0],
        [0, 0, -0.5 + 0.5j, 0.5 + 0.5j],
        [0, 0, 0.5 + 0.5j, -0.5 + 0.5j],
    ]
)

V_ONE_CNOT = np.array(
    [
        [0.5, 0.5j, 0.5j, -0.5],
        [-0.5j, 0.5, -0.5, -0.5j],
        [-0.5j, -0.5, 0.5, -0.5j],
        [0.5, -0.5j, -0.5j, -0.5],
    ]
)
Q_ONE_CNOT = np.array([[-1, 0, -1, 0], [0, 1, 0, 1], [0, 1, 0, -1], [1, 0, -1, 0]]) / np.sqrt(2)

VERIFY_TOLERANCE = 1e-8


def zyz_angles(u: np.ndarray) -> Tuple[float, float, float]:
    """(phi, theta, lam) with u = e^{i a} RZ(phi) RY(theta) RZ(lam)."""
    u = np.asarray(u, dtype=np.complex128)
    theta = 2.0 * math.atan2(abs(u[1, 0]), abs(u[0, 0]))
    small = 1e-14
    if abs(u[1, 0]) < small:
        return 0.0, 0.0, float(np.angle(u[1, 1]) - np.angle(u[0, 0]))
    if abs(u[0, 0]) < small:
        return float(np.angle(u[1, 0]) - np.angle(-u[0, 1])), theta, 0.0
    phi = float(np.angle(u[1, 0]) - np.angle(u[0, 0]))
    lam = float(np.angle(u[1, 1]) - np.angle(u[1, 0]))
    return phi, theta, lam


def single_qubit_gates(u: np.ndarray, qubit: int) -> List[Gate]:
    """Time-ordered RZ(lam), RY(theta), RZ(phi); negligible rotations dropped."""
    phi, theta, lam = zyz_angles(u)
    out = [
        rotation(GateKind.RZ, qubit, lam),
        rotation(GateKind.RY, qubit, theta),
        rotation(GateKind.RZ, qubit, phi),
    ]
    return [g for g in out if g is not None]


def _to_su4(u: np.ndarray) -> np.ndarray:
    det = np.linalg.det(u)
    return u * np.exp(-1j * np.angle(det) / 4)


def count_cnots(u: np.ndarray) -> int:
    """Minimal CNOT count of a two-qubit unitary (0..3)."""
    u = _to_su4(np.asarray(u, dtype=np.complex128))
    m = E_DAG @ u @ E
    gamma = m @ m.T
    trace = np.trace(gamma)
    if np.isclose(trace, 4, atol=1e-7) or np.isclose(trace, -4, atol=1e-7):
        return 0
    evs = np.sort(np.imag(np.linalg.eigvals(gamma)))
    if np.isclose(trace, 0j, atol=1e-7) and np.allclose(evs, [-1, -1, 1, 1]):
        return 1
    if np.isclose(np.imag(trace), 0.0, atol=1e-7):
        return 2
    return 3


def _su2su2_factors(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """A, B in SU(2) with u = A (x) B."""
    c1, c2, c3, c4 = u[0:2, 0:2], u[0:2, 2:4], u[2:4, 0:2], u[2:4, 2:4]
    a1 = np.sqrt(complex((c1 @ c4.conj().T)[0, 0]))
    a2 = np.sqrt(-complex((c2 @ c3.conj().T)[0, 0]))
    c12 = c1 @ c2.conj().T
    if not np.isclose(a1 * np.conj(a2), c12[0, 0]):
        a2 *= -1
    a = np.array([[a1, a2], [-np.conj(a2), np.conj(a1)]])
    b = c2 / a[0, 1] if np.isclose(a[0, 0], 0.0, atol=1e-6) else c1 / a[0, 0]
    return a, b


def _su2su2_prefactors(u_target: np.ndarray, v: np.ndarray):
    """A, B, C, D with (A (x) B) v (C (x) D) = u_target, both in the same double coset."""
    u = E_DAG @ u_target @ E
    w = E_DAG @ v @ E
    uut = u @ u.T
    wwt = w @ w.T
    _, p = np.linalg.eigh(np.real(uut) + np.imag(uut))
    _, q = np.linalg.eigh(np.real(wwt) + np.imag(wwt))
    p = p @ np.diag([1, 1, 1, np.sign(np.linalg.det(p))])
    q = q @ np.diag([1, 1, 1, np.sign(np.linalg.det(q))])
    g = p.astype(np.complex128) @ q.T
    h = w.conj().T @ g.T @ u
    a, b = _su2su2_factors(E @ g @ E_DAG)
    c, d = _su2su2_factors(E @ h @ E_DAG)
    return a, b, c, d


def _zero_cnots(u, q0, q1) -> List[Gate]:
    a, b = _su2su2_factors(u)
    return single_qubit_gates(a, q0) + single_qubit_gates(b, q1)


def _one_cnot(u, q0, q1) -> List[Gate]:
    swap_u = np.exp(1j * np.pi / 4) * (SWAP @ u)
    m = E_DAG @ swap_u @ E
    _, p = np.linalg.eigh(np.real(m @ m.T))
    p = p @ np.diag([1, 1, 1, np.sign(np.linalg.det(p))])
    g = p @ Q_ONE_CNOT.T
    h = V_ONE_CNOT.conj().T @ g.T @ m
    a, b = _su2su2_factors(E @ g @ E_DAG)
    c, d = _su2su2_factors(E @ h @ E_DAG)
    # the leading SWAP exchanges the roles of A and B
    return (
        single_qubit_gates(c, q0)
        + single_qubit_gates(d, q1)
        + [cnot(q0, q1)]
        + single_qubit_gates(a, q1)
        + single_qubit_gates(b, q0)
    )


def _two_cnots(u, q0, q1) -> List[Gate]:
    m = E_DAG @ u @ E
    evs = np.linalg.eigvals(m @ m.T)
    if np.allclose(np.sort(np.real(evs)), [-1, -1, 1, 1]):
        interior = [cnot(q1, q0), Gate(GateKind.RZ, (q0,), math.pi / 2), Gate(GateKind.RX, (q1,), math.pi / 2), cnot(q1, q0)]
        inner = S_SX
    else:
        x = float(np.angle(evs[0]))
        y = float(np.angle(evs[1]))
        if np.isclose(x, -y):
            y = float(np.angle(evs[2]))
        delta = (x + y) / 2
        phi = (x - y) / 2
        interior = [cnot(q1, q0), Gate(GateKind.RZ, (q0,), delta), Gate(GateKind.RX, (q1,), phi), cnot(q1, q0)]
        eps = np.finfo(np.float64).eps
        inner = np.kron(rz(delta + 5 * eps), rx(phi))
    v = CNOT10 @ inner @ CNOT10
    a, b, c, d = _su2su2_prefactors(u, v)
    return (
        single_qubit_gates(c, q0)
        + single_qubit_gates(d, q1)
        + interior
        + single_qubit_gates(a, q0)
        + single_qubit_gates(b, q1)
    )


def _three_cnots(u, q0, q1) -> List[Gate]:
    swap_u = np.exp(1j * np.pi / 4) * (SWAP @ u)
    m = E_DAG @ swap_u @ E
    evs = np.linalg.eigvals(m @ m.T)
    x, y, z = np.sort(np.angle(evs))[:3]
    alpha = (x + y) / 2
    beta = (x + z) / 2
    delta = (z + y) / 2
    interior = [
        cnot(q1, q0),
        Gate(GateKind.RZ, (q0,), delta),
        Gate(GateKind.RY, (q1,), beta),
        cnot(q0, q1),
        Gate(GateKind.RY, (q1,), alpha),
        cnot(q1, q0),
    ]
    v = np.eye(4, dtype=np.complex128)
    for mat in (CNOT10, np.kron(rz(delta), ry(beta)), CNOT, np.kron(np.eye(2), ry(alpha)), CNOT10, SWAP):
        v = mat @ v
    a, b, c, d = _su2su2_prefactors(swap_u, v)
    return (
        single_qubit_gates(c, q0)
        + single_qubit_gates(d, q1)
        + interior
        + single_qubit_gates(a, q1)
        + single_qubit_gates(b, q0)
    )


_DECOMPOSITIONS = {0: _zero_cnots, 1: _one_cnot, 2: _two_cnots, 3: _three_cnots}


def gates_matrix(gates: Sequence[Gate], q0: int, q1: int) -> np.ndarray:
    """4x4 matrix of a gate list acting on the pair (q0, q1)."""
    out = np.eye(4, dtype=np.complex128)
    for g in gates:
        if g.is_two_qubit:
            mat = g.matrix()
            if g.qubits == (q1, q0):
                mat = SWAP @ mat @ SWAP
        elif g.qubits[0] == q0:
            mat = np.kron(g.matrix(), np.eye(2))
        else:
            mat = np.kron(np.eye(2), g.matrix())
        out = mat @ out
    return out


def lower_two_qubit(u: np.ndarray, qubits: Sequence[int]) -> List[Gate]:
    """Rotations and at most 3 CNOTs implementing u on (qubits[0], qubits[1]) up to global phase."""
    q0, q1 = int(qubits[0]), int(qubits[1])
    u = np.asarray(u, dtype=np.complex128)
    su4 = _to_su4(u)
    n_cnots = count_cnots(su4)
    for attempt in dict.fromkeys((n_cnots, 3)):
        try:
            gates = _DECOMPOSITIONS[attempt](su4, q0, q1)
        except (np.linalg.LinAlgError, ZeroDivisionError, FloatingPointError):
            continue
        if equal_up_to_phase(gates_matrix(gates, q0, q1), u, atol=VERIFY_TOLERANCE):
            return gates
        logger.debug("%d-CNOT lowering failed verification on %s", attempt, (q0, q1))
    raise NumericalConsistencyError(f"could not lower two-qubit unitary on qubits {(q0, q1)}")
