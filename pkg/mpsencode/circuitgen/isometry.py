"""Gate synthesis for the small isometries that make up a staircase.

Local frame: qubit 0 is the ancilla, qubit 1 the data qubit. Input column i
of a 4-row isometry is the basis state |0>|i>, output rows are indexed
2 * ancilla + data. A 2-row isometry acts on the single qubit 0.
"""
from __future__ import annotations

import logging
import math
from typing import List, Sequence

import numpy as np
import scipy.optimize

from ..errors import NumericalConsistencyError, PreconditionError
from .gates import CNOT, Gate, GateKind, cnot, equal_up_to_phase, rotation, ry, rz
from .two_qubit import gates_matrix, single_qubit_gates

logger = logging.getLogger(__name__)

ISOMETRY_TOLERANCE = 1e-10
FIT_TARGET = 1e-11
FIT_ACCEPT = 1e-9
FIT_STARTS = 32
FIT_SEED = 0x15E7
PRODUCT_TOLERANCE = 1e-12


def _check_isometry(v: np.ndarray) -> None:
    if v.shape not in ((4, 1), (4, 2), (2, 1), (2, 2)):
        raise PreconditionError(f"isometry must be 4x1, 4x2, 2x1 or 2x2, got {v.shape}")
    gram = v.conj().T @ v
    if not np.allclose(gram, np.eye(v.shape[1]), atol=ISOMETRY_TOLERANCE):
        raise PreconditionError("input is not an isometry: V^dagger V != I")


def _state_gates(vec: np.ndarray, qubit: int, real_mode: bool) -> List[Gate]:
    """Rotations taking |0> to vec (up to phase)."""
    if real_mode:
        g = rotation(GateKind.RY, qubit, 2.0 * math.atan2(vec[1].real, vec[0].real))
        return [] if g is None else [g]
    theta = 2.0 * math.atan2(abs(vec[1]), abs(vec[0]))
    phi = float(np.angle(vec[1]) - np.angle(vec[0])) if abs(vec[1]) > 1e-14 and abs(vec[0]) > 1e-14 else 0.0
    out = [rotation(GateKind.RY, qubit, theta), rotation(GateKind.RZ, qubit, phi)]
    return [g for g in out if g is not None]


def _unitary_gates(u: np.ndarray, qubit: int, real_mode: bool) -> List[Gate]:
    """Rotations implementing a 2x2 unitary; real mode needs a proper rotation."""
    if real_mode:
        if np.linalg.det(u.real) < 0:
            raise PreconditionError("real single-qubit map is a reflection; fix the bond gauge first")
        g = rotation(GateKind.RY, qubit, 2.0 * math.atan2(u[1, 0].real, u[0, 0].real))
        return [] if g is None else [g]
    return single_qubit_gates(u, qubit)


def _single_qubit_map(v: np.ndarray, qubit: int, real_mode: bool) -> List[Gate]:
    if v.shape[1] == 1:
        return _state_gates(v[:, 0], qubit, real_mode)
    return _unitary_gates(v, qubit, real_mode)


def _product_split(v: np.ndarray):
    """(alpha, B) with V = alpha (x) B when the ancilla output is input independent, else None."""
    k = v.shape[1]
    w = v.reshape(2, 2 * k)
    u, s, vh = np.linalg.svd(w)
    if s[1] > PRODUCT_TOLERANCE:
        return None
    alpha = u[:, 0]
    b = (s[0] * vh[0]).reshape(2, k)
    return alpha, b


def _schmidt_preparation(v: np.ndarray, real_mode: bool) -> List[Gate]:
    """1-CNOT preparation of a two-qubit state from |00>."""
    u, s, vh = np.linalg.svd(v[:, 0].reshape(2, 2))
    s = s.astype(np.float64)
    w = vh.T
    if real_mode:
        u, w = u.real, w.real
        # both local factors must be proper rotations
        if np.linalg.det(u) < 0:
            u[:, 1] *= -1
            s[1] *= -1
        if np.linalg.det(w) < 0:
            w[:, 1] *= -1
            s[1] *= -1
    gates: List[Gate] = []
    g = rotation(GateKind.RY, 0, 2.0 * math.atan2(s[1], s[0]))
    if g is not None:
        gates.append(g)
    gates.append(cnot(0, 1))
    gates += _unitary_gates(u, 0, real_mode)
    gates += _unitary_gates(w, 1, real_mode)
    return gates


def _zyz(angles: Sequence[float]) -> np.ndarray:
    return rz(angles[2]) @ ry(angles[1]) @ rz(angles[0])


def _ansatz_matrix(params: np.ndarray, real_mode: bool) -> np.ndarray:
    if real_mode:
        pre = np.kron(ry(params[0]), ry(params[1]))
        mid = np.kron(ry(params[2]), ry(params[3]))
        post = np.kron(ry(params[4]), ry(params[5]))
    else:
        pre = np.kron(_zyz(params[0:3]), _zyz(params[3:6]))
        mid = np.kron(ry(params[6]), rz(params[7]))
        post = np.kron(_zyz(params[8:11]), _zyz(params[11:14]))
    return post @ CNOT @ mid @ CNOT @ pre


def _ansatz_gates(params: np.ndarray, real_mode: bool) -> List[Gate]:
    def block(qubit: int, angles: Sequence[float]) -> List[Gate]:
        if real_mode:
            out = [rotation(GateKind.RY, qubit, angles[0])]
        else:
            out = [
                rotation(GateKind.RZ, qubit, angles[0]),
                rotation(GateKind.RY, qubit, angles[1]),
                rotation(GateKind.RZ, qubit, angles[2]),
            ]
        return [g for g in out if g is not None]

    if real_mode:
        pre = block(0, params[0:1]) + block(1, params[1:2])
        mid = [rotation(GateKind.RY, 0, params[2]), rotation(GateKind.RY, 1, params[3])]
        post = block(0, params[4:5]) + block(1, params[5:6])
    else:
        pre = block(0, params[0:3]) + block(1, params[3:6])
        mid = [rotation(GateKind.RY, 0, params[6]), rotation(GateKind.RZ, 1, params[7])]
        post = block(0, params[8:11]) + block(1, params[11:14])
    return pre + [cnot(0, 1)] + [g for g in mid if g is not None] + [cnot(0, 1)] + post


def _fit_two_cnot(v: np.ndarray, real_mode: bool) -> np.ndarray:
    """Least-squares angles of the 2-CNOT ansatz whose leading columns equal V."""
    k = v.shape[1]
    n_params = 6 if real_mode else 15

    def residual(params: np.ndarray) -> np.ndarray:
        cols = _ansatz_matrix(params[:14] if not real_mode else params, real_mode)[:, :k]
        if real_mode:
            return (cols.real - v.real).ravel()
        diff = np.exp(1j * params[14]) * cols - v
        return np.concatenate([diff.real.ravel(), diff.imag.ravel()])

    rng = np.random.Generator(np.random.Philox(FIT_SEED))
    best_x, best_cost = None, math.inf
    for attempt in range(FIT_STARTS):
        x0 = rng.uniform(-math.pi, math.pi, n_params)
        res = scipy.optimize.least_squares(residual, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        cost = float(np.linalg.norm(res.fun))
        if cost < best_cost:
            best_x, best_cost = res.x, cost
        if best_cost <= FIT_TARGET:
            break
    logger.debug("2-CNOT fit residual %.3e after %d starts", best_cost, attempt + 1)
    if best_cost > FIT_ACCEPT:
        raise NumericalConsistencyError(f"2-CNOT isometry fit stalled at residual {best_cost:.3e}")
    return best_x[:14] if not real_mode else best_x


def synthesize_isometry(v: np.ndarray, real_mode: bool = False) -> List[Gate]:
    """Gates G with G (|0>|i>) = V|i> up to a global phase, using at most 2 CNOTs.

    Tried in order: a 0-CNOT product form, the 1-CNOT Schmidt preparation for
    4x1 targets, then a fit of the 2-CNOT sandwich. Real mode emits RY only.
    """
    v = np.asarray(v)
    if real_mode:
        if np.iscomplexobj(v) and not np.allclose(v.imag, 0.0, atol=ISOMETRY_TOLERANCE):
            raise PreconditionError("real_mode needs a real isometry")
        v = v.real.astype(np.float64)
    else:
        v = v.astype(np.complex128)
    _check_isometry(v)
    if v.shape[0] == 2:
        return _single_qubit_map(v, 0, real_mode)

    gates = None
    split = _product_split(v)
    if split is not None:
        alpha, b = split
        if not (real_mode and b.shape[1] == 2 and np.linalg.det(b.real) < 0):
            gates = _state_gates(alpha, 0, real_mode) + _single_qubit_map(b, 1, real_mode)
    if gates is None and v.shape[1] == 1:
        gates = _schmidt_preparation(v, real_mode)
    if gates is None:
        gates = _ansatz_gates(_fit_two_cnot(v, real_mode), real_mode)

    k = v.shape[1]
    if not equal_up_to_phase(gates_matrix(gates, 0, 1)[:, :k], v, atol=FIT_ACCEPT * 10):
        raise NumericalConsistencyError("synthesized isometry failed verification")
    return gates


def place(gates: Sequence[Gate], mapping: Sequence[int]) -> List[Gate]:
    """Relabel local qubits: local q becomes mapping[q]."""
    out = []
    for g in gates:
        qubits = tuple(mapping[q] for q in g.qubits)
        out.append(Gate(g.kind, qubits, g.angle, g.unitary))
    return out
