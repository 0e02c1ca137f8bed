"""One V-layer: a central u_Lambda gate with isometry staircases running outward.

The layer prepares a bond-dimension-2 MPS exactly from |0...0>. Bond k sits
between qubits k-1 and k, so the central gate of origin k acts on (k-1, k),
the left staircase descends to qubit 0 and the right one climbs to qubit N-1.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import PreconditionError
from ..mpscore.decompose import split_at_bond
from ..mpscore.mps import Mps
from .circuit import Circuit
from .gates import Gate
from .isometry import place, synthesize_isometry
from .u_lambda import synthesize_u_lambda

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VLayer:
    origin: int
    n_qubits: int
    u_gates: Tuple[Gate, ...]
    left: Tuple[Gate, ...]
    right: Tuple[Gate, ...]
    schmidt: np.ndarray  # central spectrum after gauge fixing, sign of Lambda_2 may be flipped
    skipped_bonds: Tuple[int, ...] = ()
    real_mode: bool = False

    @property
    def staircase(self) -> List[Gate]:
        return list(self.left) + list(self.right)

    @property
    def gates(self) -> List[Gate]:
        """Time order: u_Lambda first, then both staircases."""
        return list(self.u_gates) + self.staircase

    def with_u(self, u_gates: Sequence[Gate]) -> "VLayer":
        return replace(self, u_gates=tuple(u_gates))

    def circuit(self) -> Circuit:
        c = Circuit(self.n_qubits)
        c.add_layer(self.gates, self.origin, self.skipped_bonds)
        return c


def _fix_real_gauge(left: List[np.ndarray], schmidt: np.ndarray, right: List[np.ndarray]) -> None:
    """Flip bond signs in place so every real 2x2 single-qubit map has det +1."""
    c = len(left)
    for j, t in enumerate(left):
        if t.shape[0] == 1 and t.shape[2] == 2 and np.linalg.det(t[0]) < 0:
            t[:, :, 1] *= -1
            if j + 1 < c:
                left[j + 1][1] *= -1
            else:
                schmidt[1] *= -1
    for i, t in enumerate(right):
        if t.shape[2] == 1 and t.shape[0] == 2 and np.linalg.det(t[:, :, 0]) < 0:
            t[1] *= -1
            if i > 0:
                right[i - 1][:, :, 1] *= -1
            else:
                schmidt[1] *= -1


def _left_site_gates(t: np.ndarray, j: int, real_mode: bool) -> List[Gate]:
    chi_l, _, chi_r = t.shape
    if chi_l == 1:
        return place(synthesize_isometry(t[0], real_mode), [j])
    # rows (a, sigma) with the bond index a parked on qubit j-1
    return place(synthesize_isometry(t.reshape(4, chi_r), real_mode), [j - 1, j])


def _right_site_gates(t: np.ndarray, j: int, real_mode: bool) -> List[Gate]:
    chi_l, _, chi_r = t.shape
    if chi_r == 1:
        return place(synthesize_isometry(t[:, :, 0].T, real_mode), [j])
    # rows (b, sigma) with the bond index b parked on qubit j+1
    v = np.transpose(t, (2, 1, 0)).reshape(4, chi_l)
    return place(synthesize_isometry(v, real_mode), [j + 1, j])


def _single_site_layer(m2: Mps, real_mode: bool) -> VLayer:
    v = m2.to_vector()
    v = (v / np.linalg.norm(v)).reshape(2, 1)
    gates = place(synthesize_isometry(v, real_mode), [0])
    return VLayer(0, 1, (), tuple(gates), (), np.ones(1), (), real_mode)


def exact_layer_from_chi2(
    m2: Mps,
    origin: int,
    u_params: Optional[Sequence[float]] = None,
    real_mode: Optional[bool] = None,
) -> VLayer:
    """Layer that maps |0...0> onto m2 (exactly when u_params is None).

    m2 must have every bond dimension at most 2. Bonds of dimension 1 become
    single-qubit gates and are reported in `skipped_bonds`. `u_params`
    replaces the first-layer central gate by the variational ansatz.
    """
    if m2.max_bond > 2:
        raise PreconditionError(f"V-layer needs bond dimension <= 2, got {m2.max_bond}")
    if real_mode is None:
        real_mode = m2.is_real
    n = m2.n_qubits
    if n == 1:
        return _single_site_layer(m2, real_mode)
    if not 1 <= origin <= n - 1:
        raise PreconditionError(f"origin {origin} outside bonds 1..{n - 1}")

    split = split_at_bond(m2, origin)
    dtype = np.float64 if real_mode else np.complex128
    left = [np.array(t, dtype=dtype) for t in split.left]
    right = [np.array(t, dtype=dtype) for t in split.right]
    schmidt = np.array(split.schmidt, dtype=np.float64)
    if real_mode:
        _fix_real_gauge(left, schmidt, right)

    u_gates = synthesize_u_lambda(schmidt, origin - 1, origin, u_params, real_mode)
    left_gates: List[Gate] = []
    for j in range(origin - 1, -1, -1):
        left_gates += _left_site_gates(left[j], j, real_mode)
    right_gates: List[Gate] = []
    for i, t in enumerate(right):
        right_gates += _right_site_gates(t, origin + i, real_mode)

    skipped = tuple(k for k, chi in enumerate(m2.bond_dims, start=1) if chi == 1)
    logger.debug(
        "V-layer at origin %d: %d gates, %d bonds skipped",
        origin,
        len(u_gates) + len(left_gates) + len(right_gates),
        len(skipped),
        extra={"origin": origin, "n_qubits": n},
    )
    return VLayer(origin, n, tuple(u_gates), tuple(left_gates), tuple(right_gates), schmidt, skipped, real_mode)
