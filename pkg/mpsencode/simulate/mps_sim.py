"""Gate-by-gate MPS evolution with bond truncation."""
from __future__ import annotations

import logging
from typing import List

import numpy as np
import scipy.linalg

from ..circuitgen.gates import SWAP, Gate
from ..errors import CircuitStateError, PreconditionError
from ..mpscore.decompose import SCHMIDT_CUTOFF, canonicalize, svd
from ..mpscore.mps import Mps

logger = logging.getLogger(__name__)

DEFAULT_CHI_SIM = 64


class MpsSimulator:
    """Single-owner evolving MPS. The orthogonality centre follows the last two-qubit gate."""

    def __init__(self, state: Mps, chi_sim: int = DEFAULT_CHI_SIM):
        if chi_sim < 1:
            raise PreconditionError("chi_sim must be positive")
        if state.canonical_center is None:
            state = canonicalize(state, 0)
        self.chi_sim = int(chi_sim)
        self.n_qubits = state.n_qubits
        self.tensors: List[np.ndarray] = [t.astype(np.complex128) for t in state.tensors]
        self.center = state.canonical_center
        self.discarded_weight = 0.0

    def _move_to(self, site: int) -> None:
        while self.center < site:
            k = self.center
            t = self.tensors[k]
            chi_l, _, chi_r = t.shape
            q, r = scipy.linalg.qr(t.reshape(chi_l * 2, chi_r), mode="economic")
            self.tensors[k] = q.reshape(chi_l, 2, q.shape[1])
            self.tensors[k + 1] = np.einsum("ab,bsc->asc", r, self.tensors[k + 1])
            self.center += 1
        while self.center > site:
            k = self.center
            t = self.tensors[k]
            chi_l, _, chi_r = t.shape
            q, r = scipy.linalg.qr(t.reshape(chi_l, 2 * chi_r).T, mode="economic")
            self.tensors[k] = q.T.reshape(q.shape[1], 2, chi_r)
            self.tensors[k - 1] = np.einsum("asb,bc->asc", self.tensors[k - 1], r.T)
            self.center -= 1

    def apply(self, gate: Gate) -> None:
        if not gate.is_two_qubit:
            (q,) = gate.qubits
            self.tensors[q] = np.einsum("ts,asb->atb", gate.matrix(), self.tensors[q])
            return
        q0, q1 = gate.qubits
        if abs(q0 - q1) != 1:
            raise CircuitStateError(f"MPS simulation needs adjacent qubits, got {gate.qubits}")
        mat = gate.matrix()
        left = min(q0, q1)
        if q0 > q1:
            mat = SWAP @ mat @ SWAP
        self._apply_pair(left, mat)

    def _apply_pair(self, k: int, mat: np.ndarray) -> None:
        self._move_to(k)
        a, b = self.tensors[k], self.tensors[k + 1]
        theta = np.einsum("asb,btc->astc", a, b)
        theta = np.einsum("xyst,astc->axyc", mat.reshape(2, 2, 2, 2), theta)
        chi_l, chi_r = a.shape[0], b.shape[2]
        u, s, vh = svd(theta.reshape(chi_l * 2, 2 * chi_r))
        total = float(np.sum(s**2))
        keep = max(1, min(self.chi_sim, int(np.count_nonzero(s > SCHMIDT_CUTOFF * max(s[0], 1e-300)))))
        if total > 0:
            self.discarded_weight += float(np.sum(s[keep:] ** 2)) / total
        kept = s[:keep] / np.linalg.norm(s[:keep])
        self.tensors[k] = u[:, :keep].reshape(chi_l, 2, keep)
        self.tensors[k + 1] = (kept[:, None] * vh[:keep]).reshape(keep, 2, chi_r)
        self.center = k + 1

    def state(self) -> Mps:
        tensors = self.tensors
        if all(np.allclose(t.imag, 0.0, atol=1e-14) for t in tensors):
            tensors = [t.real.copy() for t in tensors]
        return Mps(tuple(tensors), canonical_center=self.center)
