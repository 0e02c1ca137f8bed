"""Bitstring sampling by sequential conditional draws, and histogram exports."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from ..errors import PreconditionError
from ..funcspace.grid import MAX_DENSE_QUBITS, Grid, bitstring
from ..mpscore.mps import Mps
from .state import DenseState, QuantumState


@dataclass(frozen=True)
class Histogram:
    """Sampled shots in draw order; `bits` has shape (shots, N), qubit 0 first."""

    bits: np.ndarray
    support_length: float = 1.0

    @property
    def shots(self) -> int:
        return int(self.bits.shape[0])

    @property
    def n_qubits(self) -> int:
        return int(self.bits.shape[1])

    @property
    def grid(self) -> Grid:
        return Grid(self.n_qubits, self.support_length)

    def counts(self) -> Dict[str, int]:
        counter = Counter(bitstring(row) for row in self.bits)
        return dict(sorted(counter.items()))

    def x_samples(self, n: Optional[int] = None) -> np.ndarray:
        """x values of the first n shots (all shots by default)."""
        bits = self.bits if n is None else self.bits[:n]
        return self.grid.x_of_bits(bits)

    def to_rows(self) -> List[Dict[str, object]]:
        grid = self.grid
        rows = []
        for key, count in self.counts().items():
            bits = np.array([int(c) for c in key], dtype=np.uint8)
            rows.append({"bitstring": key, "x": float(grid.x_of_bits(bits)), "count": count})
        return rows

    def to_json(self, indent: int = 2) -> str:
        payload = {
            "n_qubits": self.n_qubits,
            "support_length": self.support_length,
            "shots": self.shots,
            "counts": self.counts(),
        }
        return json.dumps(payload, indent=indent)


def _uniforms(shots: int, n_qubits: int, seed: int) -> np.ndarray:
    # row i drives shot i
    return np.random.Generator(np.random.Philox(seed)).random((shots, n_qubits))


def _sample_dense(vector: np.ndarray, n: int, u: np.ndarray) -> np.ndarray:
    p = np.abs(vector) ** 2
    p = p / p.sum()
    shots = u.shape[0]
    prefix = np.zeros(shots, dtype=np.int64)
    bits = np.zeros((shots, n), dtype=np.uint8)
    for k in range(n):
        marginal = p.reshape(1 << (k + 1), -1).sum(axis=1)
        p0 = marginal[2 * prefix]
        p1 = marginal[2 * prefix + 1]
        total = p0 + p1
        cond0 = np.where(total > 0, p0 / np.where(total > 0, total, 1.0), 1.0)
        bit = (u[:, k] >= cond0).astype(np.int64)
        bits[:, k] = bit
        prefix = 2 * prefix + bit
    return bits


def _right_environments(m: Mps) -> List[np.ndarray]:
    envs = [np.ones((1, 1), dtype=np.complex128)]
    for t in reversed(m.tensors):
        r = envs[-1]
        envs.append(np.einsum("asb,bc,dsc->ad", t, r, t.conj()))
    return envs[::-1]  # envs[k] covers sites k..N-1


def _sample_mps(m: Mps, u: np.ndarray) -> np.ndarray:
    envs = _right_environments(m)
    shots, n = u.shape
    bits = np.zeros((shots, n), dtype=np.uint8)
    left = np.ones((shots, 1), dtype=np.complex128)
    for k, t in enumerate(m.tensors):
        r = envs[k + 1]
        w0 = left @ t[:, 0, :]
        w1 = left @ t[:, 1, :]
        p0 = np.einsum("ia,ab,ib->i", w0, r, w0.conj()).real
        p1 = np.einsum("ia,ab,ib->i", w1, r, w1.conj()).real
        p0 = np.maximum(p0, 0.0)
        p1 = np.maximum(p1, 0.0)
        total = p0 + p1
        cond0 = np.where(total > 0, p0 / np.where(total > 0, total, 1.0), 1.0)
        bit = u[:, k] >= cond0
        bits[:, k] = bit
        chosen = np.where(bit[:, None], w1, w0)
        weight = np.sqrt(np.where(bit, p1, p0))
        left = chosen / np.where(weight > 0, weight, 1.0)[:, None]
    return bits


def sample(state: QuantumState, shots: int, seed: int = 0, support_length: float = 1.0) -> Histogram:
    """Draw `shots` bitstrings from |amplitude|^2, deterministic in `seed`.

    Each qubit is drawn conditionally on the earlier ones, so dense and MPS
    states that agree give the same shots for the same seed.
    """
    if shots < 1:
        raise PreconditionError("shots must be positive")
    if isinstance(state, np.ndarray):
        state = DenseState(state)
    n = state.n_qubits
    u = _uniforms(shots, n, seed)
    if isinstance(state, DenseState):
        bits = _sample_dense(state.vector, n, u)
    else:
        bits = _sample_mps(state, u)
    return Histogram(bits=bits, support_length=support_length)


def probabilities(state: QuantumState) -> np.ndarray:
    """|amplitude|^2 over the full grid, normalized."""
    if isinstance(state, np.ndarray):
        state = DenseState(state)
    if isinstance(state, Mps):
        if state.n_qubits > MAX_DENSE_QUBITS:
            raise PreconditionError(f"dense probabilities limited to {MAX_DENSE_QUBITS} qubits")
        vector = state.to_vector()
    else:
        vector = state.vector
    p = np.abs(vector) ** 2
    return p / p.sum()


def marginal_probabilities(state: QuantumState, n_lead: int) -> np.ndarray:
    """Distribution of the leading `n_lead` qubits (coarse bins of width L / 2^n_lead)."""
    if isinstance(state, np.ndarray):
        state = DenseState(state)
    n = state.n_qubits
    if not 1 <= n_lead <= min(n, MAX_DENSE_QUBITS):
        raise PreconditionError(f"n_lead must be in 1..{min(n, MAX_DENSE_QUBITS)}")
    if isinstance(state, DenseState):
        p = np.abs(state.vector.reshape(1 << n_lead, -1)) ** 2
        p = p.sum(axis=1)
        return p / p.sum()
    env = _right_environments(state)[n_lead]
    psi = np.ones((1, 1), dtype=np.complex128)
    for t in state.tensors[:n_lead]:
        psi = np.einsum("da,asb->dsb", psi, t).reshape(psi.shape[0] * 2, t.shape[2])
    p = np.einsum("ia,ab,ib->i", psi, env, psi.conj()).real
    p = np.maximum(p, 0.0)
    return p / p.sum()
