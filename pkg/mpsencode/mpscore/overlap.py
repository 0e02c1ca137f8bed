"""Overlaps and fidelities by left-to-right transfer-matrix contraction, O(N chi^3)."""
from __future__ import annotations

import numpy as np

from ..errors import LengthMismatchError
from .mps import Mps


def inner(a: Mps, b: Mps) -> complex:
    """<a|b>."""
    if a.n_qubits != b.n_qubits:
        raise LengthMismatchError(f"MPS lengths differ: {a.n_qubits} vs {b.n_qubits}")
    env = np.ones((1, 1), dtype=np.result_type(a.dtype, b.dtype, np.complex128))
    for ta, tb in zip(a.tensors, b.tensors):
        env = np.einsum("ab,asc->bsc", env, ta.conj())
        env = np.einsum("bsc,bsd->cd", env, tb)
    return complex(env[0, 0])


def fidelity(a: Mps, b: Mps) -> float:
    """|<a|b>|^2 for the normalized states, clipped to [0, 1]."""
    value = abs(inner(a, b)) ** 2 / (abs(inner(a, a)) * abs(inner(b, b)))
    return float(min(1.0, max(0.0, value)))


def dense_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise LengthMismatchError(f"vector shapes differ: {u.shape} vs {v.shape}")
    value = abs(np.vdot(u, v)) ** 2 / (np.vdot(u, u).real * np.vdot(v, v).real)
    return float(min(1.0, max(0.0, value)))
