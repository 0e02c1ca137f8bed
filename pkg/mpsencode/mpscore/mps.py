"""Matrix product state container.

Site k holds a tensor of shape (chi_{k-1}, 2, chi_k) with chi_0 = chi_N = 1.
Bond k (1..N-1) sits between sites k-1 and k. `schmidt[k - 1]` is the
spectrum of bond k. A canonical centre c means sites < c are left isometries,
sites > c are right isometries and site c carries the norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..errors import PreconditionError, SizeLimitError
from ..funcspace.grid import MAX_DENSE_QUBITS


@dataclass(frozen=True)
class Mps:
    tensors: tuple
    canonical_center: Optional[int] = None
    schmidt: Optional[tuple] = None
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        tensors = tuple(np.asarray(t) for t in self.tensors)
        if not tensors:
            raise PreconditionError("an MPS needs at least one site")
        if tensors[0].shape[0] != 1 or tensors[-1].shape[2] != 1:
            raise PreconditionError("boundary bond dimensions must be 1")
        for k, t in enumerate(tensors):
            if t.ndim != 3 or t.shape[1] != 2:
                raise PreconditionError(f"site {k} has shape {t.shape}, expected (chi, 2, chi')")
            if k and tensors[k - 1].shape[2] != t.shape[0]:
                raise PreconditionError(
                    f"bond {k} mismatch: {tensors[k - 1].shape[2]} vs {t.shape[0]}"
                )
        object.__setattr__(self, "tensors", tensors)
        if self.schmidt is not None:
            spectra = tuple(np.asarray(s, dtype=np.float64) for s in self.schmidt)
            if len(spectra) != len(tensors) - 1:
                raise PreconditionError("schmidt needs one spectrum per bond")
            object.__setattr__(self, "schmidt", spectra)
        if self.canonical_center is not None and not 0 <= self.canonical_center < len(tensors):
            raise PreconditionError(f"canonical centre {self.canonical_center} outside 0..{len(tensors) - 1}")

    @property
    def n_qubits(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> List[int]:
        """chi_1 .. chi_{N-1}."""
        return [t.shape[2] for t in self.tensors[:-1]]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims, default=1)

    @property
    def is_real(self) -> bool:
        return all(not np.iscomplexobj(t) for t in self.tensors)

    @property
    def dtype(self):
        return np.result_type(*self.tensors)

    def with_tensors(self, tensors: Sequence[np.ndarray], **changes) -> "Mps":
        changes.setdefault("canonical_center", None)
        changes.setdefault("schmidt", None)
        changes.setdefault("metadata", {})
        return replace(self, tensors=tuple(tensors), **changes)

    def amplitude(self, bits: Sequence[int]):
        """Exact amplitude of one bitstring by an O(N chi^2) transfer product."""
        bits = np.asarray(bits, dtype=np.intp)
        if bits.shape != (self.n_qubits,):
            raise PreconditionError(f"expected {self.n_qubits} bits, got shape {bits.shape}")
        vec = np.ones(1, dtype=self.dtype)
        for t, b in zip(self.tensors, bits):
            vec = vec @ t[:, b, :]
        return vec[0]

    def amplitudes(self, bits_batch) -> np.ndarray:
        """Amplitudes of a batch of bitstrings, shape (S, N) -> (S,)."""
        bits_batch = np.asarray(bits_batch, dtype=np.intp)
        if bits_batch.ndim != 2 or bits_batch.shape[1] != self.n_qubits:
            raise PreconditionError(f"expected (S, {self.n_qubits}) bits, got {bits_batch.shape}")
        vec = np.ones((bits_batch.shape[0], 1), dtype=self.dtype)
        for k, t in enumerate(self.tensors):
            picked = t[:, bits_batch[:, k], :]  # (chi_l, S, chi_r)
            vec = np.einsum("sa,asb->sb", vec, picked)
        return vec[:, 0]

    def to_vector(self) -> np.ndarray:
        """Dense 2^N amplitude vector, big-endian."""
        if self.n_qubits > MAX_DENSE_QUBITS:
            raise SizeLimitError(f"dense contraction limited to {MAX_DENSE_QUBITS} qubits")
        psi = np.ones((1, 1), dtype=self.dtype)
        for t in self.tensors:
            psi = np.einsum("da,asb->dsb", psi, t).reshape(psi.shape[0] * 2, t.shape[2])
        return psi[:, 0]

    def norm(self) -> float:
        env = np.ones((1, 1), dtype=self.dtype)
        for t in self.tensors:
            env = np.einsum("ab,asc,bsd->cd", env, t.conj(), t)
        return float(np.sqrt(abs(env[0, 0])))

    def normalized(self) -> "Mps":
        n = self.norm()
        if n == 0.0:
            raise PreconditionError("cannot normalize a zero MPS")
        site = self.canonical_center if self.canonical_center is not None else self.n_qubits - 1
        tensors = list(self.tensors)
        tensors[site] = tensors[site] / n
        return replace(self, tensors=tuple(tensors))


def product_state(bits: Sequence[int], dtype=np.float64) -> Mps:
    """Computational basis state as a bond-dimension-1 MPS."""
    tensors = []
    for b in bits:
        t = np.zeros((1, 2, 1), dtype=dtype)
        t[0, int(b), 0] = 1.0
        tensors.append(t)
    n = len(tensors)
    return Mps(tuple(tensors), canonical_center=0, schmidt=tuple(np.ones(1) for _ in range(n - 1)))


def zero_state(n_qubits: int, dtype=np.float64) -> Mps:
    return product_state([0] * n_qubits, dtype=dtype)
