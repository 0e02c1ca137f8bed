"""Binary grid on [0, L): qubit i carries the i-th dyadic digit of x."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError, SizeLimitError

MAX_QUBITS = 64
MAX_DENSE_QUBITS = 28


@dataclass(frozen=True)
class Grid:
    """N-bit grid with step L/2^N; index bits are big-endian (qubit 0 = largest scale)."""

    n_qubits: int
    support_length: float

    def __post_init__(self) -> None:
        if not 1 <= int(self.n_qubits) <= MAX_QUBITS:
            raise PreconditionError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        if not np.isfinite(self.support_length) or self.support_length <= 0:
            raise PreconditionError(f"support_length must be positive, got {self.support_length}")

    @property
    def step(self) -> float:
        return self.support_length / 2.0**self.n_qubits

    @property
    def size(self) -> int:
        return 1 << self.n_qubits

    def points(self) -> np.ndarray:
        """All grid points in index order (dense path only)."""
        if self.n_qubits > MAX_DENSE_QUBITS:
            raise SizeLimitError(
                f"dense grid limited to {MAX_DENSE_QUBITS} qubits, got {self.n_qubits}"
            )
        return np.arange(self.size, dtype=np.float64) * self.step

    def x_of_bits(self, bits: np.ndarray) -> np.ndarray:
        """Map bit rows (..., N) to x = L * sum_i bits_i 2^-(i+1)."""
        bits = np.asarray(bits)
        if bits.shape[-1] != self.n_qubits:
            raise PreconditionError(
                f"bitstrings have {bits.shape[-1]} digits, grid has {self.n_qubits}"
            )
        weights = 0.5 ** np.arange(1, self.n_qubits + 1, dtype=np.float64)
        return self.support_length * (bits.astype(np.float64) @ weights)

    def x_of_index(self, index) -> np.ndarray:
        return np.asarray(index, dtype=np.float64) * self.step

    def bits_of_index(self, index) -> np.ndarray:
        """Big-endian bits of integer grid indices; output shape (..., N)."""
        index = np.asarray(index, dtype=np.uint64)
        shifts = np.arange(self.n_qubits - 1, -1, -1, dtype=np.uint64)
        return ((index[..., None] >> shifts) & np.uint64(1)).astype(np.uint8)

    def index_of_bits(self, bits: np.ndarray) -> np.ndarray:
        """Inverse of bits_of_index. Only meaningful for N <= 63."""
        bits = np.asarray(bits, dtype=np.uint64)
        shifts = np.arange(self.n_qubits - 1, -1, -1, dtype=np.uint64)
        return np.bitwise_or.reduce(bits << shifts, axis=-1)


def bitstring(bits) -> str:
    return "".join(str(int(b)) for b in bits)
