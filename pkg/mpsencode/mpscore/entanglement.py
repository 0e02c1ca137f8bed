"""Entanglement diagnostics: per-bond spectra, purities, entropies, brute-force density matrices."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from ..errors import PreconditionError, SizeLimitError
from .decompose import SCHMIDT_CUTOFF, _n_qubits_of
from .mps import Mps

MAX_RDM_QUBITS = 16


@dataclass(frozen=True)
class EntanglementProfile:
    spectra: Tuple[np.ndarray, ...]  # bond k at index k-1, descending
    purities: np.ndarray
    entropies: np.ndarray

    @property
    def n_bonds(self) -> int:
        return len(self.spectra)

    def coefficient(self, bond: int, i: int) -> float:
        """Lambda_{k,i}, zero when the bond has fewer than i+1 values."""
        spectrum = self.spectra[bond - 1]
        return float(spectrum[i]) if i < len(spectrum) else 0.0

    def residual_weight(self, bond: int) -> float:
        """sum_{i>=1} Lambda_{k,i}^2."""
        spectrum = self.spectra[bond - 1]
        return float(np.sum(spectrum[1:] ** 2))


def profile_from_spectra(spectra) -> EntanglementProfile:
    clean = []
    purities = []
    entropies = []
    for s in spectra:
        s = np.sort(np.asarray(s, dtype=np.float64))[::-1]
        s = np.where(s < SCHMIDT_CUTOFF, 0.0, s)
        w = s**2
        purities.append(float(np.sum(w * w)))
        nz = w[w > 0]
        entropies.append(float(-np.sum(nz * np.log(nz))))
        clean.append(s)
    return EntanglementProfile(tuple(clean), np.asarray(purities), np.asarray(entropies))


def entanglement_profile(m: Mps) -> EntanglementProfile:
    """Spectra, purities p_k = sum Lambda^4 and entropies S_k = -sum Lambda^2 ln Lambda^2."""
    if m.schmidt is None:
        raise PreconditionError("entanglement_profile needs a canonical MPS with spectra; call canonicalize first")
    return profile_from_spectra(m.schmidt)


def profile_rows(profile: EntanglementProfile) -> List[Dict[str, float]]:
    """CSV rows: bond k, index i, Lambda_{k,i}, p_k, S_k."""
    rows = []
    for k, spectrum in enumerate(profile.spectra, start=1):
        for i, lam in enumerate(spectrum):
            rows.append(
                {
                    "bond": k,
                    "i": i,
                    "lambda": float(lam),
                    "purity": float(profile.purities[k - 1]),
                    "entropy": float(profile.entropies[k - 1]),
                }
            )
    return rows


def reduced_density_matrix(v, bond: int) -> np.ndarray:
    """rho_k = Tr_{k..N-1} |v><v| on the first k qubits (brute force)."""
    v = np.asarray(v)
    n = _n_qubits_of(v)
    if n > MAX_RDM_QUBITS:
        raise SizeLimitError(f"reduced density matrices limited to {MAX_RDM_QUBITS} qubits, got {n}")
    if not 1 <= bond <= n - 1:
        raise PreconditionError(f"bond {bond} outside 1..{n - 1}")
    mat = v.reshape(1 << bond, -1)
    rho = mat @ mat.conj().T
    return (rho + rho.conj().T) / 2.0
