"""Dense-vector to MPS decomposition, canonical forms and truncation."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from ..errors import CappedBondWarning, DegenerateInputError, PreconditionError, SizeLimitError
from ..funcspace.grid import MAX_DENSE_QUBITS
from .mps import Mps

logger = logging.getLogger(__name__)

SCHMIDT_CUTOFF = 1e-14
NORM_TOLERANCE = 1e-8


def svd(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD with deterministic phases.

    Each left singular vector is rotated so that its largest-magnitude entry is
    real and positive; the matching right vector absorbs the conjugate phase.
    """
    try:
        u, s, vh = scipy.linalg.svd(matrix, full_matrices=False, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        u, s, vh = scipy.linalg.svd(matrix, full_matrices=False, lapack_driver="gesvd")
    if u.size:
        pivot = np.argmax(np.abs(u), axis=0)
        entries = u[pivot, np.arange(u.shape[1])]
        mags = np.abs(entries)
        phases = np.where(mags > 0, entries / np.where(mags > 0, mags, 1.0), 1.0)
        u = u / phases[None, :]
        vh = vh * phases[:, None]
    return u, s, vh


def _n_qubits_of(v: np.ndarray) -> int:
    size = v.shape[0]
    n = int(size).bit_length() - 1
    if size < 2 or (1 << n) != size:
        raise PreconditionError(f"vector length {size} is not a power of two >= 2")
    return n


def _kept_rank(s: np.ndarray, chi_max: int, eps_svd: float) -> Tuple[int, int]:
    """(rank kept, rank eps_svd alone would keep)."""
    nonzero = max(1, int(np.count_nonzero(s > SCHMIDT_CUTOFF)))
    weights = s**2 / np.sum(s**2)
    # tail[r] = discarded weight when keeping r values
    tail = np.concatenate([np.cumsum(weights[::-1])[::-1], [0.0]])
    wanted = int(np.argmax(tail <= eps_svd)) if eps_svd > 0 else len(s)
    wanted = max(1, min(wanted, nonzero))
    return min(chi_max, wanted), wanted


def mps_from_vector(v, chi_max: int = 64, eps_svd: float = 0.0) -> Mps:
    """Left-to-right SVD sweep of a unit-norm 2^N vector."""
    v = np.asarray(v)
    if v.ndim != 1:
        raise PreconditionError("expected a 1-D amplitude vector")
    n = _n_qubits_of(v)
    if n > MAX_DENSE_QUBITS:
        raise SizeLimitError(f"dense decomposition limited to {MAX_DENSE_QUBITS} qubits")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise PreconditionError(f"input norm {norm:.12f} differs from 1 by more than {NORM_TOLERANCE}")
    if chi_max < 1:
        raise PreconditionError("chi_max must be positive")

    tensors: List[np.ndarray] = []
    spectra: List[np.ndarray] = []
    capped: List[int] = []
    rest = v.reshape(1, -1)
    chi_left = 1
    for k in range(n - 1):
        u, s, vh = svd(rest.reshape(chi_left * 2, -1))
        rank, wanted = _kept_rank(s, chi_max, eps_svd)
        if wanted > chi_max:
            capped.append(k + 1)
        kept = s[:rank]
        spectra.append(kept / np.linalg.norm(kept))
        tensors.append(u[:, :rank].reshape(chi_left, 2, rank))
        rest = kept[:, None] * vh[:rank]
        chi_left = rank
    last = rest.reshape(chi_left, 2, 1)
    tensors.append(last / np.linalg.norm(last))

    if capped:
        message = f"chi_max={chi_max} truncated beyond eps_svd on bonds {capped}"
        warnings.warn(message, CappedBondWarning, stacklevel=2)
        logger.warning(message, extra={"chi_max": chi_max, "n_qubits": n})
    logger.debug(
        "decomposed %d-qubit vector, max bond %d",
        n,
        max((t.shape[2] for t in tensors), default=1),
        extra={"n_qubits": n, "chi": max(t.shape[2] for t in tensors)},
    )
    return Mps(tuple(tensors), canonical_center=n - 1, schmidt=tuple(spectra))


def _right_canonicalize(tensors: List[np.ndarray]) -> List[np.ndarray]:
    """QR sweep from the right; afterwards sites 1..N-1 are right isometries."""
    tensors = list(tensors)
    for k in range(len(tensors) - 1, 0, -1):
        t = tensors[k]
        chi_l, _, chi_r = t.shape
        q, r = scipy.linalg.qr(t.reshape(chi_l, 2 * chi_r).conj().T, mode="economic")
        rank = q.shape[1]
        tensors[k] = q.conj().T.reshape(rank, 2, chi_r)
        tensors[k - 1] = np.einsum("asb,bc->asc", tensors[k - 1], r.conj().T)
    return tensors


def _left_sweep(
    tensors: List[np.ndarray], caps: Sequence[int]
) -> Tuple[List[np.ndarray], List[np.ndarray], List[float]]:
    """SVD sweep left to right over a right-canonical chain.

    Returns the new tensors (centre N-1), normalized spectra and the discarded
    weight per bond.
    """
    tensors = list(tensors)
    spectra: List[np.ndarray] = []
    discarded: List[float] = []
    for k in range(len(tensors) - 1):
        t = tensors[k]
        chi_l, _, chi_r = t.shape
        u, s, vh = svd(t.reshape(chi_l * 2, chi_r))
        total = float(np.sum(s**2))
        nonzero = max(1, int(np.count_nonzero(s > SCHMIDT_CUTOFF * max(1.0, s[0]))))
        rank = max(1, min(int(caps[k]), nonzero))
        kept = s[:rank]
        discarded.append(float(np.sum(s[rank:] ** 2)) / total if total > 0 else 0.0)
        kept_norm = np.linalg.norm(kept)
        spectra.append(kept / kept_norm)
        tensors[k] = u[:, :rank].reshape(chi_l, 2, rank)
        carry = (kept / kept_norm)[:, None] * vh[:rank]
        tensors[k + 1] = np.einsum("ab,bsc->asc", carry, tensors[k + 1])
    tensors[-1] = tensors[-1] / np.linalg.norm(tensors[-1])
    return tensors, spectra, discarded


def _move_center_left(tensors: List[np.ndarray], start: int, stop: int) -> List[np.ndarray]:
    """Shift the weight from site `start` down to site `stop` (stop <= start) by SVD."""
    tensors = list(tensors)
    for k in range(start, stop, -1):
        t = tensors[k]
        chi_l, _, chi_r = t.shape
        u, s, vh = svd(t.reshape(chi_l, 2 * chi_r))
        rank = vh.shape[0]
        tensors[k] = vh.reshape(rank, 2, chi_r)
        tensors[k - 1] = np.einsum("asb,bc->asc", tensors[k - 1], u * s[None, :])
    return tensors


def canonicalize(m: Mps, center: int = 0) -> Mps:
    """Mixed-canonical form with the weight on site `center` and every spectrum recorded.

    The state is unchanged, norm included: the norm sits on the centre tensor.
    The recorded spectra are always normalized.
    """
    n = m.n_qubits
    if not 0 <= center < n:
        raise PreconditionError(f"centre {center} outside 0..{n - 1}")
    tensors = _right_canonicalize(list(m.tensors))
    norm = float(np.linalg.norm(tensors[0]))
    if norm == 0.0:
        raise DegenerateInputError("the zero state has no canonical form")
    tensors[0] = tensors[0] / norm
    tensors, spectra, _ = _left_sweep(tensors, [np.iinfo(np.int64).max] * (n - 1))
    tensors = _move_center_left(tensors, n - 1, center)
    tensors[center] = tensors[center] * norm
    return m.with_tensors(tensors, canonical_center=center, schmidt=tuple(spectra), metadata=dict(m.metadata))


def move_center(m: Mps, center: int) -> Mps:
    """Move the orthogonality centre of a canonical MPS, keeping its spectra."""
    if m.canonical_center is None:
        return canonicalize(m, center)
    if not 0 <= center < m.n_qubits:
        raise PreconditionError(f"centre {center} outside 0..{m.n_qubits - 1}")
    tensors = list(m.tensors)
    c = m.canonical_center
    if center < c:
        tensors = _move_center_left(tensors, c, center)
    else:
        for k in range(c, center):
            t = tensors[k]
            chi_l, _, chi_r = t.shape
            q, r = scipy.linalg.qr(t.reshape(chi_l * 2, chi_r), mode="economic")
            tensors[k] = q.reshape(chi_l, 2, q.shape[1])
            tensors[k + 1] = np.einsum("ab,bsc->asc", r, tensors[k + 1])
    return m.with_tensors(tensors, canonical_center=center, schmidt=m.schmidt, metadata=dict(m.metadata))


def truncate(m: Mps, chi: Union[int, Sequence[int]]) -> Mps:
    """Keep at most `chi` Schmidt values per bond (or chi[k-1] on bond k), then renormalize.

    The result keeps the input's canonical centre when it had one.
    """
    n = m.n_qubits
    caps = [int(chi)] * (n - 1) if np.isscalar(chi) else [int(c) for c in chi]
    if len(caps) != n - 1 or any(c < 1 for c in caps):
        raise PreconditionError("need a positive bond cap for every bond")
    tensors = _right_canonicalize(list(m.tensors))
    tensors[0] = tensors[0] / np.linalg.norm(tensors[0])
    tensors, spectra, discarded = _left_sweep(tensors, caps)
    center = m.canonical_center if m.canonical_center is not None else n - 1
    tensors = _move_center_left(tensors, n - 1, center)
    out = m.with_tensors(tensors, canonical_center=center, schmidt=tuple(spectra))
    logger.debug(
        "truncated to chi=%s, discarded %.3e",
        chi,
        float(np.sum(discarded)),
        extra={"chi": max(caps, default=1), "discarded_weight": float(np.sum(discarded))},
    )
    return out


@dataclass(frozen=True)
class MixedCanonical:
    """psi = sum_i lambda_i |L_i>|R_i> across one bond.

    `left` are left isometries for sites 0..k-1, `right` right isometries for
    sites k..N-1, `bond` is k.
    """

    left: Tuple[np.ndarray, ...]
    schmidt: np.ndarray
    right: Tuple[np.ndarray, ...]
    bond: int

    def tensors(self) -> List[np.ndarray]:
        """Plain site tensors with the spectrum folded into the first right site."""
        right = list(self.right)
        right[0] = np.einsum("a,asb->asb", self.schmidt, right[0])
        return list(self.left) + right


def split_at_bond(m: Mps, bond: int) -> MixedCanonical:
    """Explicit left-isometries / spectrum / right-isometries split at bond k."""
    n = m.n_qubits
    if not 1 <= bond <= n - 1:
        raise PreconditionError(f"bond {bond} outside 1..{n - 1}")
    c = canonicalize(m, bond)
    tensors = list(c.tensors)
    t = tensors[bond]
    chi_l, _, chi_r = t.shape
    u, s, vh = svd(t.reshape(chi_l, 2 * chi_r))
    rank = max(1, int(np.count_nonzero(s > SCHMIDT_CUTOFF * max(1.0, s[0]))))
    tensors[bond - 1] = np.einsum("asb,bc->asc", tensors[bond - 1], u[:, :rank])
    right_first = vh[:rank].reshape(rank, 2, chi_r)
    spectrum = s[:rank] / np.linalg.norm(s[:rank])
    return MixedCanonical(
        left=tuple(tensors[:bond]),
        schmidt=spectrum,
        right=(right_first,) + tuple(tensors[bond + 1 :]),
        bond=bond,
    )


def schmidt_values(v, bond: int) -> np.ndarray:
    """Singular values of the dense bipartition at `bond`, descending."""
    v = np.asarray(v)
    n = _n_qubits_of(v)
    if not 1 <= bond <= n - 1:
        raise PreconditionError(f"bond {bond} outside 1..{n - 1}")
    return scipy.linalg.svdvals(v.reshape(1 << bond, -1))
