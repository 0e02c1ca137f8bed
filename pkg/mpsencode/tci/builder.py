"""Two-site cross interpolation of a function oracle on a binary grid.

The grid function f(sigma_1 .. sigma_N) is sampled only on superblocks
I_k x {0,1} x {0,1} x J_{k+2}, where I_k are pivot prefixes and J_{k+2} pivot
suffixes. Each superblock is split by SVD and the new pivots are picked by
maxvol on the kept singular vectors, so every sweep costs at most
8 N chi^2 oracle points.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from ..errors import PreconditionError
from ..funcspace.grid import Grid
from ..funcspace.oracle import CountingOracle, FunctionOracle
from ..mpscore.decompose import SCHMIDT_CUTOFF
from ..mpscore.mps import Mps
from .error import ErrorEstimate, grid_norm, sample_bits, tci_error_estimate

logger = logging.getLogger(__name__)

# oracle points per sweep are bounded by CALLS_PER_SWEEP * N * chi^2
CALLS_PER_SWEEP = 8

MAXVOL_TOLERANCE = 1.05
MAXVOL_MAX_ITERS = 100


@dataclass(frozen=True)
class TciConfig:
    max_rank: int = 32
    rel_tol: float = 1e-8
    max_sweeps: int = 12
    n_error_samples: int = 256
    rng_seed: int = 0
    n_pivot_samples: int = 256

    def __post_init__(self) -> None:
        if self.max_rank < 2:
            raise PreconditionError(f"max_rank must be >= 2, got {self.max_rank}")
        if not self.rel_tol > 0:
            raise PreconditionError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_sweeps < 1 or self.n_error_samples < 1:
            raise PreconditionError("max_sweeps and n_error_samples must be positive")

    @classmethod
    def from_settings(cls, settings) -> "TciConfig":
        return cls(
            max_rank=settings.max_rank,
            rel_tol=settings.tol,
            max_sweeps=settings.max_sweeps,
            n_error_samples=settings.n_error_samples,
            rng_seed=settings.seed,
        )

    def call_bound(self, n_qubits: int, sweeps: int) -> int:
        """Upper bound on oracle points for `sweeps` sweeps, sampling included."""
        return (
            CALLS_PER_SWEEP * n_qubits * self.max_rank**2 * sweeps
            + self.n_pivot_samples
            + n_qubits
            + 1
            + self.n_error_samples * sweeps
        )


def maxvol(a: np.ndarray, tol: float = MAXVOL_TOLERANCE, max_iters: int = MAXVOL_MAX_ITERS) -> np.ndarray:
    """Row indices of a tall n x r matrix whose r x r submatrix has locally maximal volume.

    Starts from pivoted QR of a^T and swaps rows while some coefficient of
    a @ inv(a[rows]) exceeds `tol` in modulus.
    """
    n, r = a.shape
    if r > n:
        raise PreconditionError(f"maxvol needs n >= r, got {a.shape}")
    _, _, perm = scipy.linalg.qr(a.T, mode="economic", pivoting=True)
    rows = np.array(perm[:r], dtype=np.intp)
    for _ in range(max_iters):
        try:
            coeffs = scipy.linalg.solve(a[rows].T, a.T).T
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            break
        i, j = np.unravel_index(np.argmax(np.abs(coeffs)), coeffs.shape)
        if abs(coeffs[i, j]) <= tol:
            break
        rows[j] = i
    return rows


class _CrossState:
    """Pivot sets and the sampled oracle for one build; single owner."""

    def __init__(self, oracle: CountingOracle, grid: Grid, dtype):
        self.oracle = oracle
        self.grid = grid
        self.n = grid.n_qubits
        self.dtype = dtype
        self.left: List[np.ndarray] = []
        self.right: List[np.ndarray] = []

    def seed(self, pivot: np.ndarray) -> None:
        pivot = np.asarray(pivot, dtype=np.uint8)
        # left[k]: (r_k, k) prefixes; right[k]: (r_k, N - k) suffixes
        self.left = [pivot[None, :k].copy() for k in range(self.n + 1)]
        self.right = [pivot[None, k:].copy() for k in range(self.n + 1)]

    def superblock(self, k: int) -> np.ndarray:
        """f on left[k] x {0,1} x {0,1} x right[k+2], as an (r_k * 2, 2 * r_{k+2}) matrix."""
        prefix = self.left[k]
        suffix = self.right[k + 2]
        ra, rb = prefix.shape[0], suffix.shape[0]
        bits = np.zeros((ra, 2, 2, rb, self.n), dtype=np.uint8)
        bits[..., :k] = prefix[:, None, None, None, :]
        bits[:, 1, :, :, k] = 1
        bits[:, :, 1, :, k + 1] = 1
        bits[..., k + 2 :] = suffix[None, None, None, :, :]
        values = self.oracle(self.grid.x_of_bits(bits.reshape(-1, self.n)))
        return values.astype(self.dtype).reshape(ra * 2, 2 * rb)


def _rank(s: np.ndarray, cap: int) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 1
    return max(1, min(cap, int(np.count_nonzero(s > SCHMIDT_CUTOFF * s[0]))))


def _left_to_right(state: _CrossState, cap: int) -> List[np.ndarray]:
    n = state.n
    cores: List[Optional[np.ndarray]] = [None] * n
    for k in range(n - 1):
        block = state.superblock(k)
        u, s, vh = scipy.linalg.svd(block, full_matrices=False)
        r = _rank(s, cap)
        u = u[:, :r]
        rows = maxvol(u)
        pivot = u[rows]
        ra = state.left[k].shape[0]
        cores[k] = scipy.linalg.solve(pivot.T, u.T).T.reshape(ra, 2, r)
        prefix = state.left[k]
        state.left[k + 1] = np.hstack([prefix[rows // 2], (rows % 2)[:, None].astype(np.uint8)])
        if k == n - 2:
            rb = state.right[n].shape[0]
            cores[n - 1] = (pivot @ (s[:r, None] * vh[:r])).reshape(r, 2, rb)
    return cores


def _right_to_left(state: _CrossState, cap: int) -> List[np.ndarray]:
    n = state.n
    cores: List[Optional[np.ndarray]] = [None] * n
    for k in range(n - 2, -1, -1):
        block = state.superblock(k)
        u, s, vh = scipy.linalg.svd(block, full_matrices=False)
        r = _rank(s, cap)
        vh = vh[:r]
        cols = maxvol(vh.T)
        pivot = vh[:, cols]
        rb = state.right[k + 2].shape[0]
        cores[k + 1] = scipy.linalg.solve(pivot, vh).reshape(r, 2, rb)
        suffix = state.right[k + 2]
        state.right[k + 1] = np.hstack([(cols // rb)[:, None].astype(np.uint8), suffix[cols % rb]])
        if k == 0:
            ra = state.left[0].shape[0]
            cores[0] = ((u[:, :r] * s[None, :r]) @ pivot).reshape(ra, 2, r)
    return cores


def _initial_pivot(oracle: CountingOracle, grid: Grid, cfg: TciConfig) -> np.ndarray:
    """Largest |f| among random bitstrings and the dyadic points L 2^-(j+1)."""
    n = grid.n_qubits
    candidates = [sample_bits(n, cfg.n_pivot_samples, cfg.rng_seed + 1)]
    dyadic = np.eye(n, dtype=np.uint8)
    candidates.append(dyadic)
    candidates.append(np.zeros((1, n), dtype=np.uint8))
    bits = np.vstack(candidates)
    values = np.abs(oracle(grid.x_of_bits(bits)))
    return bits[int(np.argmax(values))]


def _single_site(oracle: CountingOracle, grid: Grid, dtype) -> Mps:
    values = oracle(grid.x_of_bits(np.array([[0], [1]], dtype=np.uint8))).astype(dtype)
    return Mps((values.reshape(1, 2, 1),)).normalized()


def tci_build(
    oracle: FunctionOracle,
    grid: Grid,
    cfg: Optional[TciConfig] = None,
    norm: Optional[float] = None,
) -> Mps:
    """Cross-interpolated MPS of `oracle` on `grid`, renormalized to unit norm.

    Errors are measured against f / norm, with `norm` the Euclidean norm of f on
    the grid points (`grid_norm` when omitted). A quadrature fallback for oracles
    without a declared L2 norm is not counted in oracle_calls.

    Ranks double every sweep (2, 4, ... up to cfg.max_rank). The build stops once
    the sampled error satisfies mean_rel <= rel_tol and max_rel <= 10 rel_tol;
    otherwise the best MPS seen is returned with metadata["converged"] False.
    """
    cfg = cfg or TciConfig()
    if oracle.support_length != grid.support_length:
        raise PreconditionError(
            f"oracle support {oracle.support_length:g} differs from grid support {grid.support_length:g}"
        )
    counted = CountingOracle(oracle)
    dtype = np.float64 if oracle.is_real else np.complex128
    n = grid.n_qubits
    if n == 1:
        m = _single_site(counted, grid, dtype)
        return m.with_tensors(m.tensors, metadata={"oracle_calls": counted.calls, "converged": True, "sweeps": 0})

    reference = grid_norm(oracle, grid) if norm is None else norm
    state = _CrossState(counted, grid, dtype)
    state.seed(_initial_pivot(counted, grid, cfg))

    best: Optional[Tuple[Mps, ErrorEstimate]] = None
    converged = False
    sweeps = 0
    cap = 2
    for sweep in range(cfg.max_sweeps):
        sweeps = sweep + 1
        _left_to_right(state, cap)
        cores = _right_to_left(state, cap)
        m = Mps(tuple(cores)).normalized()
        estimate = tci_error_estimate(m, counted, grid, cfg.n_error_samples, cfg.rng_seed, norm=reference)
        logger.debug(
            "tci sweep %d: cap %d, max bond %d, mean_rel %.3e, max_rel %.3e",
            sweeps,
            cap,
            m.max_bond,
            estimate.mean_rel,
            estimate.max_rel,
            extra={
                "sweep": sweeps,
                "chi": m.max_bond,
                "mean_rel": estimate.mean_rel,
                "max_rel": estimate.max_rel,
                "oracle_calls": counted.calls,
            },
        )
        if best is None or estimate.mean_rel < best[1].mean_rel:
            best = (m, estimate)
        if estimate.mean_rel <= cfg.rel_tol and estimate.max_rel <= 10.0 * cfg.rel_tol:
            best = (m, estimate)
            converged = True
            break
        cap = min(cfg.max_rank, 2 * cap)

    m, estimate = best
    metadata = {
        "builder": "tci",
        "oracle_calls": counted.calls,
        "converged": converged,
        "sweeps": sweeps,
        "mean_rel": estimate.mean_rel,
        "max_rel": estimate.max_rel,
        "ranks": m.bond_dims,
        "call_bound": cfg.call_bound(n, sweeps),
    }
    log = logger.info if converged else logger.warning
    log(
        "tci %s after %d sweeps: %d oracle points, max bond %d, mean_rel %.3e",
        "converged" if converged else "did not converge",
        sweeps,
        counted.calls,
        m.max_bond,
        estimate.mean_rel,
        extra={"n_qubits": n, "oracle_calls": counted.calls, "mean_rel": estimate.mean_rel, "max_rel": estimate.max_rel},
    )
    return m.with_tensors(m.tensors, metadata=metadata)
