"""Sampled relative amplitude error of an MPS against its oracle.

The oracle is mapped onto unit-norm grid amplitudes with a fixed scale,
f(x) / ||f||, where ||f|| is the Euclidean norm of f over the grid points.
Nothing is fitted on the sample, so weight the state is missing shows up as
error at every sampled point.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..analytic.quadrature import integrate
from ..errors import PreconditionError
from ..funcspace.grid import Grid
from ..mpscore.mps import Mps

logger = logging.getLogger(__name__)

_RELATIVE_FLOOR = 1e-12


@dataclass(frozen=True)
class ErrorEstimate:
    mean_rel: float
    max_rel: float
    n_samples: int

    def as_dict(self) -> dict:
        return {"mean_rel": self.mean_rel, "max_rel": self.max_rel, "n_samples": self.n_samples}


def sample_bits(n_qubits: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.integers(0, 2, size=(n, n_qubits), dtype=np.uint8)


def grid_norm(oracle, grid: Grid) -> float:
    """Euclidean norm of f over the grid points, estimated as ||f||_L2 / sqrt(step).

    Uses the oracle's declared `l2_norm` when it has one, and Gauss-Legendre
    quadrature of |f|^2 on [0, L] otherwise. The estimate differs from the
    exact grid sum by the Riemann error of the grid.
    """
    l2 = getattr(oracle, "l2_norm", None)
    if l2 is None:
        l2 = float(np.sqrt(integrate(lambda x: np.abs(oracle(x)) ** 2, 0.0, grid.support_length)))
        logger.debug("L2 norm of oracle by quadrature: %.12g", l2)
    if not l2 > 0:
        raise PreconditionError("oracle has zero L2 norm")
    return l2 / float(np.sqrt(grid.step))


def relative_errors(amplitudes: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """|e^{i phi} a - r| / |r| for expected amplitudes r.

    Only the global phase phi is aligned; the modulus of a is compared as is.
    """
    a = np.asarray(amplitudes)
    r = np.asarray(reference)
    overlap = np.vdot(a, r)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    floor = _RELATIVE_FLOOR * max(float(np.max(np.abs(r), initial=0.0)), np.finfo(np.float64).tiny)
    return np.abs(phase * a - r) / np.maximum(np.abs(r), floor)


def tci_error_estimate(
    m: Mps,
    oracle,
    grid: Grid,
    n: int = 256,
    seed: int = 0,
    norm: Optional[float] = None,
) -> ErrorEstimate:
    """Mean and max relative amplitude error on `n` uniformly random grid points.

    `m` is read as a unit-norm state. `norm` is the Euclidean norm of f over the
    grid points; by default it comes from `grid_norm`.
    """
    if n < 1:
        raise PreconditionError("need at least one error sample")
    if m.n_qubits != grid.n_qubits:
        raise PreconditionError(f"MPS has {m.n_qubits} sites, grid has {grid.n_qubits} qubits")
    if norm is None:
        norm = grid_norm(oracle, grid)
    if not norm > 0:
        raise PreconditionError(f"reference norm must be positive, got {norm}")
    bits = sample_bits(grid.n_qubits, n, seed)
    rel = relative_errors(m.amplitudes(bits), oracle(grid.x_of_bits(bits)) / norm)
    return ErrorEstimate(mean_rel=float(np.mean(rel)), max_rel=float(np.max(rel)), n_samples=n)
