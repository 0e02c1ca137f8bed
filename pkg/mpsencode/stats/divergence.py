"""Kullback-Leibler divergence between an ideal and an encoded distribution."""
from __future__ import annotations

from typing import Tuple

import numpy as np
import scipy.special

from ..errors import LengthMismatchError, PreconditionError

Q_FLOOR = 1e-300


def kl_divergence(q, p) -> Tuple[float, int]:
    """KL(p || q) = sum p_i ln(p_i / q_i) over bins with p_i > 0, natural log.

    `p` is the ideal distribution and `q` the encoded one. q_i is floored at
    1e-300; the second return value counts the floored bins that carry ideal mass.
    """
    q = np.asarray(q, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if q.shape != p.shape or q.ndim != 1:
        raise LengthMismatchError(f"distributions differ in shape: {q.shape} vs {p.shape}")
    if np.any(p < 0) or np.any(q < 0):
        raise PreconditionError("probabilities must be nonnegative")
    support = p > 0
    floored = int(np.count_nonzero(support & (q < Q_FLOOR)))
    qs = np.maximum(q[support], Q_FLOOR)
    value = float(np.sum(scipy.special.rel_entr(p[support], qs)))
    return max(value, 0.0), floored
