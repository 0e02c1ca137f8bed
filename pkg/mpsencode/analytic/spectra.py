"""Asymptotic entanglement spectra predicted from the g1 / g2 functionals."""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..errors import OutOfRegimeWarning, PreconditionError
from ..mpscore.entanglement import EntanglementProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumPrediction:
    k: int
    lambda0: float
    lambda1: float
    lambda2: float
    purity: float
    out_of_regime: bool

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return self.lambda0, self.lambda1, self.lambda2, self.purity


@dataclass(frozen=True)
class AsymptoticPrediction:
    """Leading-order per-bond predictions for a function with functionals g1, g2."""

    g1: float
    g2: float
    points: Tuple[SpectrumPrediction, ...]

    @property
    def bonds(self) -> np.ndarray:
        return np.array([p.k for p in self.points])

    @property
    def lambda1(self) -> np.ndarray:
        return np.array([p.lambda1 for p in self.points])

    @property
    def lambda2(self) -> np.ndarray:
        return np.array([p.lambda2 for p in self.points])

    @property
    def purities(self) -> np.ndarray:
        return np.array([p.purity for p in self.points])

    @property
    def entropies(self) -> np.ndarray:
        return np.array([predicted_entropy(self.g1, p.k) for p in self.points])

    def rows(self) -> List[Dict[str, float]]:
        """CSV rows aligned with profile_rows: one row per (bond, i) for i = 0, 1, 2."""
        out = []
        for p, s in zip(self.points, self.entropies):
            for i, lam in enumerate((p.lambda0, p.lambda1, p.lambda2)):
                out.append(
                    {
                        "bond": p.k,
                        "i": i,
                        "lambda": lam,
                        "purity": p.purity,
                        "entropy": float(s),
                        "out_of_regime": int(p.out_of_regime),
                    }
                )
        return out


def _grid_factor(k: int, n_qubits: Optional[int]) -> float:
    # discrete variance inside a dyadic block: 4^-k -> 4^-k - 4^-N
    if n_qubits is None:
        return 1.0
    return 1.0 - 4.0 ** (k - n_qubits)


def predicted_spectrum(g1: float, g2: float, k: int, n_qubits: Optional[int] = None) -> SpectrumPrediction:
    """Lambda_{k,0}, Lambda_{k,1}, Lambda_{k,2} and p_k to leading order in 2^-k."""
    if k < 1:
        raise PreconditionError(f"bond index must be >= 1, got {k}")
    g1 = max(0.0, float(g1))
    g2 = max(0.0, float(g2))
    scale = 4.0**k
    out_of_regime = g1 / scale >= 1.0
    if out_of_regime:
        warnings.warn(
            f"g1/4^k = {g1 / scale:.3g} >= 1 at bond {k}: outside the smoothness-controlled window",
            OutOfRegimeWarning,
            stacklevel=2,
        )
    g1_eff = g1 * _grid_factor(k, n_qubits)
    return SpectrumPrediction(
        k=k,
        lambda0=1.0 - g1_eff / (24.0 * scale),
        lambda1=math.sqrt(g1_eff / 12.0) / 2.0**k,
        lambda2=math.sqrt(g2 / (720.0 * 16.0**k)),
        purity=1.0 - g1_eff / (6.0 * scale),
        out_of_regime=out_of_regime,
    )


def predict_profile(g1: float, g2: float, bonds: Iterable[int], n_qubits: Optional[int] = None) -> AsymptoticPrediction:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutOfRegimeWarning)
        points = tuple(predicted_spectrum(g1, g2, k, n_qubits) for k in bonds)
    return AsymptoticPrediction(g1=float(g1), g2=float(g2), points=points)


def predicted_entropy(g1: float, k: int) -> float:
    """S_k ~ rho (1 - ln rho) with rho = g1 / (12 4^k)."""
    rho = g1 / (12.0 * 4.0**k)
    if rho <= 0.0:
        return 0.0
    return float(rho * (1.0 - math.log(rho)))


def hilbert_det_ratio(m: int) -> Fraction:
    """det H_{m+1} / det H_m for Hilbert matrices, exactly (m!)^4 / ((2m)! (2m+1)!)."""
    if m < 0:
        raise PreconditionError(f"order must be >= 0, got {m}")
    f = math.factorial
    return Fraction(f(m) ** 4, f(2 * m) * f(2 * m + 1))


def eigenvalue_scaling(gm: float, m: int, k: int) -> float:
    """rho_{k,m} = gm / (m!^2 4^{km}) * det H_{m+1} / det H_m."""
    if m < 1:
        raise PreconditionError(f"eigenvalue order must be >= 1, got {m}")
    ratio = hilbert_det_ratio(m)
    return float(gm) / (math.factorial(m) ** 2 * 4.0 ** (k * m)) * float(ratio)


def one_layer_infidelity_estimate(g2: float, m_first: int = 2, window_start: Optional[int] = None) -> float:
    """Sum over k >= k0 of g2 / (720 16^k), i.e. g2 / (720 * 15 * 16^(k0 - 1)).

    `m_first` is the first truncated bond; `window_start` restricts the sum to
    bonds where the smoothness asymptotics hold.
    """
    if m_first < 2:
        raise PreconditionError(f"the first truncated bond is at least 2, got {m_first}")
    k0 = m_first if window_start is None else max(m_first, int(window_start))
    return float(g2) / (720.0 * 15.0 * 16.0 ** (k0 - 1))


@dataclass(frozen=True)
class EntropyBoundResult:
    passed: bool
    margin: float
    constant: float
    first_bond: Optional[int]
    checked_bonds: Tuple[int, ...]


def entropy_bound_check(
    profile: EntanglementProfile,
    g1: float,
    slack: float = 2.0,
    atol: float = 1e-14,
) -> EntropyBoundResult:
    """Check S_k <= slack * C * k / 4^k over the validity window.

    C is fitted once at the first bond with g1 / 4^k < 1. The margin is the
    smallest relative headroom over the checked bonds (negative on failure).
    """
    bonds = [k for k in range(1, profile.n_bonds + 1) if g1 / 4.0**k < 1.0]
    if not bonds:
        return EntropyBoundResult(True, float("inf"), 0.0, None, ())
    k0 = bonds[0]
    constant = float(profile.entropies[k0 - 1]) * 4.0**k0 / k0
    margin = float("inf")
    for k in bonds[1:]:
        bound = slack * constant * k / 4.0**k + atol
        entropy = float(profile.entropies[k - 1])
        margin = min(margin, (bound - entropy) / bound)
    passed = margin >= 0.0
    logger.debug(
        "entropy bound check from bond %d: C=%.4g margin=%.3g",
        k0,
        constant,
        margin,
        extra={"bond": k0},
    )
    return EntropyBoundResult(passed, margin, constant, k0, tuple(bonds))


def purity_residuals(profile: EntanglementProfile, g1: float, bonds: Iterable[int], n_qubits: Optional[int] = None) -> np.ndarray:
    """r_k = |p_k - (1 - g1 / (6 4^k))| per requested bond, optionally grid-corrected."""
    out = []
    for k in bonds:
        predicted = 1.0 - g1 * _grid_factor(k, n_qubits) / (6.0 * 4.0**k)
        out.append(abs(float(profile.purities[k - 1]) - predicted))
    return np.asarray(out)
