"""One-sample Kolmogorov-Smirnov test against a truncated, renormalized CDF."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.stats

from ..errors import DomainError, EmptySampleError
from ..funcspace.distributions import DistributionSpec, truncated_cdf


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    n_samples: int

    def rejects(self, alpha: float = 0.05) -> bool:
        return self.p_value < alpha


def ks_test(samples, dist: DistributionSpec) -> KsResult:
    """Statistic from scipy.stats.kstest; p-value from the asymptotic Kolmogorov law at sqrt(n) D."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptySampleError("ks_test needs at least one sample")
    if np.any(x < 0) or np.any(x > dist.L):
        raise DomainError(f"samples must lie in [0, {dist.L}]")
    res = scipy.stats.kstest(x, lambda t: truncated_cdf(dist, t))
    statistic = float(res.statistic)
    p_value = float(np.clip(scipy.stats.kstwobign.sf(math.sqrt(x.size) * statistic), 0.0, 1.0))
    return KsResult(statistic, p_value, int(x.size))
