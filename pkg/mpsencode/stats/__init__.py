from .divergence import Q_FLOOR, kl_divergence
from .ks import KsResult, ks_test

__all__ = ["KsResult", "Q_FLOOR", "kl_divergence", "ks_test"]
