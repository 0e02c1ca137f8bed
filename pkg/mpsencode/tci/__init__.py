from .builder import CALLS_PER_SWEEP, TciConfig, maxvol, tci_build
from .error import ErrorEstimate, grid_norm, tci_error_estimate

__all__ = ["CALLS_PER_SWEEP", "ErrorEstimate", "TciConfig", "grid_norm", "maxvol", "tci_build", "tci_error_estimate"]
