"""Shallow quantum circuits encoding smooth probability distributions via matrix product states."""
# circuitgen must load before simulate: the builder drives the MPS simulator,
# and the simulator consumes circuitgen's gate types.
from . import circuitgen
from . import simulate
from .config import DistributionParams, RunConfig, Settings, get_settings
from .errors import MpsEncodeError

__version__ = "0.1.0"

__all__ = [
    "DistributionParams",
    "MpsEncodeError",
    "RunConfig",
    "Settings",
    "circuitgen",
    "get_settings",
    "simulate",
]
