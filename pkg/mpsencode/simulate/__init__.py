from .mps_sim import DEFAULT_CHI_SIM, MpsSimulator
from .sampling import Histogram, marginal_probabilities, probabilities, sample
from .state import DenseState, QuantumState, SimulationResult, apply_circuit
from .statevector import apply_dense, circuit_unitary

__all__ = [
    "DEFAULT_CHI_SIM",
    "DenseState",
    "Histogram",
    "MpsSimulator",
    "QuantumState",
    "SimulationResult",
    "apply_circuit",
    "apply_dense",
    "marginal_probabilities",
    "circuit_unitary",
    "probabilities",
    "sample",
]
