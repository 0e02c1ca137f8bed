"""Quantum states for simulation and the circuit runner."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..circuitgen.circuit import Circuit
from ..errors import LengthMismatchError, PreconditionError, TruncationWarning
from ..mpscore.decompose import _n_qubits_of
from ..mpscore.mps import Mps
from .mps_sim import DEFAULT_CHI_SIM, MpsSimulator
from .statevector import apply_dense

logger = logging.getLogger(__name__)

TRUNCATION_WARNING_THRESHOLD = 1e-6


@dataclass(frozen=True)
class DenseState:
    """Unit-norm 2^N amplitude vector, big-endian."""

    vector: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vector)
        if v.ndim != 1:
            raise PreconditionError("a dense state is a 1-D vector")
        _n_qubits_of(v)
        object.__setattr__(self, "vector", v)

    @property
    def n_qubits(self) -> int:
        return _n_qubits_of(self.vector)

    def to_vector(self) -> np.ndarray:
        return self.vector

    @classmethod
    def zero(cls, n_qubits: int) -> "DenseState":
        v = np.zeros(1 << n_qubits, dtype=np.complex128)
        v[0] = 1.0
        return cls(v)


QuantumState = Union[DenseState, Mps]


@dataclass(frozen=True)
class SimulationResult:
    state: QuantumState
    discarded_weight: float = 0.0
    truncation_warning: bool = False


def apply_circuit(circuit: Circuit, init: QuantumState, chi_sim: Optional[int] = None) -> SimulationResult:
    """Run the gates in order. Dense states are exact; MPS states are truncated to chi_sim."""
    if isinstance(init, np.ndarray):
        init = DenseState(init)
    if init.n_qubits != circuit.n_qubits:
        raise LengthMismatchError(f"state has {init.n_qubits} qubits, circuit has {circuit.n_qubits}")
    if isinstance(init, DenseState):
        return SimulationResult(DenseState(apply_dense(circuit, init.vector)))

    sim = MpsSimulator(init, chi_sim or DEFAULT_CHI_SIM)
    for g in circuit.gates:
        sim.apply(g)
    flagged = sim.discarded_weight > TRUNCATION_WARNING_THRESHOLD
    if flagged:
        message = f"MPS simulation discarded weight {sim.discarded_weight:.3e} at chi_sim={sim.chi_sim}"
        warnings.warn(message, TruncationWarning, stacklevel=2)
        logger.warning(message, extra={"discarded_weight": sim.discarded_weight, "chi": sim.chi_sim})
    return SimulationResult(sim.state(), sim.discarded_weight, flagged)
