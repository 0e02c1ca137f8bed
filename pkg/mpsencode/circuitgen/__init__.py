from .gates import CNOT, SWAP, Gate, GateKind, cnot, rotation, rx, ry, rz, wrap_angle
from .circuit import Circuit, LayerInfo, merge_rotations
from .two_qubit import count_cnots, gates_matrix, lower_two_qubit, single_qubit_gates, zyz_angles
from .isometry import synthesize_isometry
from .u_lambda import initial_params, optimize_u_lambda, synthesize_u_lambda, variational_gates
from .layers import VLayer, exact_layer_from_chi2
from .metrics import CircuitMetrics, circuit_metrics, two_qubit_depth
from .export import to_qasm
from .builder import EncodingResult, build_encoding_circuit

__all__ = [
    "CNOT",
    "SWAP",
    "Circuit",
    "CircuitMetrics",
    "EncodingResult",
    "Gate",
    "GateKind",
    "LayerInfo",
    "VLayer",
    "build_encoding_circuit",
    "circuit_metrics",
    "cnot",
    "count_cnots",
    "exact_layer_from_chi2",
    "gates_matrix",
    "initial_params",
    "lower_two_qubit",
    "merge_rotations",
    "optimize_u_lambda",
    "rotation",
    "rx",
    "ry",
    "rz",
    "single_qubit_gates",
    "synthesize_isometry",
    "synthesize_u_lambda",
    "to_qasm",
    "two_qubit_depth",
    "variational_gates",
    "wrap_angle",
    "zyz_angles",
]
