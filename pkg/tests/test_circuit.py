import math

import numpy as np
import pytest
import scipy.stats

from mpsencode.circuitgen import (
    CNOT,
    SWAP,
    Circuit,
    Gate,
    GateKind,
    cnot,
    count_cnots,
    gates_matrix,
    lower_two_qubit,
    merge_rotations,
    rotation,
    wrap_angle,
    zyz_angles,
)
from mpsencode.circuitgen.gates import equal_up_to_phase, ry
from mpsencode.errors import CircuitStateError, PreconditionError


def _haar(seed):
    return scipy.stats.unitary_group.rvs(4, random_state=seed)


def test_wrap_angle_keeps_rotations_equivalent():
    assert wrap_angle(2 * math.pi) == pytest.approx(2 * math.pi)
    assert wrap_angle(-2 * math.pi) == pytest.approx(2 * math.pi)
    assert wrap_angle(5 * math.pi) == pytest.approx(math.pi)
    assert np.allclose(ry(wrap_angle(9.0)), ry(9.0))


def test_negligible_rotation_is_dropped():
    assert rotation(GateKind.RZ, 0, 1e-15) is None
    assert rotation(GateKind.RZ, 0, 4 * math.pi) is None
    assert rotation(GateKind.RY, 2, 0.3).qubits == (2,)


@pytest.mark.parametrize(
    "kind, qubits, angle",
    [(GateKind.RY, (0, 1), 0.1), (GateKind.RX, (0,), None), (GateKind.CNOT, (1, 1), None)],
)
def test_gate_validation(kind, qubits, angle):
    with pytest.raises(PreconditionError):
        Gate(kind, qubits, angle)


def test_generic_gate_must_be_unitary():
    with pytest.raises(PreconditionError):
        Gate(GateKind.U2Q, (0, 1), unitary=np.ones((4, 4)))


def test_merge_fuses_and_cancels():
    gates = [
        Gate(GateKind.RY, (0,), 0.3),
        Gate(GateKind.RY, (0,), 0.2),
        Gate(GateKind.RZ, (1,), 0.5),
        Gate(GateKind.RZ, (1,), -0.5),
        cnot(0, 1),
        Gate(GateKind.RY, (0,), 0.1),
    ]
    merged = merge_rotations(gates)
    assert [g.kind for g in merged] == [GateKind.RY, GateKind.CNOT, GateKind.RY]
    assert merged[0].angle == pytest.approx(0.5)


def test_merge_does_not_cross_entangling_gates():
    gates = [Gate(GateKind.RX, (1,), 0.4), cnot(0, 1), Gate(GateKind.RX, (1,), -0.4)]
    assert len(merge_rotations(gates)) == 3


def test_inverse_undoes_circuit():
    c = Circuit(2)
    c.add_layer([Gate(GateKind.RY, (0,), 0.7), cnot(0, 1), Gate(GateKind.RZ, (1,), 0.2)], origin=1)
    inv = c.inverse()
    assert inv.layers[0].start == 0 and inv.layers[0].stop == 3
    product = gates_matrix(inv.gates, 0, 1) @ gates_matrix(c.gates, 0, 1)
    assert np.allclose(product, np.eye(4), atol=1e-12)


def test_gates_outside_register_are_rejected():
    c = Circuit(2)
    with pytest.raises(PreconditionError):
        c.append(cnot(1, 2))


@pytest.mark.parametrize("seed", range(6))
def test_lowering_preserves_unitary(seed):
    u = _haar(seed)
    gates = lower_two_qubit(u, (3, 4))
    assert sum(g.kind is GateKind.CNOT for g in gates) <= 3
    assert all(g.kind is not GateKind.U2Q for g in gates)
    assert equal_up_to_phase(gates_matrix(gates, 3, 4), u, atol=1e-8)


def test_lowered_circuit_keeps_layer_ranges():
    c = Circuit(3)
    c.add_layer([Gate(GateKind.U2Q, (1, 2), unitary=_haar(7))], origin=2)
    assert c.has_unlowered
    with pytest.raises(CircuitStateError):
        c.require_lowered()
    low = c.lowered()
    low.require_lowered()
    assert low.layers[0].stop == len(low.gates)


@pytest.mark.parametrize(
    "u, expected",
    [(np.eye(4), 0), (CNOT, 1), (SWAP, 3), (np.kron(ry(0.3), ry(1.1)), 0)],
)
def test_cnot_counts(u, expected):
    assert count_cnots(u) == expected


def test_two_cnot_class():
    u = gates_matrix([cnot(0, 1), Gate(GateKind.RY, (0,), 0.4), Gate(GateKind.RZ, (1,), 0.9), cnot(0, 1)], 0, 1)
    assert count_cnots(u) == 2
    gates = lower_two_qubit(u, (0, 1))
    assert sum(g.kind is GateKind.CNOT for g in gates) == 2


def test_reversed_pair_is_swapped():
    forward = gates_matrix([cnot(0, 1)], 0, 1)
    backward = gates_matrix([cnot(1, 0)], 0, 1)
    assert np.allclose(backward, SWAP @ forward @ SWAP)


def test_zyz_reconstructs_single_qubit_unitary():
    u = scipy.stats.unitary_group.rvs(2, random_state=3)
    a, b, c = zyz_angles(u)
    rz = lambda t: np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
    assert equal_up_to_phase(rz(a) @ ry(b) @ rz(c), u)


def test_json_preserves_gates_and_layers():
    c = Circuit(3)
    c.add_layer([Gate(GateKind.RX, (0,), 0.25), cnot(0, 1)], origin=1, skipped_bonds=[2])
    c.add_layer([Gate(GateKind.U2Q, (1, 2), unitary=_haar(1))], origin=2)
    back = Circuit.from_json(c.to_json())
    assert back.gates == c.gates
    assert back.layers == c.layers
    assert np.allclose(back.gates[-1].unitary, c.gates[-1].unitary)
