import numpy as np
import pytest

from mpsencode.circuitgen import GateKind, build_encoding_circuit, circuit_metrics
from mpsencode.errors import PreconditionError
from mpsencode.funcspace import Grid, discretize, exp_oracle
from mpsencode.mpscore import dense_fidelity, mps_from_vector
from mpsencode.simulate import apply_dense


def _prepared(circuit):
    zero = np.zeros(1 << circuit.n_qubits, dtype=np.complex128)
    zero[0] = 1.0
    return apply_dense(circuit, zero)


def test_bond_two_state_takes_one_layer(sin_mps):
    m = sin_mps(8)
    result = build_encoding_circuit(m, n_layers=1, eps_trunc=0.0)
    assert result.fidelity > 1 - 1e-9
    assert dense_fidelity(_prepared(result.circuit), m.to_vector()) > 1 - 1e-9
    assert len(result.circuit.layers) == 1
    assert result.trace_rows()[0]["layer"] == 1


def test_product_state_needs_no_entangling_gates(vector_mps):
    m = vector_mps(discretize(exp_oracle(-0.7), Grid(7, 1.0)))
    result = build_encoding_circuit(m, n_layers=1)
    assert circuit_metrics(result.circuit).cnot_count == 0
    assert result.fidelity > 1 - 1e-12


def test_second_layer_never_hurts(normal_mps):
    m = normal_mps(10)
    one = build_encoding_circuit(m, n_layers=1, u_lambda_budget=100)
    two = build_encoding_circuit(m, n_layers=2, u_lambda_budget=100)
    assert two.fidelity >= one.fidelity - 1e-9
    assert two.fidelity_trace[1] >= two.fidelity_trace[0] - 1e-9
    assert len(two.origins) == 2
    assert two.fidelity == pytest.approx(dense_fidelity(_prepared(two.circuit), m.to_vector()), abs=1e-9)


def test_circuit_lists_last_layer_first(normal_mps):
    result = build_encoding_circuit(normal_mps(8), n_layers=2, origin_policy=3, u_lambda_budget=50)
    assert result.origins == [3, 3]
    assert [info.origin for info in result.circuit.layers] == [3, 3]
    assert result.circuit.layers[0].start == 0
    assert result.circuit.layers[-1].stop == len(result.circuit)
    assert all(g.kind in (GateKind.RY, GateKind.CNOT) for g in result.circuit.gates)


@pytest.mark.parametrize(
    "kwargs",
    [{"n_layers": 0}, {"eps_trunc": -1.0}, {"origin_policy": 8}, {"origin_policy": "middle"}],
)
def test_invalid_arguments(sin_mps, kwargs):
    with pytest.raises(PreconditionError):
        build_encoding_circuit(sin_mps(8), **kwargs)


def test_single_qubit_register():
    v = discretize(exp_oracle(1.0), Grid(1, 1.0))
    result = build_encoding_circuit(mps_from_vector(v), n_layers=3)
    assert result.circuit.n_qubits == 1
    assert result.fidelity == 1.0
    assert dense_fidelity(_prepared(result.circuit), v) > 1 - 1e-12


def test_parallel_scan_matches_serial(normal_mps):
    m = normal_mps(8)
    serial = build_encoding_circuit(m, n_layers=2, u_lambda_budget=50, workers=1)
    parallel = build_encoding_circuit(m, n_layers=2, u_lambda_budget=50, workers=2)
    assert parallel.origins == serial.origins
    assert parallel.circuit.gates == serial.circuit.gates
    assert parallel.fidelity == serial.fidelity


def test_sin_spectrum_layer_uses_few_cnots(sin_mps):
    result = build_encoding_circuit(sin_mps(8), n_layers=1, origin_policy=4, eps_trunc=0.0)
    metrics = circuit_metrics(result.circuit)
    assert metrics.cnot_count <= 1 + 2 * 6
    assert metrics.two_qubit_depth <= 1 + 2 * 3


def test_finer_eps_trunc_never_loses_fidelity_or_gates(normal_mps):
    m = normal_mps(9)
    sweep = [1e-2, 1e-3, 1e-4, 1e-6, 0.0]
    results = [build_encoding_circuit(m, n_layers=2, eps_trunc=eps, u_lambda_budget=100) for eps in sweep]
    fidelities = [r.fidelity for r in results]
    cnots = [circuit_metrics(r.circuit.lowered()).cnot_count for r in results]
    assert fidelities == sorted(fidelities)
    assert cnots == sorted(cnots)
    assert all(r.metadata["eps_trunc_kept"] >= eps for r, eps in zip(results, sweep))


def test_kept_run_is_the_one_reported(sin_mps):
    m = sin_mps(8)
    result = build_encoding_circuit(m, n_layers=1, origin_policy=4, eps_trunc=1e-4)
    assert result.metadata["eps_trunc"] == 1e-4
    assert result.fidelity == pytest.approx(dense_fidelity(_prepared(result.circuit), m.to_vector()), abs=1e-9)
