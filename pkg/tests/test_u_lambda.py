import numpy as np
import pytest

from mpsencode.circuitgen import GateKind, gates_matrix, initial_params, optimize_u_lambda, synthesize_u_lambda, variational_gates
from mpsencode.circuitgen.u_lambda import N_PARAMS, N_PARAMS_REAL, _purity_objective, central_block, u_lambda_matrix
from mpsencode.errors import PreconditionError
from mpsencode.funcspace import Grid, discretize, gaussian_oracle


def _prepared(gates):
    return gates_matrix(gates, 0, 1)[:, 0]


def test_equal_weights_give_bell_state():
    state = _prepared(synthesize_u_lambda([2**-0.5, 2**-0.5]))
    assert np.allclose(state, np.array([1, 0, 0, 1]) / np.sqrt(2))


def test_vanishing_second_value_needs_no_gate():
    assert synthesize_u_lambda([1.0, 0.0]) == []
    assert synthesize_u_lambda([1.0]) == []


@pytest.mark.parametrize("real_mode", [False, True])
def test_initial_params_reproduce_first_layer(real_mode):
    lam = np.array([0.9, np.sqrt(1 - 0.81)])
    params = initial_params(lam, real_mode)
    assert params.size == (N_PARAMS_REAL if real_mode else N_PARAMS)
    state = u_lambda_matrix(params, real_mode)[:, 0]
    assert np.allclose(state, [lam[0], 0, 0, lam[1]], atol=1e-12)


def test_ansatz_uses_two_cnots_on_requested_pair():
    gates = variational_gates(np.linspace(0.1, 1.4, N_PARAMS), 3, 4)
    cnots = [g for g in gates if g.kind is GateKind.CNOT]
    assert [g.qubits for g in cnots] == [(3, 4), (3, 4)]
    real = variational_gates(np.linspace(0.1, 0.6, N_PARAMS_REAL), 3, 4, real_mode=True)
    assert {g.kind for g in real} == {GateKind.RY, GateKind.CNOT}


def test_wrong_parameter_count_is_rejected():
    with pytest.raises(PreconditionError):
        variational_gates(np.zeros(5), 0, 1)
    with pytest.raises(PreconditionError):
        variational_gates(np.zeros(N_PARAMS), 0, 1, real_mode=True)


def test_optimizer_never_worse_than_start(vector_mps):
    v = discretize(gaussian_oracle(0.3, 0.07), Grid(8, 1.0))
    state = vector_mps(v)
    origin = 4
    init = initial_params(state.schmidt[origin - 1][:2])
    objective = _purity_objective(central_block(state, origin))
    best = optimize_u_lambda(state, origin, init, budget=200)
    assert objective(u_lambda_matrix(best)) <= objective(u_lambda_matrix(init)) + 1e-12


def test_optimizer_rejects_empty_budget(sin_mps):
    with pytest.raises(PreconditionError):
        optimize_u_lambda(sin_mps(6), 3, initial_params([0.9, 0.1]), budget=0)
