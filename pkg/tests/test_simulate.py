import json
import math

import numpy as np
import pytest

from mpsencode.circuitgen import Circuit, Gate, GateKind, cnot
from mpsencode.errors import CircuitStateError, LengthMismatchError, PreconditionError
from mpsencode.mpscore import dense_fidelity, zero_state
from mpsencode.simulate import (
    DenseState,
    MpsSimulator,
    apply_circuit,
    circuit_unitary,
    marginal_probabilities,
    probabilities,
    sample,
)


def _random_circuit(rng, n, depth):
    c = Circuit(n)
    kinds = [GateKind.RX, GateKind.RY, GateKind.RZ]
    for _ in range(depth):
        for q in range(n):
            c.append(Gate(kinds[rng.integers(3)], (q,), float(rng.uniform(-np.pi, np.pi))))
        start = int(rng.integers(2))
        for q in range(start, n - 1, 2):
            c.append(cnot(q, q + 1) if rng.integers(2) else cnot(q + 1, q))
    return c


def _bell():
    return Circuit(2, [Gate(GateKind.RY, (0,), math.pi / 2), cnot(0, 1)])


def test_dense_and_mps_simulation_agree(rng):
    c = _random_circuit(rng, 6, 5)
    dense = apply_circuit(c, DenseState.zero(6)).state
    mps = apply_circuit(c, zero_state(6), chi_sim=64)
    assert not mps.truncation_warning
    assert dense_fidelity(mps.state.to_vector(), dense.to_vector()) == pytest.approx(1.0, abs=1e-12)


def test_unitary_columns_match_dense_runs(rng):
    c = _random_circuit(rng, 3, 3)
    u = circuit_unitary(c)
    assert np.allclose(u.conj().T @ u, np.eye(8), atol=1e-12)
    assert np.allclose(u[:, 0], apply_circuit(c, DenseState.zero(3)).state.vector)


def test_bell_shots_are_correlated():
    state = apply_circuit(_bell(), zero_state(2)).state
    hist = sample(state, shots=500, seed=11)
    assert set(hist.counts()) <= {"00", "11"}
    assert hist.shots == 500
    again = sample(state, shots=500, seed=11)
    assert np.array_equal(hist.bits, again.bits)


def test_dense_and_mps_sampling_share_shots(rng):
    c = _random_circuit(rng, 5, 4)
    dense = apply_circuit(c, DenseState.zero(5)).state
    mps = apply_circuit(c, zero_state(5)).state
    assert np.array_equal(sample(dense, 300, seed=3).bits, sample(mps, 300, seed=3).bits)


def test_marginals_agree(rng):
    c = _random_circuit(rng, 6, 4)
    dense = apply_circuit(c, DenseState.zero(6)).state
    mps = apply_circuit(c, zero_state(6)).state
    for n_lead in (1, 3, 6):
        assert np.allclose(marginal_probabilities(dense, n_lead), marginal_probabilities(mps, n_lead), atol=1e-12)
    assert np.allclose(marginal_probabilities(mps, 6), probabilities(mps), atol=1e-12)
    with pytest.raises(PreconditionError):
        marginal_probabilities(mps, 0)


def test_mps_gates_must_be_adjacent():
    sim = MpsSimulator(zero_state(3))
    with pytest.raises(CircuitStateError):
        sim.apply(cnot(0, 2))


def test_register_sizes_must_match():
    with pytest.raises(LengthMismatchError):
        apply_circuit(Circuit(3), zero_state(2))


def test_low_bond_cap_is_flagged(rng):
    c = _random_circuit(rng, 8, 8)
    with pytest.warns(Warning):
        result = apply_circuit(c, zero_state(8), chi_sim=1)
    assert result.truncation_warning
    assert result.discarded_weight > 0


def test_histogram_exports():
    hist = sample(apply_circuit(_bell(), DenseState.zero(2)).state, shots=64, seed=0, support_length=2.0)
    rows = hist.to_rows()
    assert sum(r["count"] for r in rows) == 64
    assert {r["x"] for r in rows} <= {0.0, 1.5}
    payload = json.loads(hist.to_json())
    assert payload["shots"] == 64 and payload["support_length"] == 2.0
    assert set(hist.x_samples(10)) <= {0.0, 1.5}
