import numpy as np
import pytest

from mpsencode.errors import PreconditionError
from mpsencode.funcspace import (
    DistributionKind,
    DistributionSpec,
    FunctionOracle,
    Grid,
    discretize,
    exp_oracle,
    sin_oracle,
    sqrt_pdf_oracle,
)
from mpsencode.mpscore import dense_fidelity
from mpsencode.tci import TciConfig, grid_norm, maxvol, tci_build, tci_error_estimate


def test_normal_matches_dense_decomposition(normal_dist):
    grid = Grid(12, normal_dist.L)
    oracle = sqrt_pdf_oracle(normal_dist)
    m = tci_build(oracle, grid, TciConfig(max_rank=16))
    assert dense_fidelity(m.to_vector(), discretize(oracle, grid)) > 1 - 1e-8
    assert m.metadata["oracle_calls"] <= m.metadata["call_bound"]
    assert m.norm() == pytest.approx(1.0)


def test_sin_needs_rank_two():
    grid = Grid(10, 1.0)
    m = tci_build(sin_oracle(), grid)
    assert m.max_bond == 2
    assert dense_fidelity(m.to_vector(), discretize(sin_oracle(), grid)) == pytest.approx(1.0, abs=1e-12)


def test_complex_oracle():
    f = FunctionOracle(lambda x: np.exp(2j * np.pi * x) * np.sin(np.pi * x), 1.0, is_real=False, name="chirp", l2_norm=np.sqrt(0.5))
    grid = Grid(8, 1.0)
    m = tci_build(f, grid)
    assert not m.is_real
    assert dense_fidelity(m.to_vector(), discretize(f, grid)) > 1 - 1e-10


def test_single_qubit_grid():
    m = tci_build(sin_oracle(), Grid(1, 1.0))
    assert m.n_qubits == 1
    assert m.metadata["sweeps"] == 0


def test_support_mismatch_is_rejected():
    with pytest.raises(PreconditionError):
        tci_build(sin_oracle(2.0), Grid(6, 1.0))


def test_config_validation():
    with pytest.raises(PreconditionError):
        TciConfig(max_rank=1)
    with pytest.raises(PreconditionError):
        TciConfig(rel_tol=0.0)


def test_call_bound_grows_with_sweeps():
    cfg = TciConfig(max_rank=8, n_error_samples=16, n_pivot_samples=32)
    assert cfg.call_bound(10, 2) == 8 * 10 * 64 * 2 + 32 + 10 + 1 + 16 * 2
    assert cfg.call_bound(10, 3) > cfg.call_bound(10, 2)


def test_maxvol_selects_dominant_rows(rng):
    a = rng.normal(size=(40, 4))
    rows = maxvol(a)
    assert len(set(rows.tolist())) == 4
    coeffs = np.linalg.solve(a[rows].T, a.T).T
    assert np.max(np.abs(coeffs)) <= 1.05 + 1e-9
    assert np.allclose(coeffs[rows], np.eye(4), atol=1e-10)


def test_maxvol_needs_tall_matrix(rng):
    with pytest.raises(PreconditionError):
        maxvol(rng.normal(size=(2, 3)))


def test_error_estimate_is_zero_for_exact_state(normal_dist, normal_mps):
    # fine enough that the grid sum matches the continuum norm to ~1e-11
    grid = Grid(14, normal_dist.L)
    estimate = tci_error_estimate(normal_mps(14), sqrt_pdf_oracle(normal_dist), grid, n=64)
    assert estimate.mean_rel < 1e-10
    assert estimate.n_samples == 64
    small = Grid(8, normal_dist.L)
    exact = np.linalg.norm(sqrt_pdf_oracle(normal_dist)(small.points()))
    assert tci_error_estimate(normal_mps(8), sqrt_pdf_oracle(normal_dist), small, norm=exact).mean_rel < 1e-12
    with pytest.raises(PreconditionError):
        tci_error_estimate(normal_mps(10), sqrt_pdf_oracle(normal_dist), Grid(9, 1.0))


@pytest.mark.slow
def test_heavy_tail_on_large_grid():
    dist = DistributionSpec(DistributionKind.LEVY, scale=1.0, support_length=16.0)
    grid = Grid(20, dist.L)
    oracle = sqrt_pdf_oracle(dist)
    m = tci_build(oracle, grid, TciConfig(max_rank=32, rel_tol=1e-7))
    assert m.metadata["oracle_calls"] < grid.size
    assert dense_fidelity(m.to_vector(), discretize(oracle, grid)) > 1 - 1e-8


def test_missing_spike_mass_is_reported(normal_dist, normal_mps):
    broad = sqrt_pdf_oracle(normal_dist)
    narrow = sqrt_pdf_oracle(DistributionSpec(DistributionKind.NORMAL, mu=0.3, scale=1e-4, support_length=1.0))
    spiked = FunctionOracle(
        lambda x: np.sqrt(0.5 * broad(x) ** 2 + 0.5 * narrow(x) ** 2), 1.0, name="spiked", l2_norm=1.0
    )
    grid = Grid(12, 1.0)
    # the state holds only the broad half of the mass
    estimate = tci_error_estimate(normal_mps(12), spiked, grid)
    assert estimate.mean_rel > 0.3
    assert tci_error_estimate(normal_mps(12), broad, grid).mean_rel < 1e-8


def test_error_estimate_ignores_global_sign(normal_dist, normal_mps):
    grid = Grid(14, normal_dist.L)
    m = normal_mps(14)
    flipped = m.with_tensors((-m.tensors[0],) + m.tensors[1:])
    assert tci_error_estimate(flipped, sqrt_pdf_oracle(normal_dist), grid).mean_rel < 1e-10


def test_grid_norm_falls_back_to_quadrature():
    grid = Grid(10, 1.0)
    declared = grid_norm(sin_oracle(), grid)
    undeclared = FunctionOracle(lambda x: np.sin(np.pi * x), 1.0)
    assert grid_norm(undeclared, grid) == pytest.approx(declared, rel=1e-10)
    assert declared == pytest.approx(np.linalg.norm(sin_oracle()(grid.points())), rel=1e-12)


@pytest.mark.parametrize("n", [8, 24, 40])
def test_exponential_is_rank_one(n):
    b = 1.5
    grid = Grid(n, 1.0)
    exact = np.sqrt(np.expm1(2 * b) / np.expm1(2 * b * grid.step))
    m = tci_build(exp_oracle(b), grid, norm=exact)
    assert m.max_bond == 1
    assert m.metadata["converged"]
    assert m.metadata["mean_rel"] < 1e-10
    assert m.metadata["max_rel"] < 1e-10


@pytest.mark.slow
def test_heavy_tail_on_forty_qubits():
    dist = DistributionSpec(DistributionKind.LEVY, scale=1.0, support_length=1e9)
    grid = Grid(40, dist.L)
    m = tci_build(sqrt_pdf_oracle(dist), grid, TciConfig(max_rank=32, rel_tol=1e-7))
    assert m.metadata["mean_rel"] < 1e-6
    assert m.metadata["oracle_calls"] <= m.metadata["call_bound"]
