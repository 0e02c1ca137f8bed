import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpsencode.analytic import integrate
from mpsencode.errors import (
    DegenerateInputError,
    DomainError,
    EvaluationError,
    PreconditionError,
    SizeLimitError,
    UnsupportedTruncationError,
)
from mpsencode.funcspace import (
    CountingOracle,
    DistributionKind,
    DistributionSpec,
    FunctionOracle,
    Grid,
    constant_oracle,
    discretize,
    distribution_cdf,
    exp_oracle,
    gaussian_oracle,
    grid_mass,
    polynomial_oracle,
    sin_oracle,
    sqrt_pdf_oracle,
    step_oracle,
    truncated_cdf,
    truncation_mass,
)


def test_grid_is_big_endian():
    grid = Grid(3, 2.0)
    assert grid.step == 0.25
    assert grid.x_of_bits(np.array([1, 0, 1])) == pytest.approx(2.0 * (0.5 + 0.125))
    assert grid.bits_of_index(5).tolist() == [1, 0, 1]


@given(n=st.integers(1, 20), index=st.integers(0, 2**20 - 1))
def test_bits_index_consistency(n, index):
    grid = Grid(n, 1.0)
    index %= grid.size
    bits = grid.bits_of_index(index)
    assert int(grid.index_of_bits(bits)) == index
    assert grid.x_of_bits(bits) == pytest.approx(float(grid.x_of_index(index)))


@pytest.mark.parametrize("n", [0, 65])
def test_grid_rejects_qubit_counts(n):
    with pytest.raises(PreconditionError):
        Grid(n, 1.0)


def test_dense_grid_limit():
    with pytest.raises(SizeLimitError):
        Grid(30, 1.0).points()


def test_discretize_normalizes():
    v = discretize(constant_oracle(), Grid(6, 1.0))
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert np.allclose(v, 1.0 / 8.0)


def test_discretize_rejects_zero_function():
    zero = FunctionOracle(lambda x: np.zeros_like(x), 1.0)
    with pytest.raises(DegenerateInputError):
        discretize(zero, Grid(4, 1.0))


def test_non_finite_oracle_reports_point():
    bad = FunctionOracle(lambda x: 1.0 / (x - 0.5), 1.0, name="pole")
    with pytest.raises(EvaluationError) as err:
        bad(np.array([0.25, 0.5]))
    assert err.value.x == 0.5


def test_stencil_derivatives_match_analytic():
    f = FunctionOracle(lambda x: np.sin(3 * x), 1.0)
    x = np.array([0.0, 0.3, 0.5, 1.0])
    assert np.allclose(f.derivative(1, x), 3 * np.cos(3 * x), atol=1e-6)
    assert np.allclose(f.derivative(2, x), -9 * np.sin(3 * x), atol=1e-4)


def test_counting_oracle_counts_points():
    counted = CountingOracle(constant_oracle())
    counted(np.zeros(7))
    counted(0.5)
    assert counted.calls == 8


def test_sqrt_pdf_is_normalized_on_support(normal_dist):
    grid = Grid(12, normal_dist.L)
    assert grid_mass(normal_dist, grid) / truncation_mass(normal_dist) == pytest.approx(1.0, abs=1e-6)
    oracle = sqrt_pdf_oracle(normal_dist)
    values = oracle(grid.points())
    assert np.sum(values**2) * grid.step == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize(
    "dist",
    [
        DistributionSpec(DistributionKind.NORMAL, mu=0.5, scale=0.2),
        DistributionSpec(DistributionKind.LEVY, scale=1.0, support_length=16.0),
        DistributionSpec(DistributionKind.LOG_NORMAL, mu=0.0, scale=0.5, support_length=4.0),
        DistributionSpec(DistributionKind.GAMMA, shape=2.0, scale=0.5, support_length=5.0),
    ],
)
def test_truncated_cdf_spans_unit_interval(dist):
    assert truncated_cdf(dist, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert truncated_cdf(dist, dist.L) == pytest.approx(1.0)
    x = np.linspace(0.0, dist.L, 33)
    assert np.all(np.diff(truncated_cdf(dist, x)) >= 0)


def test_cdf_outside_support_raises(normal_dist):
    with pytest.raises(DomainError):
        distribution_cdf(normal_dist, 1.5)


def test_vanishing_truncation_mass_is_rejected():
    far = DistributionSpec(DistributionKind.NORMAL, mu=100.0, scale=0.1)
    with pytest.raises(UnsupportedTruncationError):
        sqrt_pdf_oracle(far)


def test_distribution_parameters_are_validated():
    with pytest.raises(PreconditionError):
        DistributionSpec(DistributionKind.NORMAL, scale=0.0)


@settings(max_examples=25)
@given(x=st.floats(0.01, 0.99))
def test_sqrt_pdf_derivatives_match_stencil(x):
    dist = DistributionSpec(DistributionKind.LEVY, scale=0.4)
    oracle = sqrt_pdf_oracle(dist)
    stencil = FunctionOracle(oracle.eval, oracle.support_length)
    assert oracle.derivative(1, x)[0] == pytest.approx(stencil.derivative(1, x)[0], rel=1e-5, abs=1e-6)


@pytest.mark.parametrize(
    "oracle",
    [
        constant_oracle(2.0),
        sin_oracle(3.0),
        exp_oracle(-2.0),
        exp_oracle(0.0),
        gaussian_oracle(0.4, 0.1),
        polynomial_oracle([1.0, -2.0, 0.5]),
        sqrt_pdf_oracle(DistributionSpec(DistributionKind.GAMMA, shape=3.0, scale=1.0, support_length=12.0)),
    ],
    ids=lambda o: o.name,
)
def test_declared_l2_norm_matches_quadrature(oracle):
    squared = integrate(lambda x: oracle(x) ** 2, 0.0, oracle.support_length)
    assert oracle.l2_norm == pytest.approx(np.sqrt(squared), rel=1e-9)


def test_step_norm_is_length_of_its_support():
    assert step_oracle(0.25).l2_norm == pytest.approx(np.sqrt(0.75))
    assert step_oracle(-1.0).l2_norm == pytest.approx(1.0)
