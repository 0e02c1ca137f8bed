import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpsencode.errors import DegenerateInputError, LengthMismatchError, PreconditionError
from mpsencode.funcspace import Grid, discretize, exp_oracle, sin_oracle
from mpsencode.mpscore import (
    Mps,
    canonicalize,
    dense_fidelity,
    entanglement_profile,
    fidelity,
    inner,
    move_center,
    mps_from_vector,
    product_state,
    profile_rows,
    reduced_density_matrix,
    schmidt_values,
    split_at_bond,
    truncate,
)


def _random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def test_decomposition_reproduces_vector(rng):
    v = _random_state(rng, 8)
    m = mps_from_vector(v, chi_max=1 << 8)
    assert np.allclose(m.to_vector(), v, atol=1e-10)
    assert m.canonical_center == 7


def test_spectra_match_dense_svd(rng):
    v = _random_state(rng, 6)
    m = mps_from_vector(v)
    for k in range(1, 6):
        dense = schmidt_values(v, k)
        assert np.allclose(m.schmidt[k - 1], dense[: len(m.schmidt[k - 1])], atol=1e-12)


def test_exponential_is_a_product_state():
    v = discretize(exp_oracle(2.0), Grid(10, 1.0))
    m = mps_from_vector(v, eps_svd=1e-20)
    assert m.bond_dims == [1] * 9


def test_sin_spectrum_closed_form():
    n = 16
    v = discretize(sin_oracle(1.0), Grid(n, 1.0))
    m = mps_from_vector(v)
    for k in range(4, 13):
        rho = np.sort(m.schmidt[k - 1] ** 2)[::-1]
        shift = 2.0**k / (2 * math.pi) * math.sin(math.pi / 2.0**k)
        assert rho[0] == pytest.approx(0.5 + shift, abs=1e-9)
        assert rho[1] == pytest.approx(0.5 - shift, abs=1e-9)
    small = m.schmidt[9][1] ** 2
    assert small == pytest.approx(math.pi**2 / (12 * 4.0**10), rel=0.03)


def test_canonical_sites_are_isometries(rng):
    m = canonicalize(mps_from_vector(_random_state(rng, 6)), 3)
    for k, t in enumerate(m.tensors):
        if k < 3:
            mat = t.reshape(-1, t.shape[2])
            assert np.allclose(mat.conj().T @ mat, np.eye(t.shape[2]), atol=1e-10)
        elif k > 3:
            mat = t.reshape(t.shape[0], -1)
            assert np.allclose(mat @ mat.conj().T, np.eye(t.shape[0]), atol=1e-10)


@pytest.mark.parametrize("center", [0, 2, 4])
def test_canonicalize_keeps_the_norm(rng, center):
    v = 2.0 * _random_state(rng, 5)
    m = mps_from_vector(v / 2.0)
    doubled = m.with_tensors((2.0 * m.tensors[0],) + m.tensors[1:])
    c = canonicalize(doubled, center)
    assert np.allclose(c.to_vector(), v, atol=1e-12)
    assert c.norm() == pytest.approx(2.0)
    assert all(np.linalg.norm(s) == pytest.approx(1.0) for s in c.schmidt)


def test_canonicalize_rejects_the_zero_state():
    zero = Mps((np.zeros((1, 2, 1)), np.zeros((1, 2, 1))))
    with pytest.raises(DegenerateInputError):
        canonicalize(zero)


def test_move_center_keeps_state(rng):
    v = _random_state(rng, 5)
    m = canonicalize(mps_from_vector(v), 0)
    moved = move_center(m, 4)
    assert moved.canonical_center == 4
    assert dense_fidelity(moved.to_vector(), v) == pytest.approx(1.0)


def test_truncation_caps_bonds_and_normalizes(rng):
    m = mps_from_vector(_random_state(rng, 8), chi_max=256)
    t = truncate(m, 2)
    assert t.max_bond <= 2
    assert t.norm() == pytest.approx(1.0)
    per_bond = truncate(m, [1, 2, 2, 2, 2, 2, 1])
    assert per_bond.bond_dims[0] == 1 and per_bond.bond_dims[-1] == 1


def test_truncation_rejects_bad_caps(rng):
    m = mps_from_vector(_random_state(rng, 4))
    with pytest.raises(PreconditionError):
        truncate(m, [2, 2])


def test_split_at_bond_reassembles(rng):
    v = _random_state(rng, 6)
    m = mps_from_vector(v)
    split = split_at_bond(m, 2)
    assert np.allclose(split.schmidt, schmidt_values(v, 2)[: len(split.schmidt)], atol=1e-12)
    rebuilt = Mps(tuple(split.tensors()))
    assert dense_fidelity(rebuilt.to_vector(), v) == pytest.approx(1.0)


def test_amplitudes_agree_with_dense(rng):
    v = _random_state(rng, 7)
    m = mps_from_vector(v)
    assert m.amplitude([1, 0, 1, 1, 0, 0, 1]) == pytest.approx(v[0b1011001])
    bits = Grid(7, 1.0).bits_of_index(np.arange(128))
    assert np.allclose(m.amplitudes(bits), v)


def test_fidelity_and_inner(rng):
    a = mps_from_vector(_random_state(rng, 5))
    assert fidelity(a, a) == pytest.approx(1.0)
    assert abs(inner(product_state([0] * 5), product_state([1] * 5))) == 0.0
    with pytest.raises(LengthMismatchError):
        inner(a, product_state([0] * 4))


def test_rejects_unnormalized_input():
    with pytest.raises(PreconditionError):
        mps_from_vector(np.ones(8))


def test_profile_of_sin(sin_mps):
    profile = entanglement_profile(sin_mps(10))
    assert profile.n_bonds == 9
    assert np.all(profile.purities <= 1.0 + 1e-12)
    rows = profile_rows(profile)
    assert {"bond", "i", "lambda", "purity", "entropy"} <= rows[0].keys()
    assert profile.residual_weight(5) == pytest.approx(profile.coefficient(5, 1) ** 2)


def test_reduced_density_matrix_trace(rng):
    v = _random_state(rng, 6)
    rho = reduced_density_matrix(v, 3)
    assert rho.shape == (8, 8)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.allclose(np.linalg.eigvalsh(rho)[::-1], schmidt_values(v, 3) ** 2, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(2, 7), chi=st.integers(1, 4))
def test_bond_gauge_leaves_state_and_spectra_unchanged(seed, n, chi):
    rng = np.random.default_rng(seed)
    dims = [1] + [chi] * (n - 1) + [1]
    tensors = [rng.normal(size=(dims[k], 2, dims[k + 1])) for k in range(n)]
    m = Mps(tuple(tensors))
    bond = int(rng.integers(1, n))
    q, _ = np.linalg.qr(rng.normal(size=(chi, chi)))
    x = q @ np.diag(rng.uniform(0.5, 2.0, size=chi))
    gauged = list(tensors)
    gauged[bond - 1] = np.einsum("asb,bc->asc", tensors[bond - 1], x)
    gauged[bond] = np.einsum("ab,bsc->asc", np.linalg.inv(x), tensors[bond])
    other = Mps(tuple(gauged))
    assert np.allclose(other.to_vector(), m.to_vector(), atol=1e-9 * np.linalg.norm(m.to_vector()))
    a, b = canonicalize(m), canonicalize(other)
    for sa, sb in zip(a.schmidt, b.schmidt):
        k = min(len(sa), len(sb))
        assert np.allclose(sa[:k], sb[:k], atol=1e-9)
