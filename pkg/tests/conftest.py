import logging

import numpy as np
import pytest

from mpsencode.config import get_settings
from mpsencode.funcspace import DistributionKind, DistributionSpec, Grid, discretize, sin_oracle, sqrt_pdf_oracle
from mpsencode.mpscore import canonicalize, mps_from_vector


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Every test gets its own log and output directories."""
    monkeypatch.setenv("MPSENCODE_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("MPSENCODE_OUTPUT_DIR", str(tmp_path / "runs"))
    monkeypatch.delenv("MPSENCODE_WORKERS", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(autouse=True)
def restore_log_handlers():
    """Drop handlers that configure_logging attached during a test."""
    root = logging.getLogger()
    before = list(root.handlers)
    level = root.level
    yield
    for handler in list(root.handlers):
        if handler not in before and (handler.get_name() or "").startswith("mpsencode_"):
            root.removeHandler(handler)
            handler.close()
    root.setLevel(level)


def _vector_mps(v, chi_max=64):
    return canonicalize(mps_from_vector(v, chi_max=chi_max), 0)


@pytest.fixture
def vector_mps():
    """Canonical MPS (centre 0) of a unit-norm dense vector."""
    return _vector_mps


@pytest.fixture
def sin_mps():
    def build(n: int):
        return _vector_mps(discretize(sin_oracle(1.0), Grid(n, 1.0)))

    return build


@pytest.fixture
def normal_dist():
    return DistributionSpec(DistributionKind.NORMAL, mu=0.5, scale=0.125, support_length=1.0)


@pytest.fixture
def normal_mps(normal_dist):
    def build(n: int, chi_max: int = 64):
        return _vector_mps(discretize(sqrt_pdf_oracle(normal_dist), Grid(n, normal_dist.L)), chi_max)

    return build


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(1234))
