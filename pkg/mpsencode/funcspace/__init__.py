from .distributions import (
    DistributionKind,
    DistributionSpec,
    distribution_cdf,
    grid_mass,
    pdf,
    sqrt_pdf_oracle,
    truncated_cdf,
    truncation_mass,
)
from .grid import Grid
from .oracle import (
    CountingOracle,
    FunctionOracle,
    constant_oracle,
    discretize,
    exp_oracle,
    gaussian_oracle,
    polynomial_oracle,
    sin_oracle,
    step_oracle,
)

__all__ = [
    "CountingOracle",
    "DistributionKind",
    "DistributionSpec",
    "FunctionOracle",
    "Grid",
    "constant_oracle",
    "discretize",
    "distribution_cdf",
    "exp_oracle",
    "gaussian_oracle",
    "grid_mass",
    "pdf",
    "polynomial_oracle",
    "sin_oracle",
    "sqrt_pdf_oracle",
    "step_oracle",
    "truncated_cdf",
    "truncation_mass",
]
