from .closed_forms import closed_form_g1, closed_form_g2, window_start
from .functionals import InnerProducts, g1, g1_from, g2, g2_from, inner_h, inner_products
from .quadrature import gauss_legendre, integrate
from .spectra import (
    AsymptoticPrediction,
    EntropyBoundResult,
    SpectrumPrediction,
    eigenvalue_scaling,
    entropy_bound_check,
    hilbert_det_ratio,
    one_layer_infidelity_estimate,
    predict_profile,
    predicted_entropy,
    predicted_spectrum,
    purity_residuals,
)

__all__ = [
    "AsymptoticPrediction",
    "EntropyBoundResult",
    "InnerProducts",
    "SpectrumPrediction",
    "closed_form_g1",
    "closed_form_g2",
    "eigenvalue_scaling",
    "entropy_bound_check",
    "g1",
    "g1_from",
    "g2",
    "g2_from",
    "gauss_legendre",
    "hilbert_det_ratio",
    "inner_h",
    "inner_products",
    "integrate",
    "one_layer_infidelity_estimate",
    "predict_profile",
    "predicted_entropy",
    "predicted_spectrum",
    "purity_residuals",
    "window_start",
]
