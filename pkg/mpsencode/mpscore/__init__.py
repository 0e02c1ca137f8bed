from .decompose import (
    MixedCanonical,
    canonicalize,
    move_center,
    mps_from_vector,
    schmidt_values,
    split_at_bond,
    truncate,
)
from .entanglement import (
    EntanglementProfile,
    entanglement_profile,
    profile_from_spectra,
    profile_rows,
    reduced_density_matrix,
)
from .mps import Mps, product_state, zero_state
from .overlap import dense_fidelity, fidelity, inner

__all__ = [
    "EntanglementProfile",
    "MixedCanonical",
    "Mps",
    "canonicalize",
    "dense_fidelity",
    "entanglement_profile",
    "fidelity",
    "inner",
    "move_center",
    "mps_from_vector",
    "product_state",
    "profile_from_spectra",
    "profile_rows",
    "reduced_density_matrix",
    "schmidt_values",
    "split_at_bond",
    "truncate",
    "zero_state",
]
