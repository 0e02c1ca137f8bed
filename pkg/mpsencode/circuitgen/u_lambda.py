"""The central two-qubit gate of a V-layer.

On the first layer it prepares sum_i Lambda_i |ii> from |00> with one CNOT.
On later layers it is a 2-CNOT sandwich whose angles are tuned to
disentangle the central bond of the residual state.
"""
from __future__ import annotations

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
import scipy.optimize

from ..errors import PreconditionError
from ..mpscore.decompose import move_center
from ..mpscore.mps import Mps
from .gates import Gate, GateKind, cnot, rotation
from .two_qubit import gates_matrix

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 500
N_PARAMS = 14
N_PARAMS_REAL = 6
SIMPLEX_STEP = 0.2

# Index of the middle RY angle on the control qubit.
_MID_INDEX = 6
_MID_INDEX_REAL = 2


def _theta(schmidt: Sequence[float]) -> float:
    lam = np.asarray(schmidt, dtype=np.float64)
    if lam.ndim != 1 or not 1 <= lam.size <= 2:
        raise PreconditionError("u_lambda needs one or two Schmidt values")
    norm = float(np.linalg.norm(lam))
    if norm == 0.0:
        raise PreconditionError("Schmidt values must not all vanish")
    second = lam[1] / norm if lam.size == 2 else 0.0
    return 2.0 * math.atan2(second, lam[0] / norm)


def initial_params(schmidt: Sequence[float], real_mode: bool = False) -> np.ndarray:
    """Angles of the variational ansatz that reproduce the first-layer gate."""
    params = np.zeros(N_PARAMS_REAL if real_mode else N_PARAMS)
    params[_MID_INDEX_REAL if real_mode else _MID_INDEX] = _theta(schmidt)
    return params


def _block(qubit: int, angles: Sequence[float], real_mode: bool) -> List[Optional[Gate]]:
    if real_mode:
        return [rotation(GateKind.RY, qubit, angles[0])]
    return [
        rotation(GateKind.RZ, qubit, angles[0]),
        rotation(GateKind.RY, qubit, angles[1]),
        rotation(GateKind.RZ, qubit, angles[2]),
    ]


def variational_gates(params: Sequence[float], a: int, b: int, real_mode: bool = False) -> List[Gate]:
    """Ansatz gates on control a and target b.

    Layout (complex): [pre_a(3), pre_b(3), mid_a, mid_b, post_a(3), post_b(3)],
    each block RZ RY RZ in time order, the middle RY on a and RZ on b.
    Real mode keeps only the RY slots: [pre_a, pre_b, mid_a, mid_b, post_a, post_b].
    """
    p = np.asarray(params, dtype=np.float64)
    if real_mode:
        if p.size != N_PARAMS_REAL:
            raise PreconditionError(f"real ansatz takes {N_PARAMS_REAL} angles, got {p.size}")
        pre = _block(a, p[0:1], True) + _block(b, p[1:2], True)
        mid = [rotation(GateKind.RY, a, p[2]), rotation(GateKind.RY, b, p[3])]
        post = _block(a, p[4:5], True) + _block(b, p[5:6], True)
    else:
        if p.size != N_PARAMS:
            raise PreconditionError(f"ansatz takes {N_PARAMS} angles, got {p.size}")
        pre = _block(a, p[0:3], False) + _block(b, p[3:6], False)
        mid = [rotation(GateKind.RY, a, p[6]), rotation(GateKind.RZ, b, p[7])]
        post = _block(a, p[8:11], False) + _block(b, p[11:14], False)
    gates = pre + [cnot(a, b)] + mid + [cnot(a, b)] + post
    return [g for g in gates if g is not None]


def synthesize_u_lambda(
    schmidt: Sequence[float],
    a: int = 0,
    b: int = 1,
    params: Optional[Sequence[float]] = None,
    real_mode: bool = False,
) -> List[Gate]:
    """First-layer gate when `params` is None, else the variational ansatz.

    The first-layer form is RY(2 atan2(Lambda_2, Lambda_1)) on a then CNOT(a, b),
    and is empty when Lambda_2 vanishes.
    """
    if params is not None:
        return variational_gates(params, a, b, real_mode)
    g = rotation(GateKind.RY, a, _theta(schmidt))
    if g is None:
        return []
    return [g, cnot(a, b)]


def u_lambda_matrix(params: Sequence[float], real_mode: bool = False) -> np.ndarray:
    """4x4 matrix of the ansatz on the local pair (0, 1)."""
    return gates_matrix(variational_gates(params, 0, 1, real_mode), 0, 1)


def central_block(state: Mps, origin: int) -> np.ndarray:
    """Two-site block theta[a, s1, s2, b] on qubits (origin - 1, origin) with canonical outer sites."""
    if not 1 <= origin <= state.n_qubits - 1:
        raise PreconditionError(f"origin {origin} outside bonds 1..{state.n_qubits - 1}")
    m = move_center(state, origin - 1)
    return np.einsum("asb,btc->astc", m.tensors[origin - 1], m.tensors[origin])


def _purity_objective(theta: np.ndarray):
    chi_l, _, _, chi_r = theta.shape

    def objective(u: np.ndarray) -> float:
        rotated = np.einsum("xyst,astb->axyb", u.conj().T.reshape(2, 2, 2, 2), theta)
        s = np.linalg.svd(rotated.reshape(chi_l * 2, 2 * chi_r), compute_uv=False)
        w = s**2
        w = w / w.sum()
        purity = float(np.sum(w * w))
        return -math.log(max(purity, 1e-300))

    return objective


def optimize_u_lambda(
    state: Mps,
    origin: int,
    init: Sequence[float],
    budget: int = DEFAULT_BUDGET,
    real_mode: bool = False,
) -> np.ndarray:
    """Nelder-Mead minimisation of -log(purity) across the central bond after u^dagger.

    `state` is the residual with the layer staircases already undone, so only
    the pair (origin - 1, origin) is left to disentangle. The best parameters seen are
    returned, so the objective never exceeds its value at `init`.
    """
    if budget < 1:
        raise PreconditionError("budget must be positive")
    objective = _purity_objective(central_block(state, origin))
    init = np.asarray(init, dtype=np.float64)

    best = {"x": init.copy(), "f": objective(u_lambda_matrix(init, real_mode))}
    start = best["f"]
    if start <= 1e-14:
        return init

    def tracked(x: np.ndarray) -> float:
        f = objective(u_lambda_matrix(x, real_mode))
        if f < best["f"]:
            best["x"], best["f"] = x.copy(), f
        return f

    simplex = np.vstack([init, init + SIMPLEX_STEP * np.eye(init.size)])
    scipy.optimize.minimize(
        tracked,
        init,
        method="Nelder-Mead",
        options={
            "maxfev": budget,
            "xatol": 1e-10,
            "fatol": 1e-14,
            "adaptive": init.size > 6,
            "initial_simplex": simplex,
        },
    )
    logger.debug(
        "u_lambda objective %.3e -> %.3e in at most %d evaluations",
        start,
        best["f"],
        budget,
        extra={"infidelity": best["f"]},
    )
    return best["x"]
