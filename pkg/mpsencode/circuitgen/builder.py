"""Iterative disentangling: compile an MPS into stacked V-layers.

Each round truncates the residual to bond dimension 2, builds the layer that
prepares the truncation, and undoes that layer on the full residual. The
encoding circuit is the layers in reverse order of construction.
"""
from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import PreconditionError, TruncationWarning
from ..mpscore.decompose import canonicalize, truncate
from ..mpscore.entanglement import entanglement_profile
from ..mpscore.mps import Mps, zero_state
from ..mpscore.overlap import fidelity as mps_fidelity
from ..simulate.mps_sim import DEFAULT_CHI_SIM, MpsSimulator
from ..simulate.state import TRUNCATION_WARNING_THRESHOLD
from .circuit import Circuit, merge_rotations
from .gates import Gate
from .layers import VLayer, exact_layer_from_chi2
from .metrics import circuit_metrics
from .u_lambda import DEFAULT_BUDGET, initial_params, optimize_u_lambda, synthesize_u_lambda

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12

# thresholds every build steps down through before its own eps_trunc
EPS_LADDER = tuple(float(f"1e-{k}") for k in range(1, 13))

OriginPolicy = Union[str, int]


@dataclass(frozen=True)
class _Candidate:
    layer: VLayer
    residual: Mps
    fidelity: float
    discarded_weight: float


@dataclass
class EncodingResult:
    circuit: Circuit
    fidelity_trace: List[float]
    origins: List[int]
    fidelity: float
    discarded_weight: float = 0.0
    truncation_warning: bool = False
    metadata: Dict[str, Any] = field(default_factory=dict)

    def trace_rows(self) -> List[Dict[str, Any]]:
        """One row per layer in construction order."""
        skipped = [info.skipped_bonds for info in reversed(self.circuit.layers)]
        return [
            {"layer": i + 1, "origin": o, "fidelity": f, "skipped_bonds": len(s)}
            for i, (o, f, s) in enumerate(zip(self.origins, self.fidelity_trace, skipped))
        ]

    def log_summary(self) -> None:
        logger.info(
            "Encoding circuit: %d layers, %d gates, fidelity %.9f",
            len(self.origins),
            len(self.circuit),
            self.fidelity,
            extra={
                "layer": len(self.origins),
                "fidelity": self.fidelity,
                "infidelity": 1.0 - self.fidelity,
                "discarded_weight": self.discarded_weight,
            },
        )


def _undo(gates: Sequence[Gate], state: Mps, chi_sim: int) -> Tuple[Mps, float]:
    """Apply the inverse of a gate sequence to `state`."""
    sim = MpsSimulator(state, chi_sim)
    for g in reversed(gates):
        sim.apply(g.inverse())
    return sim.state(), sim.discarded_weight


def _overlap_with_zero(state: Mps) -> float:
    amp = state.amplitude(np.zeros(state.n_qubits, dtype=np.intp))
    return float(abs(amp) ** 2)


def _bond_caps(residual: Mps, eps_trunc: float) -> Tuple[int, ...]:
    profile = entanglement_profile(residual)
    return tuple(1 if profile.residual_weight(k) < eps_trunc else 2 for k in range(1, residual.n_qubits))


@dataclass(frozen=True)
class _Round:
    residual: Mps
    first: bool
    caps: Tuple[int, ...]
    chi_sim: int
    budget: int
    real_mode: bool

    def candidate(self, origin: int) -> _Candidate:
        # 1. Truncate the residual to bond dimension 2, dropping the capped bonds.
        m2 = truncate(self.residual, list(self.caps))

        # 2. Exact layer for the truncation.
        layer = exact_layer_from_chi2(m2, origin, real_mode=self.real_mode)

        # 3. Undo the staircases, then pick the best central gate.
        stairs_undone, stair_weight = _undo(layer.staircase, self.residual, self.chi_sim)
        u_options = [layer.u_gates]
        if not self.first and len(layer.schmidt) == 2 and self.caps[origin - 1] == 2:
            init = initial_params(layer.schmidt, self.real_mode)
            params = optimize_u_lambda(stairs_undone, origin, init, self.budget, self.real_mode)
            u_options.append(
                tuple(synthesize_u_lambda(layer.schmidt, origin - 1, origin, params, self.real_mode))
            )

        best: Optional[_Candidate] = None
        for u_gates in u_options:
            residual, weight = _undo(u_gates, stairs_undone, self.chi_sim)
            fid = _overlap_with_zero(residual)
            if best is None or fid > best.fidelity + TIE_TOLERANCE:
                best = _Candidate(layer.with_u(u_gates), residual, fid, stair_weight + weight)
        return best


def _origins(policy: OriginPolicy, n: int) -> List[int]:
    if policy == "scan":
        return list(range(1, n))
    if isinstance(policy, (int, np.integer)) and 1 <= int(policy) <= n - 1:
        return [int(policy)]
    raise PreconditionError(f"origin policy must be 'scan' or a bond in 1..{n - 1}, got {policy!r}")


def _choose(candidates: Sequence[Tuple[int, _Candidate]]) -> Tuple[int, _Candidate]:
    best = candidates[0]
    for origin, cand in candidates[1:]:
        if cand.fidelity > best[1].fidelity + TIE_TOLERANCE:
            best = (origin, cand)
    return best


@dataclass
class _Pass:
    """One greedy run at a fixed threshold."""

    eps_trunc: float
    history: Tuple
    origins: List[int]
    candidates: List[_Candidate]


@dataclass
class _Assembled:
    result: EncodingResult
    cnot_count: int


class _Disentangler:
    """Greedy layer search for one target.

    Rounds are memoized on (history, skip set): passes at different thresholds
    share every round where their residuals and skip sets agree.
    """

    def __init__(
        self,
        target: Mps,
        origins: List[int],
        n_layers: int,
        chi_sim: int,
        budget: int,
        workers: int,
    ):
        self.target = target
        self.origins = origins
        self.n_layers = n_layers
        self.chi_sim = chi_sim
        self.budget = budget
        self.workers = workers
        self.real_mode = target.is_real
        self._rounds: Dict[Tuple, Tuple[int, _Candidate, Mps]] = {}

    def _round(self, residual: Mps, first: bool, caps: Tuple[int, ...]) -> Tuple[int, _Candidate, Mps]:
        rnd = _Round(residual, first, caps, self.chi_sim, self.budget, self.real_mode)
        if self.workers > 1 and len(self.origins) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(rnd.candidate, self.origins))
        else:
            results = [rnd.candidate(o) for o in self.origins]
        origin, best = _choose(list(zip(self.origins, results)))
        return origin, best, canonicalize(best.residual, 0)

    def run(self, eps_trunc: float) -> _Pass:
        residual = self.target
        history: Tuple = ()
        chosen: List[int] = []
        candidates: List[_Candidate] = []
        for index in range(self.n_layers):
            caps = _bond_caps(residual, eps_trunc)
            key = (history, caps)
            if key not in self._rounds:
                self._rounds[key] = self._round(residual, index == 0, caps)
            origin, best, residual = self._rounds[key]
            history = key + (origin,)
            chosen.append(origin)
            candidates.append(best)
        return _Pass(eps_trunc, history, chosen, candidates)

    def assemble(self, p: _Pass) -> _Assembled:
        n = self.target.n_qubits
        circuit = Circuit(n)
        for cand in reversed(p.candidates):
            circuit.add_layer(merge_rotations(cand.layer.gates), cand.layer.origin, cand.layer.skipped_bonds)

        sim = MpsSimulator(zero_state(n), self.chi_sim)
        for g in circuit.gates:
            sim.apply(g)
        weight = sum(c.discarded_weight for c in p.candidates) + sim.discarded_weight
        result = EncodingResult(
            circuit,
            [c.fidelity for c in p.candidates],
            list(p.origins),
            mps_fidelity(sim.state(), self.target),
            weight,
            weight > TRUNCATION_WARNING_THRESHOLD,
        )
        return _Assembled(result, circuit_metrics(circuit.lowered()).cnot_count)


def build_encoding_circuit(
    m: Mps,
    n_layers: int = 2,
    origin_policy: OriginPolicy = "scan",
    eps_trunc: float = 1e-3,
    chi_sim: int = DEFAULT_CHI_SIM,
    u_lambda_budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> EncodingResult:
    """Compile `m` into `n_layers` V-layers.

    origin_policy is "scan" (every origin tried per layer, best fidelity kept,
    lowest origin on ties) or a fixed bond index. The fidelity trace holds
    |<0...0|residual>|^2 after each layer; the reported fidelity is measured
    by simulating the finished circuit from |0...0> against `m`.

    The greedy search runs at every EPS_LADDER threshold above `eps_trunc` and
    then at `eps_trunc` itself. Stepping down, a finer run replaces the kept one
    only if neither its fidelity nor its CNOT count is lower. Fidelity and CNOT
    count are therefore non-decreasing as eps_trunc steps down the ladder.
    """
    if n_layers < 1:
        raise PreconditionError("n_layers must be at least 1")
    if eps_trunc < 0:
        raise PreconditionError("eps_trunc must be nonnegative")
    n = m.n_qubits
    real_mode = m.is_real
    target = canonicalize(m.normalized(), 0)

    if n == 1:
        layer = exact_layer_from_chi2(target, 0, real_mode=real_mode)
        circuit = Circuit(1)
        circuit.add_layer(layer.gates, 0)
        return EncodingResult(circuit, [1.0], [0], 1.0)

    search = _Disentangler(target, _origins(origin_policy, n), n_layers, chi_sim, u_lambda_budget, workers)
    thresholds = [t for t in EPS_LADDER if t > eps_trunc] + [eps_trunc]
    kept: Optional[_Assembled] = None
    kept_eps = eps_trunc
    seen = set()
    for threshold in thresholds:
        p = search.run(threshold)
        if p.history in seen:
            continue
        seen.add(p.history)
        step = search.assemble(p)
        logger.debug(
            "eps_trunc %.1e: fidelity %.9f, %d CNOTs",
            threshold,
            step.result.fidelity,
            step.cnot_count,
            extra={"fidelity": step.result.fidelity, "cnot_count": step.cnot_count},
        )
        if kept is None or (
            step.result.fidelity >= kept.result.fidelity and step.cnot_count >= kept.cnot_count
        ):
            kept, kept_eps = step, threshold

    result = kept.result
    for index, (origin, fid) in enumerate(zip(result.origins, result.fidelity_trace)):
        logger.info(
            "Layer %d: origin %d, fidelity %.9f",
            index + 1,
            origin,
            fid,
            extra={"layer": index + 1, "origin": origin, "fidelity": fid, "n_qubits": n},
        )
    if result.truncation_warning:
        warnings.warn(
            f"disentangling discarded weight {result.discarded_weight:.3e} at chi_sim={chi_sim}",
            TruncationWarning,
            stacklevel=2,
        )
    result.metadata = {
        "eps_trunc": eps_trunc,
        "eps_trunc_kept": kept_eps,
        "chi_sim": chi_sim,
        "origin_policy": origin_policy,
        "real": real_mode,
    }
    result.log_summary()
    return result
