"""encode / circuit / validate: the three stages of one pipeline run.

Each stage reads the previous stage's artifacts from the run directory when
they exist and rebuilds them inline otherwise.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from ..analytic import closed_form_g1, closed_form_g2, g1 as quadrature_g1, g2 as quadrature_g2, predict_profile
from ..circuitgen import Circuit, EncodingResult, build_encoding_circuit, circuit_metrics, to_qasm
from ..circuitgen.metrics import CircuitMetrics
from ..config import RunConfig, get_settings
from ..errors import MpsEncodeError, UnsupportedKindError
from ..funcspace import DistributionSpec, Grid, discretize, pdf, sqrt_pdf_oracle, truncated_cdf, truncation_mass
from ..funcspace.grid import MAX_DENSE_QUBITS
from ..models import CircuitReport, TciReport, ValidationReport
from ..mpscore import EntanglementProfile, Mps, canonicalize, entanglement_profile, mps_from_vector, profile_rows
from ..mpscore.mps import zero_state
from ..mpscore.overlap import fidelity
from ..simulate import Histogram, apply_circuit, marginal_probabilities, sample
from ..stats import kl_divergence, ks_test
from ..tci import TciConfig, tci_build
from . import artifacts

logger = logging.getLogger(__name__)

KS_ALPHA = 0.05
# KL beyond the dense limit is taken over this many leading qubits.
COARSE_KL_QUBITS = 20


def build_mps(cfg: RunConfig) -> Mps:
    """Canonical MPS of sqrt(p) on the run's grid, by dense SVD or by cross interpolation."""
    dist = cfg.distribution.to_spec()
    grid = Grid(cfg.distribution.n_qubits, dist.L)
    oracle = sqrt_pdf_oracle(dist)
    if cfg.builder == "tci":
        m = tci_build(oracle, grid, TciConfig.from_settings(cfg.tci))
    else:
        m = mps_from_vector(discretize(oracle, grid), cfg.chi_max, cfg.eps_svd)
        m = m.with_tensors(m.tensors, canonical_center=m.canonical_center, schmidt=m.schmidt, metadata={"builder": "svd"})
    m = m.with_tensors(
        m.tensors,
        canonical_center=m.canonical_center,
        schmidt=m.schmidt,
        metadata={**m.metadata, "source": cfg.encode_key()},
    )
    return canonicalize(m, 0)


def analytic_constants(dist: DistributionSpec) -> Tuple[float, float]:
    """(g1, g2) from closed forms where they exist, quadrature otherwise."""
    oracle = sqrt_pdf_oracle(dist)
    try:
        value_g1 = closed_form_g1(dist)
    except UnsupportedKindError:
        value_g1 = quadrature_g1(oracle, dist.L)
    try:
        value_g2 = closed_form_g2(dist)
    except UnsupportedKindError:
        value_g2 = quadrature_g2(oracle, dist.L)
    return value_g1, value_g2


@dataclass
class EncodeOutcome:
    mps: Mps
    profile: EntanglementProfile
    g1: Optional[float]
    g2: Optional[float]
    files: List[Path] = field(default_factory=list)


def cmd_encode(cfg: RunConfig) -> EncodeOutcome:
    """Build the MPS, then write it with its entanglement profile and the analytic overlay."""
    out = artifacts.run_dir(cfg.output_dir, artifacts.ENCODE_DIR)
    dist = cfg.distribution.to_spec()
    n = cfg.distribution.n_qubits

    # 1. Build
    m = build_mps(cfg)
    profile = entanglement_profile(m)
    files = [artifacts.save_mps(out / artifacts.MPS_FILE, m)]
    files.append(artifacts.write_csv(out / artifacts.PROFILE_FILE, profile_rows(profile)))
    if cfg.builder == "tci":
        meta = m.metadata
        report = TciReport(
            oracle_calls=meta["oracle_calls"],
            call_bound=meta["call_bound"],
            converged=meta["converged"],
            sweeps=meta["sweeps"],
            mean_rel=meta["mean_rel"],
            max_rel=meta["max_rel"],
            ranks=list(meta["ranks"]),
        )
        files.append(artifacts.write_text(out / "tci_report.json", report.model_dump_json(indent=2) + "\n"))

    # 2. Analytic overlay
    g1_value: Optional[float] = None
    g2_value: Optional[float] = None
    try:
        g1_value, g2_value = analytic_constants(dist)
    except MpsEncodeError as e:
        logger.warning("No analytic overlay for %s: %s", dist.label(), e, extra={"distribution": dist.label()})
    if g1_value is not None and n > 1:
        prediction = predict_profile(g1_value, g2_value, range(1, n), n_qubits=n)
        files.append(artifacts.write_csv(out / artifacts.PREDICTION_FILE, prediction.rows()))

    logger.info(
        "Encoded %s on %d qubits, max bond %d",
        dist.label(),
        n,
        m.max_bond,
        extra={"command": "encode", "n_qubits": n, "chi": m.max_bond, "distribution": dist.label()},
    )
    return EncodeOutcome(m, profile, g1_value, g2_value, files)


def load_or_build_mps(cfg: RunConfig) -> Mps:
    """The encode artifact if it was built from this config's encode fields, else a fresh build."""
    path = Path(cfg.output_dir) / artifacts.ENCODE_DIR / artifacts.MPS_FILE
    if path.exists():
        m = artifacts.load_mps(path)
        if m.metadata.get("source") == cfg.encode_key():
            return canonicalize(m, 0) if m.schmidt is None else m
        logger.warning("Ignoring %s: built from a different configuration", path)
    return build_mps(cfg)


@dataclass
class CircuitOutcome:
    result: EncodingResult
    metrics: CircuitMetrics
    report: CircuitReport
    files: List[Path] = field(default_factory=list)


def cmd_circuit(cfg: RunConfig, m: Optional[Mps] = None) -> CircuitOutcome:
    """Compile the encode artifact into QASM + JSON and record the fidelity trace."""
    out = artifacts.run_dir(cfg.output_dir, artifacts.CIRCUIT_DIR)
    if m is None:
        m = load_or_build_mps(cfg)

    result = build_encoding_circuit(
        m,
        n_layers=cfg.n_layers,
        origin_policy=cfg.origin_policy,
        eps_trunc=cfg.eps_trunc,
        chi_sim=cfg.chi_sim,
        u_lambda_budget=cfg.u_lambda_budget,
        workers=get_settings().workers,
    )
    circuit = result.circuit.lowered()
    metrics = circuit_metrics(circuit)
    report = CircuitReport(
        n_qubits=circuit.n_qubits,
        n_layers=len(result.origins),
        origins=result.origins,
        fidelity_trace=result.fidelity_trace,
        fidelity=result.fidelity,
        depth=metrics.depth,
        cnot_count=metrics.cnot_count,
        gate_count=metrics.gate_count,
        two_qubit_depth=metrics.two_qubit_depth,
        discarded_weight=result.discarded_weight,
        truncation_warning=result.truncation_warning,
    )
    files = [
        artifacts.write_text(out / artifacts.CIRCUIT_JSON, circuit.to_json() + "\n"),
        artifacts.write_text(out / artifacts.CIRCUIT_QASM, to_qasm(circuit)),
        artifacts.write_csv(out / artifacts.TRACE_FILE, result.trace_rows()),
        artifacts.write_text(out / artifacts.CIRCUIT_REPORT, report.model_dump_json(indent=2) + "\n"),
        artifacts.write_json(out / artifacts.CIRCUIT_SOURCE, cfg.circuit_key()),
    ]
    logger.info(
        "Circuit: depth %d, %d CNOTs, fidelity %.9f",
        metrics.depth,
        metrics.cnot_count,
        result.fidelity,
        extra={
            "command": "circuit",
            "depth": metrics.depth,
            "cnot_count": metrics.cnot_count,
            "fidelity": result.fidelity,
            "n_qubits": circuit.n_qubits,
        },
    )
    return CircuitOutcome(result, metrics, report, files)


def ideal_probabilities(dist: DistributionSpec, n_qubits: int, n_lead: Optional[int] = None) -> np.ndarray:
    """Ideal bin probabilities: |discretized sqrt(p)|^2, or CDF differences on coarse bins."""
    if n_lead is None or n_lead == n_qubits:
        v = discretize(sqrt_pdf_oracle(dist), Grid(n_qubits, dist.L))
        return np.abs(v) ** 2
    edges = np.linspace(0.0, dist.L, (1 << n_lead) + 1)
    p = np.diff(truncated_cdf(dist, edges))
    return p / p.sum()


def _plot_rows(hist: Histogram, dist: DistributionSpec) -> List[dict]:
    r2 = truncation_mass(dist)
    step = dist.L / 2.0**hist.n_qubits
    rows = []
    for row in hist.to_rows():
        density = float(pdf(dist, np.asarray(row["x"]))) / r2
        rows.append(
            {
                "x": row["x"],
                "count": row["count"],
                "empirical_pdf": row["count"] / (hist.shots * step),
                "ideal_pdf": density,
            }
        )
    return rows


@dataclass
class ValidateOutcome:
    report: ValidationReport
    histogram: Histogram
    files: List[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.report.passed(KS_ALPHA)


def load_circuit(cfg: RunConfig) -> Circuit:
    """The circuit artifact if it was compiled under this config, else a fresh compile."""
    out = Path(cfg.output_dir) / artifacts.CIRCUIT_DIR
    path = out / artifacts.CIRCUIT_JSON
    if path.exists():
        if artifacts.read_json(out / artifacts.CIRCUIT_SOURCE) == cfg.circuit_key():
            return Circuit.from_json(path.read_text(encoding="utf-8"))
        logger.warning("Ignoring %s: compiled under a different configuration", path)
    return cmd_circuit(cfg).result.circuit.lowered()


def evaluate_circuit(
    circuit: Circuit,
    dist: DistributionSpec,
    target: Mps,
    shots: int,
    ks_samples: int,
    seed: int = 0,
    chi_sim: int = 64,
) -> Tuple[ValidationReport, Histogram]:
    """Simulate, sample and score one circuit: KL on exact amplitudes, KS on sampled x values."""
    circuit = circuit.lowered()
    n = circuit.n_qubits

    # 1. Simulate
    sim = apply_circuit(circuit, zero_state(n), chi_sim=chi_sim)
    state = sim.state

    # 2. KL on exact amplitudes (coarse leading-qubit bins beyond the dense limit)
    n_lead = n if n <= MAX_DENSE_QUBITS else COARSE_KL_QUBITS
    q = marginal_probabilities(state, n_lead)
    p = ideal_probabilities(dist, n, n_lead)
    kl, floored = kl_divergence(q, p)

    # 3. Sample and test
    hist = sample(state, shots, seed=seed, support_length=dist.L)
    ks = ks_test(hist.x_samples(min(ks_samples, hist.shots)), dist)
    metrics = circuit_metrics(circuit)
    report = ValidationReport(
        kl=kl,
        ks_statistic=ks.statistic,
        ks_pvalue=ks.p_value,
        n_samples=ks.n_samples,
        fidelity=fidelity(state, target),
        depth=metrics.depth,
        cnot_count=metrics.cnot_count,
        floored_bins=floored,
        shots=shots,
        distribution=dist.label(),
    )
    return report, hist


def cmd_validate(cfg: RunConfig, circuit: Optional[Circuit] = None, target: Optional[Mps] = None) -> ValidateOutcome:
    """Simulate the circuit artifact, sample it, and write the report and plot data."""
    out = artifacts.run_dir(cfg.output_dir, artifacts.VALIDATE_DIR)
    dist = cfg.distribution.to_spec()
    if circuit is None:
        circuit = load_circuit(cfg)
    if target is None:
        target = load_or_build_mps(cfg)
    report, hist = evaluate_circuit(circuit, dist, target, cfg.shots, cfg.ks_samples, cfg.seed, cfg.chi_sim)
    kl, ks_pvalue = report.kl, report.ks_pvalue

    files = [
        artifacts.write_text(out / artifacts.VALIDATION_REPORT, report.to_json() + "\n"),
        artifacts.write_csv(out / artifacts.HISTOGRAM_CSV, hist.to_rows(), ["bitstring", "x", "count"]),
        artifacts.write_text(out / artifacts.HISTOGRAM_JSON, hist.to_json() + "\n"),
        artifacts.write_csv(out / artifacts.PLOT_DATA, _plot_rows(hist, dist)),
    ]
    log = logger.info if report.passed(KS_ALPHA) else logger.warning
    log(
        "Validation: KL %.3e, KS p-value %.3f over %d samples",
        kl,
        ks_pvalue,
        report.n_samples,
        extra={"command": "validate", "kl": kl, "ks_pvalue": ks_pvalue, "fidelity": report.fidelity},
    )
    return ValidateOutcome(report, hist, files)
