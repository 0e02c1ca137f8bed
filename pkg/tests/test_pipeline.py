import json

import pytest

from mpsencode import cli
from mpsencode.config import RunConfig, TciSettings
from mpsencode.errors import ConfigError
from mpsencode.pipeline import (
    artifacts,
    build_mps,
    cmd_circuit,
    cmd_encode,
    cmd_reproduce,
    cmd_validate,
    load_circuit,
    load_or_build_mps,
)
from mpsencode.mpscore import fidelity


def _config(tmp_path, **overrides):
    values = {
        "distribution": {"kind": "normal", "mu": 0.5, "scale": 0.125, "L": 1.0, "n_qubits": 8},
        "n_layers": 2,
        "u_lambda_budget": 50,
        "shots": 800,
        "ks_samples": 200,
        "output_dir": str(tmp_path),
    }
    values.update(overrides)
    return RunConfig.from_env_defaults(**values)


def test_encode_circuit_validate(tmp_path):
    cfg = _config(tmp_path)
    encoded = cmd_encode(cfg)
    assert encoded.g1 is not None and encoded.g2 is not None
    encode_dir = tmp_path / artifacts.ENCODE_DIR
    for name in (artifacts.MPS_FILE, artifacts.PROFILE_FILE, artifacts.PREDICTION_FILE):
        assert (encode_dir / name).exists()

    circuit = cmd_circuit(cfg)
    assert circuit.report.n_layers == 2
    assert circuit.result.fidelity > 0.99
    circuit_dir = tmp_path / artifacts.CIRCUIT_DIR
    assert (circuit_dir / artifacts.CIRCUIT_QASM).read_text().startswith("OPENQASM 2.0;")
    report = json.loads((circuit_dir / artifacts.CIRCUIT_REPORT).read_text())
    assert report["cnot_count"] == circuit.metrics.cnot_count

    validated = cmd_validate(cfg)
    assert validated.report.fidelity == pytest.approx(circuit.result.fidelity, abs=1e-9)
    assert validated.report.kl < 0.05
    assert validated.histogram.shots == 800
    validate_dir = tmp_path / artifacts.VALIDATE_DIR
    for name in (artifacts.VALIDATION_REPORT, artifacts.HISTOGRAM_CSV, artifacts.HISTOGRAM_JSON, artifacts.PLOT_DATA):
        assert (validate_dir / name).exists()


def test_profile_csv_is_deterministic(tmp_path):
    first = cmd_encode(_config(tmp_path / "a"))
    second = cmd_encode(_config(tmp_path / "b"))
    assert first.profile.n_bonds == second.profile.n_bonds
    text_a = (tmp_path / "a" / artifacts.ENCODE_DIR / artifacts.PROFILE_FILE).read_text()
    text_b = (tmp_path / "b" / artifacts.ENCODE_DIR / artifacts.PROFILE_FILE).read_text()
    assert text_a == text_b


def test_saved_mps_reloads(tmp_path):
    m = cmd_encode(_config(tmp_path)).mps
    loaded = artifacts.load_mps(tmp_path / artifacts.ENCODE_DIR / artifacts.MPS_FILE)
    assert loaded.bond_dims == m.bond_dims
    assert loaded.canonical_center == m.canonical_center


def test_encode_artifact_is_reused_only_for_its_own_config(tmp_path):
    cfg = _config(tmp_path)
    encoded = cmd_encode(cfg).mps
    assert fidelity(load_or_build_mps(cfg), encoded) == pytest.approx(1.0, abs=1e-12)
    assert load_or_build_mps(cfg).metadata["source"] == cfg.encode_key()

    capped = _config(tmp_path, chi_max=2)
    assert load_or_build_mps(capped).max_bond <= 2

    levy = _config(tmp_path, distribution={"kind": "levy", "scale": 1.0, "L": 16.0, "n_qubits": 8})
    assert fidelity(load_or_build_mps(levy), build_mps(levy)) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(load_or_build_mps(levy), encoded) < 0.9


def test_validate_recompiles_a_circuit_from_another_config(tmp_path):
    normal = _config(tmp_path)
    cmd_encode(normal)
    stale = cmd_circuit(normal).result.circuit.lowered()

    levy = _config(tmp_path, distribution={"kind": "levy", "scale": 1.0, "L": 16.0, "n_qubits": 8})
    assert load_circuit(levy).to_json() != stale.to_json()
    circuit_dir = tmp_path / artifacts.CIRCUIT_DIR
    assert json.loads((circuit_dir / artifacts.CIRCUIT_SOURCE).read_text()) == levy.circuit_key()

    validated = cmd_validate(levy)
    compiled = json.loads((circuit_dir / artifacts.CIRCUIT_REPORT).read_text())
    assert validated.report.fidelity == pytest.approx(compiled["fidelity"], abs=1e-9)
    assert validated.report.fidelity > 0.5

    # a changed circuit field alone also forces a recompile
    single = _config(tmp_path, distribution=levy.distribution.model_dump(), n_layers=1)
    assert load_circuit(single).to_json() != load_circuit(levy).to_json()


def test_validation_is_reproducible_for_a_seed(tmp_path):
    cfg = _config(tmp_path, n_layers=1)
    a = cmd_validate(cfg)
    b = cmd_validate(cfg)
    assert a.report.ks_pvalue == b.report.ks_pvalue
    assert (a.histogram.bits == b.histogram.bits).all()


def test_cli_runs_validate(tmp_path):
    argv = [
        "validate",
        "--kind", "normal",
        "--mu", "0.5",
        "--scale", "0.125",
        "--n-qubits", "8",
        "--n-layers", "1",
        "--u-lambda-budget", "20",
        "--shots", "500",
        "--output-dir", str(tmp_path),
    ]
    code = cli.main(argv)
    assert code in (cli.EXIT_OK, cli.EXIT_FAILED)
    saved = RunConfig.from_file(tmp_path / cli.RUN_CONFIG_FILE)
    assert saved.n_layers == 1 and saved.distribution.n_qubits == 8
    assert (tmp_path / artifacts.VALIDATE_DIR / artifacts.VALIDATION_REPORT).exists()


def test_cli_flags_override_config_file(tmp_path):
    path = tmp_path / "run.json"
    _config(tmp_path).to_file(path)
    argv = ["encode", "--config", str(path), "--n-qubits", "6", "--origin", "2"]
    argv += ["--tci-seed", "11", "--tci-tol", "1e-6"]
    cfg = cli.resolve_config(cli.build_parser().parse_args(argv))
    assert cfg.distribution.n_qubits == 6
    assert cfg.distribution.scale == 0.125
    assert cfg.origin_policy == 2
    assert cfg.tci.seed == 11
    assert cfg.tci.tol == 1e-6
    assert cfg.tci.max_rank == TciSettings().max_rank


def test_cli_needs_a_distribution(tmp_path):
    with pytest.raises(ConfigError):
        cli.resolve_config(cli.build_parser().parse_args(["encode", "--n-qubits", "6"]))
    assert cli.main(["encode", "--output-dir", str(tmp_path)]) == cli.EXIT_ERROR


def test_cli_rejects_bad_origin():
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["circuit", "--kind", "levy", "--origin", "middle"])


@pytest.mark.slow
def test_reproduce_spectra_quick(tmp_path):
    bundle = cmd_reproduce("fig2", quick=True, output_dir=str(tmp_path))
    assert bundle.checks
    assert not any(c.name == "run" for c in bundle.checks)
    out = tmp_path / artifacts.REPRODUCE_DIR / "fig2"
    assert json.loads((out / "bundle.json").read_text())["target"] == "fig2"
    assert (out / "spectra.csv").exists()
