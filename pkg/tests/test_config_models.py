import json

import pytest

from mpsencode.config import RunConfig, get_settings
from mpsencode.errors import ConfigError
from mpsencode.funcspace import DistributionKind
from mpsencode.models import ReproductionBundle, ValidationReport


def _config(**overrides):
    values = {"distribution": {"kind": "levy", "scale": 1.0, "L": 16.0, "n_qubits": 10}}
    values.update(overrides)
    return RunConfig.from_env_defaults(**values)


def test_config_file_round_trip(tmp_path):
    cfg = _config(origin_policy=4, builder="tci", tci={"max_rank": 16})
    path = tmp_path / "run.json"
    cfg.to_file(path)
    assert RunConfig.from_file(path) == cfg
    assert cfg.distribution.to_spec().kind is DistributionKind.LEVY


def test_defaults_come_from_environment(monkeypatch):
    monkeypatch.setenv("MPSENCODE_CHI_SIM", "24")
    get_settings.cache_clear()
    assert _config().chi_sim == 24
    assert _config(chi_sim=48).chi_sim == 48


def test_unknown_fields_are_rejected(tmp_path):
    path = tmp_path / "run.json"
    payload = json.loads(_config().model_dump_json())
    payload["colour"] = "blue"
    path.write_text(json.dumps(payload))
    with pytest.raises(ConfigError):
        RunConfig.from_file(path)


def test_schema_version_is_checked(tmp_path):
    path = tmp_path / "run.json"
    payload = json.loads(_config().model_dump_json())
    payload["schema_version"] = 2
    path.write_text(json.dumps(payload))
    with pytest.raises(ConfigError, match="schema_version"):
        RunConfig.from_file(path)


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_file(tmp_path / "missing.json")


@pytest.mark.parametrize("origin", [0, 10, 15])
def test_fixed_origin_must_be_a_bond(origin):
    with pytest.raises(ConfigError):
        _config(origin_policy=origin)


def test_bundle_passes_only_when_every_check_passes():
    bundle = ReproductionBundle(target="fig2", quick=True)
    assert bundle.passed
    bundle.add_check("lambda1", True, value=0.01, threshold=0.05)
    assert bundle.passed
    bundle.add_check("lambda2", False, value=0.4, threshold=0.15, detail="bond 9")
    assert not bundle.passed
    payload = json.loads(bundle.to_json())
    assert payload["passed"] is False
    assert [c["name"] for c in payload["checks"]] == ["lambda1", "lambda2"]


def test_validation_report_threshold():
    report = ValidationReport(
        kl=1e-4, ks_statistic=0.05, ks_pvalue=0.2, n_samples=200, fidelity=0.999, depth=30, cnot_count=18
    )
    assert report.passed()
    assert not report.passed(alpha=0.5)
    assert json.loads(report.to_json())["kl_log_base"] == "e"


def test_encode_key_tracks_only_the_active_builder():
    svd = _config()
    assert svd.encode_key() == _config(tci={"seed": 7}, n_layers=3).encode_key()
    assert svd.encode_key() != _config(chi_max=8).encode_key()
    tci = _config(builder="tci")
    assert tci.encode_key() == _config(builder="tci", chi_max=8).encode_key()
    assert tci.encode_key() != _config(builder="tci", tci={"seed": 7}).encode_key()


def test_circuit_key_extends_encode_key():
    cfg = _config()
    key = cfg.circuit_key()
    assert {name: key[name] for name in cfg.encode_key()} == cfg.encode_key()
    assert cfg.circuit_key() != _config(eps_trunc=0.0).circuit_key()
    assert cfg.circuit_key() == _config(shots=10, seed=3).circuit_key()
