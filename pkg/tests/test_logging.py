import json
import logging

import numpy as np

from mpsencode.logging_config import AppInsightsDimensionsFilter, StructuredFormatter, configure_logging


def _record(**extra):
    record = logging.LogRecord("mpsencode.test", logging.INFO, __file__, 10, "layer %d done", (2,), None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


def test_structured_formatter_emits_known_extras():
    record = _record(layer=2, fidelity=np.float64(0.9995), chi=np.int64(2), unrelated="dropped")
    entry = json.loads(StructuredFormatter().format(record))
    assert entry["message"] == "layer 2 done"
    assert entry["level"] == "INFO"
    assert entry["layer"] == 2
    assert entry["fidelity"] == 0.9995
    assert entry["chi"] == 2
    assert "unrelated" not in entry


def test_dimensions_filter_merges_existing():
    record = _record(origin=3, custom_dimensions={"run": "a"})
    assert AppInsightsDimensionsFilter().filter(record)
    assert record.custom_dimensions == {"run": "a", "origin": 3}


def test_configure_logging_writes_json_file(tmp_path):
    configure_logging("DEBUG", str(tmp_path))
    logging.getLogger("mpsencode.test").info("built", extra={"n_qubits": 12})
    for handler in logging.getLogger().handlers:
        handler.flush()
    lines = (tmp_path / "mpsencode.log").read_text().splitlines()
    assert json.loads(lines[-1])["n_qubits"] == 12


def test_configure_logging_is_idempotent(tmp_path):
    configure_logging("INFO", str(tmp_path))
    count = len(logging.getLogger().handlers)
    configure_logging("INFO", str(tmp_path))
    assert len(logging.getLogger().handlers) == count
