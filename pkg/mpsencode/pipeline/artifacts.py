"""Plain-file artifacts: CSV rows, JSON documents, QASM text and MPS archives.

The text writers are deterministic, so re-runs with the same config produce
byte-identical CSV and JSON. NPZ archives carry timestamps.
"""
from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np

from ..errors import ConfigError
from ..mpscore.mps import Mps

logger = logging.getLogger(__name__)

ENCODE_DIR = "encode"
CIRCUIT_DIR = "circuit"
VALIDATE_DIR = "validate"
REPRODUCE_DIR = "reproduce"

MPS_FILE = "mps.npz"
PROFILE_FILE = "profile.csv"
PREDICTION_FILE = "prediction.csv"
CIRCUIT_JSON = "circuit.json"
CIRCUIT_QASM = "circuit.qasm"
TRACE_FILE = "fidelity_trace.csv"
CIRCUIT_REPORT = "circuit_report.json"
CIRCUIT_SOURCE = "circuit_source.json"
VALIDATION_REPORT = "validation_report.json"
HISTOGRAM_CSV = "histogram.csv"
HISTOGRAM_JSON = "histogram.json"
PLOT_DATA = "plot_data.csv"


def _format(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_csv(path: Path, rows: Iterable[Dict[str, Any]], fieldnames: Optional[Sequence[str]] = None) -> Path:
    rows = list(rows)
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _format(row.get(k, "")) for k in fieldnames})
    logger.debug("wrote %d rows to %s", len(rows), path)
    return path


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> Any:
    """Parsed JSON, or None when the file is missing or unreadable."""
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError):
        return None


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def save_mps(path: Path, m: Mps) -> Path:
    """Tensors as t0..t{N-1}, spectra as s1..s{N-1}, metadata as JSON text."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {f"t{k}": t for k, t in enumerate(m.tensors)}
    if m.schmidt is not None:
        arrays.update({f"s{k}": s for k, s in enumerate(m.schmidt, start=1)})
    header = {
        "n_qubits": m.n_qubits,
        "canonical_center": m.canonical_center,
        "metadata": m.metadata,
    }
    arrays["header"] = np.array(json.dumps(header, sort_keys=True, default=_jsonable))
    with path.open("wb") as fh:
        np.savez(fh, **arrays)
    return path


def load_mps(path: Path) -> Mps:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"MPS artifact {path} not found; run `encode` first")
    with np.load(path, allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        n = int(header["n_qubits"])
        tensors = tuple(np.array(data[f"t{k}"]) for k in range(n))
        schmidt = None
        if f"s{n - 1}" in data.files or n == 1:
            schmidt = tuple(np.array(data[f"s{k}"]) for k in range(1, n)) if n > 1 else ()
    return Mps(tensors, header["canonical_center"], schmidt, header.get("metadata", {}))


def run_dir(output_dir: str, name: str) -> Path:
    path = Path(output_dir) / name
    path.mkdir(parents=True, exist_ok=True)
    return path
