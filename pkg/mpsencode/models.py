"""Report models written by the pipeline commands."""
from __future__ import annotations

import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

ReproduceTarget = Literal["fig2", "fig4", "fig5", "fig6", "table1", "table2"]


class ValidationReport(BaseModel):
    """Statistical validation of one encoding circuit."""
    kl: float = Field(..., ge=0.0)
    ks_statistic: float = Field(..., ge=0.0, le=1.0)
    ks_pvalue: float = Field(..., ge=0.0, le=1.0)
    n_samples: int
    fidelity: float
    depth: int
    cnot_count: int
    kl_log_base: Literal["e"] = "e"
    floored_bins: int = 0  # bins where the encoded probability hit the 1e-300 floor
    shots: Optional[int] = None
    distribution: Optional[str] = None

    def passed(self, alpha: float = 0.05) -> bool:
        return self.ks_pvalue >= alpha

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


class TciReport(BaseModel):
    """Metadata of one cross-interpolation build."""
    oracle_calls: int
    call_bound: int
    converged: bool
    sweeps: int
    mean_rel: float
    max_rel: float
    ranks: List[int]


class CircuitReport(BaseModel):
    """Circuit metrics plus the per-layer fidelity trace."""
    n_qubits: int
    n_layers: int
    origins: List[int]
    fidelity_trace: List[float]
    fidelity: float
    depth: int
    cnot_count: int
    gate_count: int
    two_qubit_depth: int
    discarded_weight: float = 0.0
    truncation_warning: bool = False


class ReproductionCheck(BaseModel):
    """One pass/fail assertion inside a reproduction bundle."""
    name: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    detail: str = ""


class ReproductionBundle(BaseModel):
    target: ReproduceTarget
    quick: bool = False
    checks: List[ReproductionCheck] = Field(default_factory=list)
    files: List[str] = Field(default_factory=list)  # paths relative to the bundle directory
    summary: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add_check(
        self,
        name: str,
        passed: bool,
        value: Optional[float] = None,
        threshold: Optional[float] = None,
        detail: str = "",
    ) -> ReproductionCheck:
        check = ReproductionCheck(name=name, passed=bool(passed), value=value, threshold=threshold, detail=detail)
        self.checks.append(check)
        return check

    def to_json(self) -> str:
        payload = self.model_dump(mode="json")
        payload["passed"] = self.passed
        return json.dumps(payload, indent=2)
