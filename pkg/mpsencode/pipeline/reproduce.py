"""Desk-scale reproduction sweeps with pass/fail checks.

Every target writes its CSVs plus a `bundle.json` under
<output_dir>/reproduce/<target>/. Sweep points are independent pipelines and
run on a thread pool sized by the `workers` setting.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

from ..analytic import one_layer_infidelity_estimate, predict_profile, purity_residuals, window_start
from ..analytic.closed_forms import closed_form_g2
from ..circuitgen import build_encoding_circuit
from ..config import DistributionParams, RunConfig, get_settings
from ..funcspace import DistributionKind
from ..models import ReproduceTarget, ReproductionBundle
from ..mpscore import entanglement_profile
from . import artifacts
from .commands import KS_ALPHA, analytic_constants, build_mps, evaluate_circuit

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

BUNDLE_FILE = "bundle.json"

LAMBDA1_TOLERANCE = 0.05
LAMBDA2_TOLERANCE = 0.15
# Lambda_2 below this is at the SVD noise floor and is not compared.
LAMBDA2_FLOOR = 1e-10
RESIDUAL_SHRINK = 5.0
ESTIMATE_FACTOR = 2.0
ORIGIN_GAP_FRACTION = 0.5
KL_LIMIT = 3e-3
KS_PASS_RATE = 0.8
STAT_PASS_RATE = 0.9
METRIC_TOLERANCE = 0.25

# Mean depth / CNOT count of 2-layer circuits at N=10, eps_trunc=1e-3.
TABLE_REFERENCE = {
    "normal": {"depth": 26.2, "cnot_count": 17.8},
    "log_normal": {"depth": 28.4, "cnot_count": 18.2},
    "levy": {"depth": 25.9, "cnot_count": 17.0},
}
# Same at eps_trunc=1e-4; reported, not asserted.
TABLE_REFERENCE_FINE = {
    "normal": {"depth": 27.5, "cnot_count": 18.7},
    "log_normal": {"depth": 31.1, "cnot_count": 21.8},
    "levy": {"depth": 30.5, "cnot_count": 20.8},
}


@dataclass
class _Context:
    target: str
    quick: bool
    out: Path
    workers: int
    seed: int
    bundle: ReproductionBundle

    def csv(self, name: str, rows: Sequence[Dict[str, Any]]) -> None:
        artifacts.write_csv(self.out / name, rows)
        self.bundle.files.append(name)

    def pmap(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        items = list(items)
        if self.workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]


def _run_config(dist: DistributionParams, **overrides) -> RunConfig:
    return RunConfig.from_env_defaults(distribution=dist.model_dump(), **overrides)


def _params(kind: DistributionKind, n_qubits: int, **values) -> DistributionParams:
    return DistributionParams(kind=kind, n_qubits=n_qubits, **values)


# fig2: numeric vs predicted Lambda_{k,1}, Lambda_{k,2}


def _fig2_point(case: tuple) -> Dict[str, Any]:
    name, params = case
    cfg = _run_config(params, chi_max=64)
    dist = params.to_spec()
    n = params.n_qubits
    profile = entanglement_profile(build_mps(cfg))
    g1, g2 = analytic_constants(dist)
    bonds = list(range(1, n))
    prediction = predict_profile(g1, g2, bonds)
    first = max(window_start(dist) + 2, next((k for k in bonds if g1 / 4.0**k < 0.1), n))
    rows = []
    rel1: List[float] = []
    rel2: List[float] = []
    for k, lam1_pred, lam2_pred in zip(bonds, prediction.lambda1, prediction.lambda2):
        lam1 = profile.coefficient(k, 1)
        lam2 = profile.coefficient(k, 2)
        in_window = first <= k <= n - 4
        rows.append(
            {
                "case": name,
                "bond": k,
                "lambda1": lam1,
                "lambda1_predicted": lam1_pred,
                "lambda2": lam2,
                "lambda2_predicted": lam2_pred,
                "in_window": in_window,
            }
        )
        if not in_window:
            continue
        rel1.append(abs(lam1 - lam1_pred) / lam1_pred)
        if lam2_pred >= LAMBDA2_FLOOR:
            rel2.append(abs(lam2 - lam2_pred) / lam2_pred)
    residual_factor = None
    if dist.kind is DistributionKind.NORMAL and params.scale <= 0.125:
        # Purity residuals shrink geometrically (~16x per bond) inside the window.
        window = [k for k in bonds if first <= k <= n - 4]
        res = np.abs(purity_residuals(profile, g1, window, n_qubits=n))
        ratios = res[:-1] / np.maximum(res[1:], 1e-300)
        residual_factor = float(ratios.min()) if len(ratios) else None
    return {
        "name": name,
        "rows": rows,
        "window": (first, n - 4),
        "lambda1_max_rel": max(rel1) if rel1 else None,
        "lambda2_max_rel": max(rel2) if rel2 else None,
        "residual_factor": residual_factor,
    }


def _fig2(ctx: _Context) -> None:
    n = 14 if ctx.quick else 20
    cases = [
        ("normal_sigma0.125", _params(DistributionKind.NORMAL, n, mu=0.5, scale=0.125, L=1.0)),
        ("normal_sigma0.5", _params(DistributionKind.NORMAL, n, mu=0.5, scale=0.5, L=1.0)),
        ("levy_c0.15", _params(DistributionKind.LEVY, n, scale=0.15, L=1.0)),
        ("levy_c4", _params(DistributionKind.LEVY, n, scale=4.0, L=1.0)),
    ]
    results = ctx.pmap(_fig2_point, cases)
    ctx.csv("spectra.csv", [row for r in results for row in r["rows"]])
    for r in results:
        window = f"bonds {r['window'][0]}..{r['window'][1]}"
        if r["lambda1_max_rel"] is None:
            ctx.bundle.add_check(f"{r['name']}:lambda1", False, detail=f"empty validity window ({window})")
            continue
        ctx.bundle.add_check(
            f"{r['name']}:lambda1", r["lambda1_max_rel"] <= LAMBDA1_TOLERANCE, r["lambda1_max_rel"], LAMBDA1_TOLERANCE, window
        )
        if r["lambda2_max_rel"] is not None:
            ctx.bundle.add_check(
                f"{r['name']}:lambda2", r["lambda2_max_rel"] <= LAMBDA2_TOLERANCE, r["lambda2_max_rel"], LAMBDA2_TOLERANCE, window
            )
        if r["residual_factor"] is not None:
            ctx.bundle.add_check(
                f"{r['name']}:purity_residual_order",
                r["residual_factor"] >= RESIDUAL_SHRINK,
                r["residual_factor"],
                RESIDUAL_SHRINK,
                "smallest per-bond shrink factor of |p_k - (1 - g1/(6 4^k))|",
            )


# fig4: 1-layer infidelity vs L, origin sweep


def _one_layer_point(params: DistributionParams) -> Dict[str, Any]:
    n = params.n_qubits
    m = build_mps(_run_config(params))
    result = build_encoding_circuit(m, n_layers=1, origin_policy=max(1, n // 2), eps_trunc=0.0)
    return {"L": params.L, "n_qubits": n, "infidelity": max(0.0, 1.0 - result.fidelity)}


def _origin_point(args: tuple) -> Dict[str, Any]:
    m, origin = args
    result = build_encoding_circuit(m, n_layers=3, origin_policy=origin, eps_trunc=0.0)
    row = {"origin": origin}
    for i, f in enumerate(result.fidelity_trace, start=1):
        row[f"fidelity_layer{i}"] = f
    return row


def _fig4(ctx: _Context) -> None:
    exponents = [4, 5, 6] if ctx.quick else [4, 5, 6, 7, 8]

    # 1. Normal sigma=2 against the analytic estimate
    normal = [
        _params(DistributionKind.NORMAL, 10 + j, mu=2.0 ** (j - 1), scale=2.0, L=2.0**j) for j in exponents
    ]
    measured = ctx.pmap(_one_layer_point, normal)
    rows = []
    for params, point in zip(normal, measured):
        dist = params.to_spec()
        g2 = closed_form_g2(dist)
        point["estimate"] = one_layer_infidelity_estimate(g2, 2)
        point["estimate_corrected"] = one_layer_infidelity_estimate(g2, 2, window_start(dist))
        rows.append(point)
    ctx.csv("normal_one_layer.csv", rows)
    worst = 0.0
    for row in rows:
        ratio = row["estimate_corrected"] / max(row["infidelity"], 1e-300)
        worst = max(worst, ratio, 1.0 / ratio if ratio > 0 else math.inf)
    ctx.bundle.add_check("normal:corrected_estimate", worst <= ESTIMATE_FACTOR, worst, ESTIMATE_FACTOR, "max ratio either way")
    last = rows[-1]
    ctx.bundle.add_check(
        "normal:plain_estimate_overestimates",
        last["estimate"] > last["infidelity"],
        last["estimate"] / max(last["infidelity"], 1e-300),
        1.0,
        f"L={last['L']:g}",
    )

    # 2. Levy saturation curve (data only)
    levy = [_params(DistributionKind.LEVY, 10 + j, scale=1.0, L=2.0**j) for j in exponents]
    ctx.csv("levy_one_layer.csv", ctx.pmap(_one_layer_point, levy))

    # 3. Origin sweep
    n, exponent = (12, 6) if ctx.quick else (18, 10)
    m = build_mps(_run_config(_params(DistributionKind.LEVY, n, scale=1.0, L=2.0**exponent)))
    sweep = ctx.pmap(_origin_point, [(m, origin) for origin in range(1, n)])
    ctx.csv("origin_sweep.csv", sweep)
    two_layer = [row["fidelity_layer2"] for row in sweep]
    one_layer = max(row["fidelity_layer1"] for row in sweep)
    best, worst_two = max(two_layer), min(two_layer)
    gap = worst_two - one_layer
    ctx.bundle.add_check(
        "levy:origin_effect",
        best - worst_two >= ORIGIN_GAP_FRACTION * gap,
        best - worst_two,
        ORIGIN_GAP_FRACTION * gap,
        f"best origin {sweep[two_layer.index(best)]['origin']}, worst {sweep[two_layer.index(worst_two)]['origin']}",
    )


# fig5: triangular Lambda_{k,1} profiles


def _fig5_point(case: tuple) -> Dict[str, Any]:
    name, params, builder = case
    m = build_mps(_run_config(params, builder=builder))
    profile = entanglement_profile(m)
    lam1 = np.array([profile.coefficient(k, 1) for k in range(1, params.n_qubits)])
    return {"name": name, "lambda1": lam1}


def _decay_slope(lam1: np.ndarray, span: int = 4) -> float:
    """Mean log2 decrement of Lambda_{k,1} over `span` bonds after the peak."""
    peak = int(np.argmax(lam1))
    tail = np.log2(np.maximum(lam1[peak : peak + span + 1], 1e-300))
    return float(np.mean(np.diff(tail))) if len(tail) > 1 else 0.0


def _fig5(ctx: _Context) -> None:
    if ctx.quick:
        levy = ("levy", _params(DistributionKind.LEVY, 20, scale=1.0, L=2.0**12), "svd")
        normal_n = 14
    else:
        levy = ("levy", _params(DistributionKind.LEVY, 27, scale=1.0, L=2.0**19), "tci")
        normal_n = 18
    normal = ("normal", _params(DistributionKind.NORMAL, normal_n, mu=0.0, scale=1.0, L=16.0), "svd")
    results = {r["name"]: r["lambda1"] for r in ctx.pmap(_fig5_point, [normal, levy])}
    rows = [
        {"case": name, "bond": k, "lambda1": value}
        for name, lam1 in results.items()
        for k, value in enumerate(lam1, start=1)
    ]
    ctx.csv("localization.csv", rows)
    peak = int(np.argmax(results["normal"])) + 1
    ctx.bundle.add_check("normal:peak_bond", peak in (3, 4, 5), float(peak), None, "expected bond 3, 4 or 5")
    slope_normal = _decay_slope(results["normal"])
    slope_levy = _decay_slope(results["levy"])
    ctx.bundle.add_check(
        "levy:slower_decay",
        slope_levy > slope_normal,
        slope_levy,
        slope_normal,
        "mean log2 decrement after the peak, Levy vs normal",
    )


# fig6: end-to-end statistical pass


def _fig6_point(case: tuple) -> Dict[str, Any]:
    name, params, repetitions, seed = case
    cfg = _run_config(params, n_layers=2, eps_trunc=1e-3)
    m = build_mps(cfg)
    result = build_encoding_circuit(m, n_layers=2, eps_trunc=cfg.eps_trunc, chi_sim=cfg.chi_sim)
    dist = params.to_spec()
    reports = []
    first_hist = None
    for rep in range(repetitions):
        report, hist = evaluate_circuit(
            result.circuit, dist, m, cfg.shots, cfg.ks_samples, seed=seed + rep, chi_sim=cfg.chi_sim
        )
        reports.append(report)
        if first_hist is None:
            first_hist = hist
    step = dist.L / 2.0**params.n_qubits
    plot = [
        {
            "case": name,
            "x": row["x"],
            "count": row["count"],
            "empirical_pdf": row["count"] / (first_hist.shots * step),
        }
        for row in first_hist.to_rows()
    ]
    return {
        "name": name,
        "n_qubits": params.n_qubits,
        "pass_rate": float(np.mean([r.passed(KS_ALPHA) for r in reports])),
        "ks_pvalues": [r.ks_pvalue for r in reports],
        "kl": reports[0].kl,
        "plot": plot,
    }


def _fig6(ctx: _Context) -> None:
    sizes = [10] if ctx.quick else [10, 20]
    repetitions = 3 if ctx.quick else 10
    cases = []
    for n in sizes:
        cases += [
            (f"levy_n{n}", _params(DistributionKind.LEVY, n, scale=1.0, L=32.0), repetitions, ctx.seed),
            (f"log_normal_n{n}", _params(DistributionKind.LOG_NORMAL, n, mu=0.0, scale=0.5, L=4.0), repetitions, ctx.seed),
            (f"gamma_n{n}", _params(DistributionKind.GAMMA, n, shape=2.0, scale=0.5, L=5.0), repetitions, ctx.seed),
        ]
    results = ctx.pmap(_fig6_point, cases)
    ctx.csv("plot_data.csv", [row for r in results for row in r["plot"]])
    ctx.csv(
        "ks_runs.csv",
        [
            {"case": r["name"], "repetition": i, "ks_pvalue": p}
            for r in results
            for i, p in enumerate(r["ks_pvalues"])
        ],
    )
    for r in results:
        ctx.bundle.add_check(
            f"{r['name']}:ks_pass_rate", r["pass_rate"] >= STAT_PASS_RATE, r["pass_rate"], STAT_PASS_RATE
        )


# table1 / table2: KL, KS, depth and CNOT statistics


def _table_settings(quick: bool) -> Dict[str, List[DistributionParams]]:
    n = 10
    settings = {
        "normal": [_params(DistributionKind.NORMAL, n, mu=0.5, scale=s, L=1.0) for s in (0.08, 0.1, 0.125, 0.15, 0.2)],
        "log_normal": [
            _params(DistributionKind.LOG_NORMAL, n, mu=0.0, scale=s, L=L)
            for s, L in ((0.3, 3.0), (0.4, 4.0), (0.5, 4.0), (0.6, 5.0), (0.75, 6.0))
        ],
        "levy": [_params(DistributionKind.LEVY, n, scale=c, L=L) for c, L in ((0.5, 8.0), (1.0, 16.0), (1.0, 32.0), (2.0, 32.0), (4.0, 64.0))],
    }
    if quick:
        settings = {name: points[:2] for name, points in settings.items()}
    return settings


def _table_point(case: tuple) -> Dict[str, Any]:
    family, params, eps_trunc, seed = case
    cfg = _run_config(params, n_layers=2, eps_trunc=eps_trunc)
    m = build_mps(cfg)
    result = build_encoding_circuit(m, n_layers=2, eps_trunc=eps_trunc, chi_sim=cfg.chi_sim)
    report, _ = evaluate_circuit(result.circuit, params.to_spec(), m, cfg.shots, cfg.ks_samples, seed=seed, chi_sim=cfg.chi_sim)
    return {
        "distribution": family,
        "scale": params.scale,
        "L": params.L,
        "eps_trunc": eps_trunc,
        "kl": report.kl,
        "ks_pvalue": report.ks_pvalue,
        "ks_passed": report.passed(KS_ALPHA),
        "depth": report.depth,
        "cnot_count": report.cnot_count,
        "fidelity": report.fidelity,
    }


def _table_rows(ctx: _Context, eps_trunc: float) -> List[Dict[str, Any]]:
    cases = [
        (family, params, eps_trunc, ctx.seed + i)
        for family, points in _table_settings(ctx.quick).items()
        for i, params in enumerate(points)
    ]
    return ctx.pmap(_table_point, cases)


def _summarize(rows: List[Dict[str, Any]]) -> Dict[str, Dict[str, float]]:
    summary: Dict[str, Dict[str, float]] = {}
    for family in TABLE_REFERENCE:
        picked = [r for r in rows if r["distribution"] == family]
        if not picked:
            continue
        summary[family] = {}
        for key in ("kl", "depth", "cnot_count"):
            values = np.array([r[key] for r in picked], dtype=float)
            summary[family][f"{key}_mean"] = float(values.mean())
            summary[family][f"{key}_std"] = float(values.std())
        summary[family]["ks_pass_rate"] = float(np.mean([r["ks_passed"] for r in picked]))
    return summary


def _within(value: float, reference: float) -> bool:
    return abs(value - reference) <= METRIC_TOLERANCE * reference


def _table1(ctx: _Context) -> None:
    rows = _table_rows(ctx, 1e-3)
    ctx.csv("runs.csv", rows)
    summary = _summarize(rows)
    ctx.csv("summary.csv", [{"distribution": family, **values} for family, values in summary.items()])
    ctx.bundle.summary["eps_trunc=1e-3"] = summary
    for family, values in summary.items():
        ref = TABLE_REFERENCE[family]
        ctx.bundle.add_check(f"{family}:kl_mean", values["kl_mean"] <= KL_LIMIT, values["kl_mean"], KL_LIMIT)
        ctx.bundle.add_check(f"{family}:ks_pass_rate", values["ks_pass_rate"] >= KS_PASS_RATE, values["ks_pass_rate"], KS_PASS_RATE)
        ctx.bundle.add_check(
            f"{family}:cnot_count", _within(values["cnot_count_mean"], ref["cnot_count"]), values["cnot_count_mean"], ref["cnot_count"]
        )
        ctx.bundle.add_check(f"{family}:depth", _within(values["depth_mean"], ref["depth"]), values["depth_mean"], ref["depth"])


def _table2(ctx: _Context) -> None:
    coarse = _table_rows(ctx, 1e-3)
    fine = _table_rows(ctx, 1e-4)
    ctx.csv("runs.csv", coarse + fine)
    coarse_summary = _summarize(coarse)
    fine_summary = _summarize(fine)
    ctx.csv(
        "summary.csv",
        [{"distribution": family, "eps_trunc": 1e-3, **values} for family, values in coarse_summary.items()]
        + [{"distribution": family, "eps_trunc": 1e-4, **values} for family, values in fine_summary.items()],
    )
    ctx.bundle.summary["eps_trunc=1e-3"] = coarse_summary
    ctx.bundle.summary["eps_trunc=1e-4"] = fine_summary
    ctx.bundle.summary["reference_eps_trunc=1e-4"] = TABLE_REFERENCE_FINE
    for family in coarse_summary:
        a, b = coarse_summary[family], fine_summary[family]
        ctx.bundle.add_check(
            f"{family}:cnot_not_decreasing", b["cnot_count_mean"] >= a["cnot_count_mean"], b["cnot_count_mean"], a["cnot_count_mean"]
        )
        # KL comes from exact amplitudes; allow round-off.
        ctx.bundle.add_check(
            f"{family}:kl_not_increasing", b["kl_mean"] <= a["kl_mean"] * (1.0 + 1e-9) + 1e-15, b["kl_mean"], a["kl_mean"]
        )


_TARGETS: Dict[str, Callable[[_Context], None]] = {
    "fig2": _fig2,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "table1": _table1,
    "table2": _table2,
}


def cmd_reproduce(
    target: ReproduceTarget,
    quick: bool = False,
    output_dir: Optional[str] = None,
    workers: Optional[int] = None,
    seed: int = 0,
) -> ReproductionBundle:
    """Run one reproduction target and write its bundle. A failed sub-run fails the bundle."""
    settings = get_settings()
    out = artifacts.run_dir(output_dir or settings.output_dir, f"{artifacts.REPRODUCE_DIR}/{target}")
    bundle = ReproductionBundle(target=target, quick=quick)
    ctx = _Context(target, quick, out, workers or settings.workers, seed, bundle)
    try:
        _TARGETS[target](ctx)
    except Exception as e:
        logger.exception("Reproduction %s aborted", target, extra={"command": "reproduce", "target": target})
        bundle.add_check("run", False, detail=f"{type(e).__name__}: {e}")
    artifacts.write_text(out / BUNDLE_FILE, bundle.to_json() + "\n")

    failed = [c.name for c in bundle.checks if not c.passed]
    log = logger.info if not failed else logger.warning
    log(
        "Reproduction %s: %d/%d checks passed",
        target,
        len(bundle.checks) - len(failed),
        len(bundle.checks),
        extra={"command": "reproduce", "target": target, "passed": bundle.passed, "quick": quick},
    )
    for name in failed:
        logger.warning("Check failed: %s", name, extra={"command": "reproduce", "target": target})
    return bundle
