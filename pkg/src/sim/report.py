"""Rendering simulation, verification and single-sample reports as text, CSV or JSON."""
import json
from typing import Dict, List, Optional

import pandas as pd

from .. import config
from .simulation import SimulationResult
from .verification import VerificationReport

FORMATS = ("text", "csv", "json")
FLOAT_FORMAT = "%.6f"


def simulation_frame(result: SimulationResult) -> pd.DataFrame:
    """Long table with one row per (cell, method, metric, alpha); columns are CSV_COLUMNS."""
    cfg = result.config
    rows: List[Dict] = []

    def add(cell, method: str, metric: str, alpha, estimate, stderr=None):
        value, err = (estimate.value, estimate.stderr) if stderr is None else (estimate, stderr)
        rows.append({
            "rho": cell.rho, "n": cell.n, "method": method, "metric": metric, "alpha": alpha,
            "value": value, "stderr": err, "replications": cfg.replications,
            "bootstrap_size": cfg.bootstrap_size, "seed": cfg.master_seed,
        })

    for cell in result.cells:
        add(cell, "oracle", "true_xi", None, cell.true_xi, 0.0)
        add(cell, "oracle", "variance_target", None, cell.target, 0.0)
        add(cell, "xi_n", "mean", None, cell.mean_xi)
        add(cell, "xi_n", "n_var", None, cell.n_var_xi, float("nan"))
        add(cell, "V-B1", "rmse", None, cell.rmse_b1)
        add(cell, "V-B1", "mean", None, cell.mean_var_b1)
        add(cell, "V-B2", "rmse", None, cell.rmse_b2)
        add(cell, "V-B2", "mean", None, cell.mean_var_b2)
        add(cell, "bootstrap", "mean_xib", None, cell.mean_xib)
        add(cell, "bootstrap", "degenerate_redraws", None, float(cell.degenerate_redraws), 0.0)
        for (method, alpha), estimate in cell.coverage.items():
            add(cell, method.value, "coverage", alpha, estimate)
    return pd.DataFrame(rows, columns=config.CSV_COLUMNS)


def simulation_table(result: SimulationResult) -> pd.DataFrame:
    """Wide summary: one row per (rho, n) with RMSEs and coverages side by side."""
    frame = simulation_frame(result)
    picked = frame[frame["metric"].isin(["rmse", "coverage"])].copy()
    picked["column"] = picked["method"] + " " + picked["metric"] + picked["alpha"].map(
        lambda a: "" if pd.isna(a) else f" {a:g}")
    table = picked.pivot_table(index=["rho", "n"], columns="column", values="value", sort=False)
    return table.reset_index()


def simulation_json(result: SimulationResult) -> dict:
    cfg = result.config
    return {
        "schema_version": result.schema_version,
        "config": {
            "rho_grid": cfg.rho_grid,
            "n_grid": cfg.n_grid,
            "replications": cfg.replications,
            "bootstrap_size": cfg.bootstrap_size,
            "alphas": cfg.alphas,
            "master_seed": cfg.master_seed,
            "variance_targets": {str(k): v for k, v in cfg.variance_targets.items()},
            "statistic": cfg.statistic.value,
        },
        "cells": [
            {
                "rho": c.rho,
                "n": c.n,
                "true_xi": c.true_xi,
                "variance_target": c.target,
                "rmse_b1": c.rmse_b1.value,
                "rmse_b2": c.rmse_b2.value,
                "coverage": [
                    {"method": m.value, "alpha": a, "value": e.value, "stderr": e.stderr}
                    for (m, a), e in c.coverage.items()
                ],
                "mean_xi": c.mean_xi.value,
                "n_var_xi": c.n_var_xi,
                "mean_var_b1": c.mean_var_b1.value,
                "mean_var_b2": c.mean_var_b2.value,
                "mean_xib": c.mean_xib.value,
                "degenerate_redraws": c.degenerate_redraws,
            }
            for c in result.cells
        ],
    }


def render_simulation(result: SimulationResult, fmt: str) -> str:
    """
    Serialize a simulation result.

    Wall-clock timings are left out so that reruns produce identical bytes.
    """
    if fmt == "csv":
        return simulation_frame(result).to_csv(index=False, float_format=FLOAT_FORMAT)
    if fmt == "json":
        return json.dumps(simulation_json(result), indent=2) + "\n"
    lines = [
        f"Bootstrap study: R={result.config.replications}, B={result.config.bootstrap_size}, "
        f"seed={result.config.master_seed}",
        "",
        simulation_table(result).to_string(index=False, float_format=lambda v: f"{v:.3f}"),
        "",
        config.INCONSISTENCY_WARNING,
    ]
    return "\n".join(lines) + "\n"


def render_verification(report: VerificationReport, fmt: str) -> str:
    frame = pd.DataFrame([
        {"check": c.name, "passed": c.passed, "observed": c.observed, "expected": c.expected,
         "tolerance": c.tolerance, "detail": c.detail}
        for c in report.checks
    ])
    if fmt == "csv":
        return frame.to_csv(index=False)
    if fmt == "json":
        return json.dumps({
            "schema_version": config.SCHEMA_VERSION,
            "level": report.level.value,
            "seed": report.seed,
            "passed": report.passed,
            "checks": frame.to_dict(orient="records"),
        }, indent=2) + "\n"
    lines = [f"{'✓' if c.passed else '❌'} {c.name}: observed {c.observed:.6g}, "
             f"expected {c.expected:.6g} (tol {c.tolerance:.3g}) {c.detail}".rstrip()
             for c in report.checks]
    verdict = "all checks passed" if report.passed else f"{len(report.failures)} check(s) failed"
    lines.append(f"\n{verdict} ({len(report.checks)} checks, {report.level.value} level)")
    return "\n".join(lines) + "\n"


def render_record(record: Dict, fmt: str, title: Optional[str] = None,
                  warning: Optional[str] = None) -> str:
    """One flat record (xi or bootstrap summary) as aligned text, a one-row CSV, or JSON."""
    if fmt == "csv":
        row = {**record, "warning": warning} if warning else record
        return pd.DataFrame([row]).to_csv(index=False, float_format=FLOAT_FORMAT)
    if fmt == "json":
        payload = {"schema_version": config.SCHEMA_VERSION, **record}
        if warning:
            payload["warning"] = warning
        return json.dumps(payload, indent=2) + "\n"
    width = max(len(k) for k in record)
    lines = [title, "=" * 70] if title else []
    for key, value in record.items():
        shown = f"{value:.6f}" if isinstance(value, float) else ("-" if value is None else value)
        lines.append(f"{key:<{width}}  {shown}")
    if warning:
        lines += ["", f"⚠️  {warning}"]
    return "\n".join(lines) + "\n"
