"""YAML reports for portfolio and estimate runs, and manifest replay."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import yaml

from ising_mcp.bifurcation import BifurcationEstimate
from ising_mcp.config import utc_now
from ising_mcp.dynamics import ModelKind
from ising_mcp.errors import IsingError
from ising_mcp.harness import (SCHEMA_VERSION, ModelSummary, PortfolioReport, TrialRecord, run_portfolio,
                               spec_from_manifest)

logger = logging.getLogger(__name__)


def report_to_dict(report: PortfolioReport) -> dict[str, Any]:
    models = {}
    for model, summary in report.models.items():
        models[model.value] = {
            "best_cut": summary.best_cut,
            "success_count": summary.success_count,
            "histogram": [{"H": h, "count": c} for h, c in summary.histogram.items()],
            "trials": [
                {"trial_id": r.trial_id, "H": r.H, "cut": r.cut,
                 "spin_hash": r.spin_hash, "initial_digest": r.initial_digest}
                for r in summary.trials
            ],
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "manifest": report.manifest,
        "models": models,
        "portfolio": {
            "best_cut": report.portfolio_best_cut,
            "preferred_model": report.preferred_model,
        },
        "metadata": dict(report.metadata),
    }


def report_from_dict(data: dict[str, Any]) -> PortfolioReport:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise IsingError(f"unsupported report schema version {version!r} (expected {SCHEMA_VERSION})")
    models = {}
    for name, body in data["models"].items():
        model = ModelKind(name)
        trials = tuple(
            TrialRecord(trial_id=int(t["trial_id"]), H=float(t["H"]), cut=float(t["cut"]),
                        spin_hash=str(t["spin_hash"]), initial_digest=str(t["initial_digest"]))
            for t in body["trials"]
        )
        models[model] = ModelSummary(model=model, trials=trials)
    return PortfolioReport(manifest=data["manifest"], models=models, metadata=data.get("metadata") or {})


def _dump(data: dict[str, Any], path: Path) -> None:
    try:
        with path.open("w", encoding="utf-8") as fh:
            yaml.safe_dump(data, fh, sort_keys=False, default_flow_style=False)
    except OSError as exc:
        raise IsingError(f"cannot write report {path}: {exc}") from exc


def export_report(report: PortfolioReport, path: str | Path, stamp: bool = True) -> None:
    """Write the report; the timestamp lives only in the metadata block."""
    path = Path(path)
    data = report_to_dict(report)
    if stamp:
        data["metadata"] = {**data["metadata"], "written_at": utc_now()}
    _dump(data, path)
    logger.info("Wrote report %s", path)


def load_report(path: str | Path) -> PortfolioReport:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise IsingError(f"cannot read report {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise IsingError(f"invalid report {path}: {exc}") from exc
    if not isinstance(data, dict) or "manifest" not in data:
        raise IsingError(f"{path} is not a portfolio report")
    return report_from_dict(data)


def export_estimate(estimate: BifurcationEstimate, manifest: dict[str, Any], path: str | Path) -> None:
    path = Path(path)
    _dump({
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest,
        "estimate": estimate.to_dict(),
        "metadata": {"written_at": utc_now()},
    }, path)
    logger.info("Wrote estimate %s", path)


def replay(path: str | Path, workers: int = 1) -> PortfolioReport:
    """Rerun the portfolio described by an exported report's manifest."""
    manifest = load_report(path).manifest
    spec = spec_from_manifest(manifest, workers=workers)
    g = spec.graph_source.load()
    if g.digest != manifest["graph"]["digest"]:
        raise IsingError(f"graph for {path} no longer matches the recorded digest")
    return run_portfolio(spec, graph=g)
