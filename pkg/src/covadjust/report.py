"""Audit reports: a versioned JSON document plus a plain-text ledger table."""

import json
import math
from dataclasses import asdict, dataclass
from importlib import resources

import numpy as np

from . import __version__
from .decomposition import audit

SCHEMA_VERSION = "1.0"


@dataclass(frozen=True)
class AuditReport:
    scenario: dict
    fit: dict
    ss: dict
    ledger: dict
    areas: dict
    r2: dict
    seed: object
    n: int
    tool_version: str = __version__
    schema_version: str = SCHEMA_VERSION

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        # sort_keys + fixed indent: identical inputs give byte-identical files
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, doc):
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {doc.get('schema_version')!r}")
        return cls(**doc)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def load_schema():
    """The JSON Schema describing `AuditReport.to_json` output."""
    text = resources.files(__package__).joinpath("schemas/audit_report.schema.json").read_text()
    return json.loads(text)


def _simple_slope(x, y):
    xc = x - x.mean()
    return float(xc @ y / (xc @ xc))


def build_report(d, spec, scenario, seed=None):
    """Run the full decomposition of `d` under `spec` and package it."""
    a = audit(d, spec)
    y = d.column(spec.outcome)
    coefficients = {}
    for nm in spec.regressors:
        coefficients[nm] = {
            "marginal_b": _simple_slope(d.column(nm), y),
            "adjusted_b": a.adjusted_coefficients[nm],
            "full_model_b": a.fit.coefficients[nm],
            "standardized_beta": a.standardized[nm],
            "residualized_variance": a.fit.partial_sd[nm] ** 2,
        }
    report = AuditReport(
        scenario=dict(scenario),
        fit={
            "outcome": spec.outcome,
            "regressors": list(spec.regressors),
            "intercept": a.fit.intercept,
            "coefficients": coefficients,
        },
        ss=a.ss.to_dict(),
        ledger=a.ledger.to_dict(),
        areas=a.areas.to_dict(),
        r2={
            **a.r2.to_dict(),
            "adjusted_population_r2": a.r2.via_variance_components,
            "original_population_r2": a.r2.conventional_r2,
        },
        seed=seed,
        n=d.n,
    )
    _check_finite(report.to_dict())
    return report


def _check_finite(node, path="report"):
    if isinstance(node, dict):
        for k, v in node.items():
            _check_finite(v, f"{path}.{k}")
    elif isinstance(node, (list, tuple)):
        for i, v in enumerate(node):
            _check_finite(v, f"{path}[{i}]")
    elif isinstance(node, (float, np.floating)) and not math.isfinite(node):
        raise ValueError(f"non-finite value at {path}")


def format_ledger(report):
    """Human-readable summary of the ledger, areas and both R-squared values."""
    led, areas, r2 = report.ledger, report.areas, report.r2
    rows = [("term", "b.adjusted", "beta", "SS(unique)", "variance")]
    for nm, c in report.fit["coefficients"].items():
        rows.append((
            nm,
            f"{c['adjusted_b']:.6f}",
            f"{c['standardized_beta']:.6f}",
            f"{report.ss['per_regressor_ss'][nm]:.4f}",
            f"{led['component_variance'][nm]:.6f}",
        ))
    rows.append(("error", "", "", f"{report.ss['sse']:.4f}", f"{led['error_variance']:.6f}"))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows]
    lines += [
        "",
        f"ledger total (model + error)   {led['ledger_total']:.6f}",
        f"variance of {report.fit['outcome']:<18} {led['outcome_variance']:.6f}",
        f"shared area (lacuna)           {areas['shared_area']:.6f}"
        f"  ({100 * areas['shared_fraction']:.2f}% of outcome variance)",
        f"SS total by parts              {report.ss['total_by_parts']:.4f}",
        f"SS total (corrected)           {report.ss['corrected_total_ss']:.4f}",
        f"adjusted-population R^2        {r2['adjusted_population_r2']:.6f}",
        f"original-population R^2        {r2['original_population_r2']:.6f}",
    ]
    if areas["suppression"]:
        lines.append("warning: negative shared area (suppression)")
    return "\n".join(lines)
