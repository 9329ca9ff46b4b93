"""Canonical serialization of analyses and plans.

One JSON schema is shared by the CLI and the HTTP service, rendered through
the same code path so their outputs are byte-identical. Canonicalization
rules: fixed key order, column-name lists sorted alphabetically, subset
families sorted lexicographically, floats rounded to 12 significant digits.
Rendering the same bundle twice, or parsing and re-rendering, produces
identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .dataset import Dataset
from .entropy import AuxModel
from .errors import MalformedDocument, SchemaVersionMismatch
from .risky import TRIGGER_ANY_RECORD, RiskPolicy, RiskReport

SCHEMA_VERSION = "1.0.0"


def _round(value: float) -> float:
    return float(f"{value:.12g}")


def _subset_names(subset) -> list[str]:
    return sorted(subset.columns)


@dataclass(frozen=True)
class AnalysisBundle:
    """Plain-data view of one analysis, mirroring the JSON schema."""

    payload: dict

    @property
    def version(self) -> str:
        return self.payload["version"]

    @property
    def minimal_risky(self) -> list[list[str]]:
        return self.payload["minimal_risky"]

    @property
    def per_record(self) -> dict:
        return self.payload["per_record"]

    @property
    def config(self) -> dict:
        return self.payload["config"]

    @property
    def subsets(self) -> list[dict]:
        return self.payload["subsets"]

    @property
    def plans(self) -> dict:
        return self.payload.get("plans") or {}


def _trigger_doc(policy: RiskPolicy):
    if policy.trigger == TRIGGER_ANY_RECORD:
        return "any_record"
    return {"fraction_at_least": _round(policy.fraction)}


def build_bundle(dataset: Dataset, aux: AuxModel, policy: RiskPolicy,
                 report: RiskReport, log_base: float = 2.0,
                 plans: dict | None = None) -> AnalysisBundle:
    subsets = []
    ordered = sorted(
        list(report.evaluated) + list(report.by_implication),
        key=lambda s: (len(s), _subset_names(s)),
    )
    for s in ordered:
        summary = report.evaluated.get(s)
        subsets.append({
            "columns": _subset_names(s),
            "min_epsilon": _round(summary.min_epsilon) if summary else None,
            "mean_epsilon": _round(summary.mean_epsilon) if summary else None,
            "at_risk_fraction": _round(summary.at_risk_fraction) if summary else None,
            "unique_records": list(summary.unique_records) if summary else None,
            "risky": s in report.risky or s in report.by_implication,
            "by_implication": s in report.by_implication,
        })
    payload = {
        "version": SCHEMA_VERSION,
        "dataset": {
            "digest": dataset.digest(),
            "n_records": dataset.n_records,
            "columns": [
                {"name": c.name, "class": c.column_class.value,
                 "consented": c.consented}
                for c in dataset.columns
            ],
        },
        "config": {
            "epsilon0": _round(policy.epsilon0),
            "k_max": policy.max_subset_size,
            "aux_columns": sorted(aux.known_columns),
            "log_base": _round(log_base),
            "risk_trigger": _trigger_doc(policy),
        },
        "subsets": subsets,
        "minimal_risky": sorted(_subset_names(s) for s in report.minimal_risky),
        "per_record": {
            str(r): sorted(_subset_names(s) for s in report.per_record[r])
            for r in sorted(report.per_record)
        },
        "already_identified": list(report.already_identified),
        "plans": plans or {},
    }
    return AnalysisBundle(payload=payload)


def _canonical(value):
    if isinstance(value, float):
        return _round(value)
    if isinstance(value, dict):
        return {k: _canonical(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_canonical(v) for v in value]
    return value


def render_report(bundle: AnalysisBundle, fmt: str = "json") -> bytes:
    if fmt == "json":
        text = json.dumps(_canonical(bundle.payload), indent=2,
                          ensure_ascii=False)
        return (text + "\n").encode("utf-8")
    if fmt == "table":
        return _render_table(bundle).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def _render_table(bundle: AnalysisBundle) -> str:
    p = bundle.payload
    lines = []
    cfg = p["config"]
    lines.append(f"dataset: {p['dataset']['n_records']} records, "
                 f"{len(p['dataset']['columns'])} columns "
                 f"(digest {p['dataset']['digest'][:12]})")
    lines.append(f"threshold epsilon0={cfg['epsilon0']}  k_max={cfg['k_max']}  "
                 f"aux={cfg['aux_columns'] or '[]'}")
    lines.append("")
    if p["minimal_risky"]:
        lines.append("minimal risky combinations:")
        for names in p["minimal_risky"]:
            entry = next(
                (s for s in p["subsets"] if s["columns"] == names), None)
            detail = ""
            if entry and entry["min_epsilon"] is not None:
                detail = (f"  min_eps={entry['min_epsilon']:.4f}"
                          f"  at_risk={entry['at_risk_fraction']:.3f}")
            lines.append(f"  {{{', '.join(names)}}}{detail}")
    else:
        lines.append(f"no risky combinations at epsilon0={cfg['epsilon0']}")
    if p["already_identified"]:
        lines.append("")
        lines.append("records identifiable from aux alone: "
                     + ", ".join(str(r) for r in p["already_identified"]))
    worst = sorted(
        ((rid, fam) for rid, fam in p["per_record"].items()),
        key=lambda t: (-len(t[1]), int(t[0])),
    )[:10]
    if worst:
        lines.append("")
        lines.append("most exposed records:")
        for rid, fam in worst:
            sets = "; ".join("{" + ", ".join(names) + "}" for names in fam)
            lines.append(f"  record {rid}: {sets}")
    for name, plan in bundle.plans.items():
        lines.append("")
        lines.append(f"plan [{name}]: {json.dumps(_canonical(plan))}")
    return "\n".join(lines) + "\n"


def parse_bundle(data: bytes) -> AnalysisBundle:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedDocument(str(exc)) from None
    if not isinstance(payload, dict):
        raise MalformedDocument("bundle document must be a JSON object")
    version = payload.get("version")
    required = ("dataset", "config", "subsets", "minimal_risky", "per_record")
    if version is None or any(k not in payload for k in required):
        raise MalformedDocument("missing required bundle keys")
    if str(version).split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise SchemaVersionMismatch(
            f"bundle version {version} incompatible with {SCHEMA_VERSION}")
    return AnalysisBundle(payload=payload)


# --- plan serialization helpers ---

def hiding_plan_doc(plan) -> dict:
    return {
        "vault_columns": sorted(plan.vault_columns),
        "surrogate_column_name": plan.surrogate_column_name,
        "working_columns": sorted(plan.working_columns),
        "noop": plan.is_noop,
    }


def separation_plan_doc(plan, violations: list[str]) -> dict:
    return {
        "groups": [sorted(g) for g in plan.groups],
        "unseparable": sorted(plan.unseparable),
        "violations": violations,
    }


def minimization_plan_doc(plan) -> dict:
    doc = {
        "strip_columns": sorted(plan.strip_columns),
        "retained": sorted(plan.retained),
    }
    if plan.before_minimal_risky is not None:
        doc["before_minimal_risky"] = sorted(
            sorted(s.columns) for s in plan.before_minimal_risky)
    if plan.after_minimal_risky is not None:
        doc["after_minimal_risky"] = sorted(
            sorted(s.columns) for s in plan.after_minimal_risky)
    return doc


def abstraction_plan_doc(plan) -> dict:
    return {
        "assignments": {c: plan.assignments[c] for c in sorted(plan.assignments)},
        "achieved": _round(plan.achieved),
        "target_met": plan.target_met,
    }
