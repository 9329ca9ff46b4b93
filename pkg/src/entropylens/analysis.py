"""High-level analysis entry point shared by the CLI, the HTTP service, and
the estimator wrappers, so every surface produces identical bundles."""

from __future__ import annotations

from .dataset import Dataset
from .entropy import AuxModel
from .report import AnalysisBundle, build_bundle
from .risky import RiskPolicy, find_risky_combinations


def analyze(dataset: Dataset, aux: AuxModel, policy: RiskPolicy,
            log_base: float = 2.0, plans: dict | None = None) -> AnalysisBundle:
    report = find_risky_combinations(dataset, aux, policy)
    return build_bundle(dataset, aux, policy, report, log_base=log_base,
                        plans=plans)
