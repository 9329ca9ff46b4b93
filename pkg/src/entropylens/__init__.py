"""Entropy-based identifiability analysis and privacy-aware schema planning
for tabular data."""

from .analysis import analyze
from .dataset import (
    ColumnClass,
    ColumnMeta,
    ColumnSubset,
    Dataset,
    EquivalenceBlock,
    PartitionIndex,
    build_partition,
    load_dataset,
    refine_partition,
)
from .entropy import (
    AuxModel,
    IppValue,
    SubsetRiskSummary,
    baseline_entropy,
    identifiability_entropy,
    ipp,
    subset_risk_profile,
)
from .estimators import ConsentMinimizer, DirectIdentifierHider, Generalizer, RiskAnalyzer
from .hierarchies import GeneralizationHierarchy, hierarchy_from_config
from .linkage import LinkSpec, attach_linked_table
from .report import AnalysisBundle, build_bundle, parse_bundle, render_report
from .risky import (
    RiskPolicy,
    RiskReport,
    brute_force_oracle,
    find_risky_combinations,
    minimal_risky_sets,
    risky_attribute_set,
)
from .strategies import (
    AbstractionPlan,
    HidingPlan,
    MinimizationPlan,
    SeparationPlan,
    apply_generalization,
    apply_hiding,
    apply_minimization,
    plan_hiding,
    plan_minimization,
    plan_separation,
    recommend_abstraction,
    verify_separation,
)

__version__ = "1.0.0"
