"""Levelwise discovery of risky quasi-identifier combinations.

A column subset is risky when the policy trigger fires on the per-record
privacy ratios (some record at or below the threshold, or at least a given
fraction of records). Risk is upward closed: adding columns can only refine
partitions and lower ratios. The miner exploits this with apriori-style
candidate generation over a tabulation table of partitions: each level-k
partition is one refinement step away from its level-(k-1) parent, and any
superset of a risky set is marked risky by implication without being
evaluated.

``brute_force_oracle`` computes the same report by independently building
every subset's partition from scratch; it is the correctness reference for
the pruned miner.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .dataset import (
    ColumnSubset,
    Dataset,
    PartitionIndex,
    build_partition,
    refine_partition,
    subset_sort_key,
)
from .entropy import AuxModel, SubsetRiskSummary, record_epsilons, summarize_epsilons
from .errors import (
    InvalidPolicy,
    NoQuasiColumns,
    TooManyColumns,
    UnknownRecord,
)

TRIGGER_ANY_RECORD = "any_record"
TRIGGER_FRACTION = "fraction_at_least"


@dataclass(frozen=True)
class RiskPolicy:
    """Consent-derived risk threshold plus enumeration bounds."""

    epsilon0: float
    max_subset_size: int = 4
    trigger: str = TRIGGER_ANY_RECORD
    fraction: float | None = None

    def __post_init__(self):
        if not 0.0 < self.epsilon0 <= 1.0:
            raise InvalidPolicy(f"epsilon0 must be in (0, 1], got {self.epsilon0}")
        if self.max_subset_size < 1:
            raise InvalidPolicy(f"max_subset_size must be >= 1, got {self.max_subset_size}")
        if self.trigger == TRIGGER_FRACTION:
            if self.fraction is None or not 0.0 < self.fraction <= 1.0:
                raise InvalidPolicy(f"fraction must be in (0, 1], got {self.fraction}")
        elif self.trigger != TRIGGER_ANY_RECORD:
            raise InvalidPolicy(f"unknown trigger {self.trigger!r}")

    def fires(self, summary: SubsetRiskSummary, any_at_risk: bool) -> bool:
        if self.trigger == TRIGGER_ANY_RECORD:
            return any_at_risk
        return summary.at_risk_fraction >= self.fraction


@dataclass
class RiskReport:
    """Everything the analysis learned about subset risk.

    ``evaluated`` holds per-subset summaries for every subset whose partition
    was actually built; subsets in ``by_implication`` were skipped because a
    proper subset is already risky. ``minimal_risky`` is the antichain that
    summarizes the whole risky family by upward closure.
    """

    policy: RiskPolicy
    aux: AuxModel
    n_records: int
    column_order: tuple[str, ...]
    evaluated: dict[ColumnSubset, SubsetRiskSummary]
    risky: frozenset[ColumnSubset]
    by_implication: frozenset[ColumnSubset]
    minimal_risky: tuple[ColumnSubset, ...]
    per_record: dict[int, tuple[ColumnSubset, ...]]
    already_identified: tuple[int, ...]
    at_risk_records: dict[ColumnSubset, tuple[int, ...]] = field(default_factory=dict)

    def all_risky(self) -> frozenset[ColumnSubset]:
        return self.risky | self.by_implication


def minimal_risky_sets(report: RiskReport) -> tuple[ColumnSubset, ...]:
    """Risky subsets none of whose proper subsets is risky (an antichain)."""
    family = report.all_risky()
    position = {name: i for i, name in enumerate(report.column_order)}
    minimal = [
        s for s in family
        if not any(o != s and o.issubset(s) for o in family)
    ]
    return tuple(sorted(
        minimal, key=lambda s: (len(s), tuple(position[c] for c in s.columns))
    ))


def risky_attribute_set(report: RiskReport, record_id: int) -> list[ColumnSubset]:
    """Minimal risky subsets that put this specific record at risk."""
    if not 0 <= record_id < report.n_records:
        raise UnknownRecord(f"record {record_id} outside 0..{report.n_records - 1}")
    return list(report.per_record.get(record_id, ()))


def _assemble(dataset: Dataset, aux: AuxModel, policy: RiskPolicy, k_max: int,
              quasi: tuple[str, ...],
              evaluated: dict[ColumnSubset, SubsetRiskSummary],
              risky: set[ColumnSubset],
              at_risk_records: dict[ColumnSubset, np.ndarray],
              already: np.ndarray) -> RiskReport:
    minimal = sorted(
        (s for s in risky if not any(o != s and o.issubset(s) for o in risky)),
        key=lambda s: subset_sort_key(dataset, s),
    )
    by_implication = set()
    for k in range(1, k_max + 1):
        for combo in combinations(quasi, k):
            s = ColumnSubset.of(dataset, combo)
            if s not in evaluated:
                by_implication.add(s)
    lists: dict[int, list[ColumnSubset]] = {}
    for s in minimal:
        for r in at_risk_records.get(s, ()):
            lists.setdefault(int(r), []).append(s)
    per_record = {r: tuple(v) for r, v in sorted(lists.items())}
    return RiskReport(
        policy=policy,
        aux=aux,
        n_records=dataset.n_records,
        column_order=dataset.column_names,
        evaluated=evaluated,
        risky=frozenset(risky),
        by_implication=frozenset(by_implication),
        minimal_risky=tuple(minimal),
        per_record=per_record,
        already_identified=tuple(int(i) for i in np.nonzero(already)[0]),
        at_risk_records={
            s: tuple(int(r) for r in rs) for s, rs in at_risk_records.items()
        },
    )


def _evaluate(partition: PartitionIndex, baseline: PartitionIndex,
              policy: RiskPolicy) -> tuple[SubsetRiskSummary, np.ndarray]:
    eps, already = record_epsilons(partition, baseline)
    summary = summarize_epsilons(eps, already, policy.epsilon0)
    at_risk = np.nonzero((eps <= policy.epsilon0) & ~already)[0]
    return summary, at_risk


def find_risky_combinations(dataset: Dataset, aux: AuxModel,
                            policy: RiskPolicy) -> RiskReport:
    """Levelwise miner with tabulated partitions and apriori pruning."""
    quasi = dataset.quasi_columns
    if not quasi:
        raise NoQuasiColumns("dataset has no quasi-identifier columns")
    k_max = min(policy.max_subset_size, len(quasi))
    baseline = build_partition(dataset, aux.subset(dataset))
    _, already = record_epsilons(baseline, baseline)

    evaluated: dict[ColumnSubset, SubsetRiskSummary] = {}
    risky: set[ColumnSubset] = set()
    at_risk_records: dict[ColumnSubset, np.ndarray] = {}

    # level 1: every singleton, refined directly off the baseline partition
    level: dict[ColumnSubset, PartitionIndex] = {}
    for name in quasi:
        s = ColumnSubset.of(dataset, [name])
        part = baseline if name in aux.known_columns else refine_partition(baseline, name)
        summary, at_risk = _evaluate(part, baseline, policy)
        evaluated[s] = summary
        if policy.fires(summary, len(at_risk) > 0):
            risky.add(s)
            at_risk_records[s] = at_risk
        else:
            level[s] = part

    for _k in range(2, k_max + 1):
        survivors = sorted(level, key=lambda s: subset_sort_key(dataset, s))
        next_level: dict[ColumnSubset, PartitionIndex] = {}
        for i, a in enumerate(survivors):
            for b in survivors[i + 1:]:
                if a.columns[:-1] != b.columns[:-1]:
                    continue
                candidate = ColumnSubset.of(dataset, a.columns + b.columns[-1:])
                # all other (k-1)-subsets must have survived too
                if any(
                    ColumnSubset(candidate.columns[:j] + candidate.columns[j + 1:])
                    not in level
                    for j in range(len(candidate.columns) - 2)
                ):
                    continue
                new_col = candidate.columns[-1]
                if new_col in aux.known_columns:
                    part = level[a]
                else:
                    part = refine_partition(level[a], new_col)
                summary, at_risk = _evaluate(part, baseline, policy)
                evaluated[candidate] = summary
                if policy.fires(summary, len(at_risk) > 0):
                    risky.add(candidate)
                    at_risk_records[candidate] = at_risk
                else:
                    next_level[candidate] = part
        level = next_level  # level-(k-1) partitions dropped here
        if not level:
            break

    return _assemble(dataset, aux, policy, k_max, quasi, evaluated, risky,
                     at_risk_records, already)


def brute_force_oracle(dataset: Dataset, aux: AuxModel,
                       policy: RiskPolicy) -> RiskReport:
    """Exhaustive reference: every subset evaluated independently, no
    refinement reuse, no pruning. Semantically identical report."""
    quasi = dataset.quasi_columns
    if not quasi:
        raise NoQuasiColumns("dataset has no quasi-identifier columns")
    if len(quasi) > 20:
        raise TooManyColumns(f"{len(quasi)} quasi columns exceed the oracle guard of 20")
    k_max = min(policy.max_subset_size, len(quasi))
    baseline = build_partition(dataset, aux.subset(dataset))
    _, already = record_epsilons(baseline, baseline)

    all_results: dict[ColumnSubset, tuple[SubsetRiskSummary, np.ndarray]] = {}
    risky: set[ColumnSubset] = set()
    for k in range(1, k_max + 1):
        for combo in combinations(quasi, k):
            s = ColumnSubset.of(dataset, combo)
            part = build_partition(dataset, s.union(dataset, aux.known_columns))
            summary, at_risk = _evaluate(part, baseline, policy)
            all_results[s] = (summary, at_risk)
            if policy.fires(summary, len(at_risk) > 0):
                risky.add(s)

    # mirror the pruned miner's report shape: subsets with a risky proper
    # subset carry no summary (they would not have been evaluated)
    evaluated: dict[ColumnSubset, SubsetRiskSummary] = {}
    at_risk_records: dict[ColumnSubset, np.ndarray] = {}
    for s, (summary, at_risk) in all_results.items():
        if any(o != s and o.issubset(s) for o in risky):
            continue
        evaluated[s] = summary
        if s in risky:
            at_risk_records[s] = at_risk
    risky &= set(evaluated)
    return _assemble(dataset, aux, policy, k_max, quasi, evaluated, risky,
                     at_risk_records, already)
