"""Schema-transformation planners for the four data-oriented privacy
strategies: hide direct identifiers behind a vault, separate risky column
combinations across tables, strip non-consented columns, and generalize
values until no combination stays risky.

Planners are pure; ``apply_*`` functions return new datasets and never touch
their inputs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .dataset import (
    ColumnClass,
    ColumnMeta,
    ColumnSubset,
    Dataset,
    build_partition,
)
from .entropy import AuxModel, record_epsilons
from .errors import (
    NoHierarchies,
    NoHierarchy,
    SchemaMismatch,
    UnparseableCell,
)
from .risky import RiskPolicy, RiskReport, find_risky_combinations


# --- data hiding ---

@dataclass(frozen=True)
class HidingPlan:
    vault_columns: tuple[str, ...]
    surrogate_column_name: str
    working_columns: tuple[str, ...]

    @property
    def is_noop(self) -> bool:
        return not self.vault_columns


def plan_hiding(dataset: Dataset, surrogate_name: str = "local_id") -> HidingPlan:
    """Route every direct identifier to a restricted vault, referenced from
    the working table by a surrogate key."""
    vault = dataset.direct_columns
    working = tuple(c for c in dataset.column_names if c not in vault)
    name = surrogate_name
    suffix = 0
    while name in dataset.column_names:
        suffix += 1
        name = f"{surrogate_name}_{suffix}"
    return HidingPlan(vault_columns=vault, surrogate_column_name=name,
                      working_columns=working)


def apply_hiding(dataset: Dataset, plan: HidingPlan,
                 seed: int = 0) -> tuple[Dataset, Dataset]:
    """Split the table into (vault, working) joined on random surrogates.

    Surrogates are a seeded random permutation of a counter space, so they
    carry no information about row order or identifier values.
    """
    expected = set(plan.vault_columns) | set(plan.working_columns)
    if expected != set(dataset.column_names):
        raise SchemaMismatch("plan columns do not match the dataset schema")
    if plan.surrogate_column_name in dataset.column_names:
        raise SchemaMismatch(f"surrogate {plan.surrogate_column_name!r} collides")
    n = dataset.n_records
    rng = random.Random(seed)
    width = max(8, len(str(n)))
    perm = list(range(n))
    rng.shuffle(perm)
    surrogates = [f"id{perm[i]:0{width}d}" for i in range(n)]
    surrogate_meta = ColumnMeta(plan.surrogate_column_name,
                                ColumnClass.NON_IDENTIFYING)
    vault = dataset.select_columns(list(plan.vault_columns),
                                   name=f"{dataset.name}_vault")
    vault = vault.with_column(surrogate_meta, surrogates) if plan.vault_columns else \
        Dataset([surrogate_meta], [(s,) for s in surrogates],
                name=f"{dataset.name}_vault")
    working = dataset.select_columns(list(plan.working_columns),
                                     name=f"{dataset.name}_working")
    working = working.with_column(surrogate_meta, surrogates)
    return vault, working


def join_hidden(vault: Dataset, working: Dataset, surrogate: str,
                column_order: tuple[str, ...]) -> list[tuple[str, ...]]:
    """Reconstruct the original rows by joining vault and working on the
    surrogate (test helper for the round-trip law)."""
    by_key = {}
    for i in range(vault.n_records):
        by_key[vault.column_values(surrogate)[i]] = i
    rows = []
    for j in range(working.n_records):
        i = by_key[working.column_values(surrogate)[j]]
        cells = []
        for name in column_order:
            if name in working.column_names:
                cells.append(working.column_values(name)[j])
            else:
                cells.append(vault.column_values(name)[i])
        rows.append(tuple(cells))
    return rows


# --- data separation ---

@dataclass(frozen=True)
class SeparationPlan:
    groups: tuple[tuple[str, ...], ...]
    unseparable: tuple[str, ...]


def plan_separation(minimal_risky: tuple[ColumnSubset, ...],
                    quasi_columns: tuple[str, ...]) -> SeparationPlan:
    """Greedy table grouping: no group may fully contain a risky combination
    of size >= 2. Single-column risky sets cannot be separated at all and are
    routed to ``unseparable`` for hiding or generalization."""
    singles = {s.columns[0] for s in minimal_risky if len(s) == 1}
    conflicts = [set(s.columns) for s in minimal_risky if len(s) >= 2]
    groups: list[list[str]] = []
    for col in quasi_columns:
        if col in singles:
            continue
        placed = False
        for group in groups:
            widened = set(group) | {col}
            if not any(c <= widened for c in conflicts):
                group.append(col)
                placed = True
                break
        if not placed:
            groups.append([col])
    return SeparationPlan(
        groups=tuple(tuple(g) for g in groups),
        unseparable=tuple(c for c in quasi_columns if c in singles),
    )


def verify_separation(plan: SeparationPlan,
                      minimal_risky: tuple[ColumnSubset, ...]) -> list[str]:
    """Empty iff no group fully contains a size->=2 risky combination."""
    violations = []
    for group in plan.groups:
        members = set(group)
        for s in minimal_risky:
            if len(s) >= 2 and set(s.columns) <= members:
                violations.append(
                    f"group {group} contains risky combination {s.columns}"
                )
    return violations


def optimal_separation_group_count(minimal_risky: tuple[ColumnSubset, ...],
                                   quasi_columns: tuple[str, ...]) -> int:
    """Exhaustive minimum group count (test reference, <= 12 columns)."""
    singles = {s.columns[0] for s in minimal_risky if len(s) == 1}
    cols = [c for c in quasi_columns if c not in singles]
    conflicts = [set(s.columns) for s in minimal_risky if len(s) >= 2]
    if not cols:
        return 0

    def feasible(n_groups: int) -> bool:
        assignment: list[int] = []

        def backtrack(i: int) -> bool:
            if i == len(cols):
                return True
            used = max(assignment, default=-1) + 1
            for g in range(min(used + 1, n_groups)):
                members = {cols[j] for j in range(i) if assignment[j] == g} | {cols[i]}
                if any(c <= members for c in conflicts):
                    continue
                assignment.append(g)
                if backtrack(i + 1):
                    return True
                assignment.pop()
            return False

        return backtrack(0)

    for n in range(1, len(cols) + 1):
        if feasible(n):
            return n
    return len(cols)


# --- data minimization ---

@dataclass(frozen=True)
class MinimizationPlan:
    strip_columns: tuple[str, ...]
    retained: tuple[str, ...]
    before_minimal_risky: tuple[ColumnSubset, ...] | None = None
    after_minimal_risky: tuple[ColumnSubset, ...] | None = None


def plan_minimization(dataset: Dataset, aux: AuxModel | None = None,
                      policy: RiskPolicy | None = None) -> MinimizationPlan:
    """Strip exactly the columns lacking consent. When a policy is supplied
    the plan carries the before/after risky families of the retained schema."""
    strip = tuple(c.name for c in dataset.columns if not c.consented)
    retained = tuple(c for c in dataset.column_names if c not in strip)
    before = after = None
    if policy is not None:
        aux = aux or AuxModel()
        before = find_risky_combinations(dataset, aux, policy).minimal_risky
        stripped = apply_minimization(dataset, strip)
        if stripped is not None and stripped.quasi_columns:
            after = find_risky_combinations(stripped, aux, policy).minimal_risky
        else:
            after = ()
    return MinimizationPlan(strip_columns=strip, retained=retained,
                            before_minimal_risky=before,
                            after_minimal_risky=after)


def apply_minimization(dataset: Dataset,
                       strip_columns: tuple[str, ...]) -> Dataset | None:
    """Dataset without the stripped columns; None if nothing would remain."""
    retained = [c for c in dataset.column_names if c not in strip_columns]
    if not retained:
        return None
    return dataset.select_columns(retained)


# --- data abstraction ---

@dataclass(frozen=True)
class AbstractionPlan:
    assignments: dict[str, int] = field(default_factory=dict)
    achieved: float = 1.0
    target_met: bool = False


def apply_generalization(dataset: Dataset, column: str, level: int) -> Dataset:
    """Map a column's cells through one hierarchy level; metadata preserved."""
    meta = dataset.meta(column)
    if meta.hierarchy is None:
        raise NoHierarchy(f"column {column!r} has no generalization hierarchy")
    mapper = meta.hierarchy.mapper(level)
    values = dataset.column_values(column)
    out = []
    for i, v in enumerate(values):
        try:
            out.append(mapper(v))
        except UnparseableCell as exc:
            raise UnparseableCell(f"column {column!r}, row {i}: {exc}") from None
    return dataset.with_values(column, out)


def apply_abstraction(dataset: Dataset, plan: AbstractionPlan) -> Dataset:
    out = dataset
    for column, level in plan.assignments.items():
        out = apply_generalization(out, column, level)
    return out


def _min_epsilon(dataset: Dataset, aux: AuxModel, policy: RiskPolicy) -> float:
    """Minimum per-record ratio over all quasi subsets up to k_max, ignoring
    records identifiable from aux alone."""
    quasi = dataset.quasi_columns
    k_max = min(policy.max_subset_size, len(quasi))
    baseline = build_partition(dataset, aux.subset(dataset))
    best = 1.0
    for k in range(1, k_max + 1):
        for combo in combinations(quasi, k):
            s = ColumnSubset.of(dataset, combo)
            part = build_partition(dataset, s.union(dataset, aux.known_columns))
            eps, already = record_epsilons(part, baseline)
            eligible = eps[~already]
            if len(eligible):
                best = min(best, float(eligible.min()))
    return best


def _is_compliant(report: RiskReport) -> bool:
    return not report.minimal_risky


def recommend_abstraction(dataset: Dataset, aux: AuxModel,
                          policy: RiskPolicy) -> AbstractionPlan:
    """Greedy level search: repeatedly raise the hierarchy-bearing column
    whose single-level raise lifts the dataset's minimum ratio the most,
    until no combination is risky or everything is suppressed."""
    hier_cols = [c.name for c in dataset.columns
                 if c.hierarchy is not None and c.column_class is ColumnClass.QUASI]
    if not hier_cols:
        raise NoHierarchies("no quasi column carries a generalization hierarchy")

    def realize(assignment: dict[str, int]) -> Dataset:
        # level mappings are defined on raw values, so always start from the
        # original dataset
        out = dataset
        for c, l in assignment.items():
            if l > 0:
                out = apply_generalization(out, c, l)
        return out

    levels = {c: 0 for c in hier_cols}
    current = dataset
    while True:
        report = find_risky_combinations(current, aux, policy)
        if _is_compliant(report):
            achieved = _min_epsilon(current, aux, policy)
            return AbstractionPlan(
                assignments={c: l for c, l in levels.items() if l > 0},
                achieved=achieved, target_met=True,
            )
        candidates = [
            c for c in hier_cols
            if levels[c] < dataset.meta(c).hierarchy.top_level
        ]
        if not candidates:
            achieved = _min_epsilon(current, aux, policy)
            # a boundary threshold of 1.0 can only be met by reaching
            # epsilon = 1 exactly (every subset fully uninformative)
            return AbstractionPlan(
                assignments={c: l for c, l in levels.items() if l > 0},
                achieved=achieved,
                target_met=achieved > policy.epsilon0 or achieved >= 1.0,
            )
        scored = []
        for c in candidates:
            trial = realize({**levels, c: levels[c] + 1})
            # ties: smallest raise count so far, then canonical column order
            scored.append((
                -_min_epsilon(trial, aux, policy),
                levels[c],
                dataset.position(c),
                c,
                trial,
            ))
        scored.sort(key=lambda t: t[:3])
        _, _, _, chosen, current = scored[0]
        levels[chosen] += 1
