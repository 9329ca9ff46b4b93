"""Scikit-learn style wrappers around the core analysis and transforms.

These let the analyzer and the schema transforms participate in sklearn
pipelines and grid searches: parameters via ``get_params``/``set_params``,
state learned in ``fit`` stored in trailing-underscore attributes.

Input validation accepts either a :class:`Dataset` or a pandas DataFrame
plus a ``column_classes`` mapping; DataFrames are normalized to text cells.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .analysis import analyze
from .dataset import ColumnClass, ColumnMeta, Dataset, normalize_cell
from .entropy import AuxModel
from .hierarchies import hierarchy_from_config
from .risky import RiskPolicy
from .strategies import (
    apply_generalization,
    apply_hiding,
    apply_minimization,
    plan_hiding,
    plan_minimization,
)


def as_dataset(X, column_classes: dict | None = None,
               hierarchies: dict | None = None) -> Dataset:
    """Coerce input to a Dataset. DataFrames need a column->class mapping;
    unlisted columns default to quasi-identifiers."""
    if isinstance(X, Dataset):
        return X
    if not hasattr(X, "columns") or not hasattr(X, "itertuples"):
        raise TypeError(f"expected Dataset or DataFrame, got {type(X).__name__}")
    column_classes = column_classes or {}
    hierarchies = hierarchies or {}
    columns = []
    for name in X.columns:
        cls = ColumnClass(column_classes.get(name, "quasi"))
        hierarchy = None
        if name in hierarchies:
            hierarchy = hierarchy_from_config(hierarchies[name])
        columns.append(ColumnMeta(str(name), cls, hierarchy=hierarchy))
    rows = [
        tuple(normalize_cell(str(v)) for v in row)
        for row in X.itertuples(index=False, name=None)
    ]
    return Dataset(columns, rows)


class RiskAnalyzer(BaseEstimator):
    """Identifiability-risk analysis as an estimator.

    ``fit`` runs the risky-combination analysis; ``predict`` labels each
    record True when at least one minimal risky combination puts it at or
    below the threshold.
    """

    def __init__(self, epsilon0: float = 0.5, k_max: int = 4,
                 aux_columns: tuple = (), trigger: str = "any_record",
                 fraction: float | None = None, log_base: float = 2.0):
        self.epsilon0 = epsilon0
        self.k_max = k_max
        self.aux_columns = aux_columns
        self.trigger = trigger
        self.fraction = fraction
        self.log_base = log_base

    def fit(self, X, y=None, column_classes: dict | None = None):
        dataset = as_dataset(X, column_classes)
        policy = RiskPolicy(epsilon0=self.epsilon0, max_subset_size=self.k_max,
                            trigger=self.trigger, fraction=self.fraction)
        aux = AuxModel.of(dataset, self.aux_columns)
        self.dataset_ = dataset
        self.bundle_ = analyze(dataset, aux, policy, log_base=self.log_base)
        self.minimal_risky_ = [tuple(s) for s in self.bundle_.minimal_risky]
        self.n_records_ = dataset.n_records
        return self

    def predict(self, X=None):
        self._check_fitted()
        at_risk = {int(r) for r in self.bundle_.per_record}
        return [i in at_risk for i in range(self.n_records_)]

    def _check_fitted(self):
        if not hasattr(self, "bundle_"):
            raise NotFittedError("RiskAnalyzer is not fitted yet; call fit first")


class Generalizer(TransformerMixin, BaseEstimator):
    """Map one column through a generalization-hierarchy level."""

    def __init__(self, column: str = "", level: int = 0,
                 hierarchy: dict | None = None):
        self.column = column
        self.level = level
        self.hierarchy = hierarchy

    def fit(self, X, y=None):
        return self

    def transform(self, X, column_classes: dict | None = None) -> Dataset:
        hierarchies = {self.column: self.hierarchy} if self.hierarchy else None
        dataset = as_dataset(X, column_classes, hierarchies)
        if self.hierarchy and isinstance(X, Dataset):
            meta = dataset.meta(self.column)
            dataset = dataset.with_meta(self.column, ColumnMeta(
                meta.name, meta.column_class, meta.consented,
                hierarchy_from_config(self.hierarchy)))
        return apply_generalization(dataset, self.column, self.level)


class ConsentMinimizer(TransformerMixin, BaseEstimator):
    """Drop every column lacking consent."""

    def fit(self, X, y=None):
        return self

    def transform(self, X, column_classes: dict | None = None) -> Dataset:
        dataset = as_dataset(X, column_classes)
        plan = plan_minimization(dataset)
        stripped = apply_minimization(dataset, plan.strip_columns)
        if stripped is None:
            raise ValueError("minimization would strip every column")
        return stripped


class DirectIdentifierHider(TransformerMixin, BaseEstimator):
    """Replace direct identifiers with a random surrogate; the vault table
    from the last transform is kept on ``vault_``."""

    def __init__(self, surrogate_name: str = "local_id", seed: int = 0):
        self.surrogate_name = surrogate_name
        self.seed = seed

    def fit(self, X, y=None):
        return self

    def transform(self, X, column_classes: dict | None = None) -> Dataset:
        dataset = as_dataset(X, column_classes)
        plan = plan_hiding(dataset, surrogate_name=self.surrogate_name)
        vault, working = apply_hiding(dataset, plan, seed=self.seed)
        self.vault_ = vault
        return working
