"""Identifiability entropy and the individual privacy ratio.

The uncertainty about which record is the individual of interest, given the
values of a column subset, is modeled as a uniform posterior over the
record's equivalence block: H = log2(block size) bits. A record unique
under the conditioning columns has H = 0 — it is fully identified.

The per-record privacy ratio divides the entropy conditioned on a candidate
subset (plus whatever the adversary already knows) by the entropy under the
adversary's knowledge alone. It always lands in [0, 1]: 1 means the subset
reveals nothing new, 0 means the record becomes unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import ColumnSubset, Dataset, PartitionIndex, build_partition
from .errors import InvalidEpsilon0, UnknownRecord


@dataclass(frozen=True)
class AuxModel:
    """Columns assumed already known to the adversary (auxiliary information
    and context folded together)."""

    known_columns: tuple[str, ...] = ()

    @classmethod
    def of(cls, dataset: Dataset, names) -> "AuxModel":
        return cls(ColumnSubset.of(dataset, names).columns)

    def subset(self, dataset: Dataset) -> ColumnSubset:
        return ColumnSubset.of(dataset, self.known_columns)


@dataclass(frozen=True)
class IppValue:
    """Per-record privacy ratio with a flag for aux-caused identification."""

    epsilon: float
    already_identified: bool = False


@dataclass(frozen=True)
class SubsetRiskSummary:
    min_epsilon: float
    mean_epsilon: float
    at_risk_fraction: float
    # records this subset pins to a singleton block (epsilon exactly 0);
    # lets reports name the individuals a combination exposes outright
    unique_records: tuple[int, ...] = ()


def identifiability_entropy(partition: PartitionIndex, record_id: int,
                            base: float = 2.0) -> float:
    """Bits (for the default base) of uncertainty left about ``record_id``
    after observing its values on the partition's columns."""
    size = partition.block_size_of(record_id)
    return math.log(size) / math.log(base)


def baseline_entropy(dataset: Dataset, aux: AuxModel, record_id: int,
                     base: float = 2.0) -> float:
    """Uncertainty under the adversary's assumed knowledge alone; log(N) when
    nothing is known."""
    partition = build_partition(dataset, aux.subset(dataset))
    return identifiability_entropy(partition, record_id, base=base)


def record_epsilons(numerator: PartitionIndex,
                    baseline: PartitionIndex) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ratio for every record at once.

    Returns ``(epsilons, already_identified)``. Records whose baseline block
    is a singleton get epsilon 0 and the flag set; the ratio is
    base-invariant, so natural logs are used throughout.
    """
    num = np.log(numerator.record_block_sizes().astype(np.float64))
    den = np.log(baseline.record_block_sizes().astype(np.float64))
    already = den == 0.0
    eps = np.zeros(len(num))
    np.divide(num, den, out=eps, where=~already)
    return eps, already


def ipp(dataset: Dataset, subset: ColumnSubset, aux: AuxModel, record_id: int,
        base: float = 2.0) -> IppValue:
    """Privacy ratio for one record and one candidate column subset."""
    if not 0 <= record_id < dataset.n_records:
        raise UnknownRecord(f"record {record_id} outside 0..{dataset.n_records - 1}")
    baseline = build_partition(dataset, aux.subset(dataset))
    den = math.log(baseline.block_size_of(record_id)) / math.log(base)
    if den == 0.0:
        return IppValue(epsilon=0.0, already_identified=True)
    joint = subset.union(dataset, aux.known_columns)
    numerator = build_partition(dataset, joint)
    num = math.log(numerator.block_size_of(record_id)) / math.log(base)
    return IppValue(epsilon=num / den, already_identified=False)


def summarize_epsilons(eps: np.ndarray, already: np.ndarray,
                       epsilon0: float) -> SubsetRiskSummary:
    """Aggregate per-record ratios, leaving out records the adversary could
    already identify from aux alone (their risk is not subset-caused).

    ``at_risk_fraction`` keeps N as the denominator so it reads as a share
    of the whole table.
    """
    eligible = ~already
    n = len(eps)
    if not eligible.any():
        return SubsetRiskSummary(min_epsilon=1.0, mean_epsilon=1.0, at_risk_fraction=0.0)
    e = eps[eligible]
    at_risk = int((e <= epsilon0).sum())
    unique = tuple(int(i) for i in np.flatnonzero(eligible & (eps == 0.0)))
    return SubsetRiskSummary(
        min_epsilon=float(e.min()),
        mean_epsilon=float(e.mean()),
        at_risk_fraction=at_risk / n,
        unique_records=unique,
    )


def subset_risk_profile(dataset: Dataset, subset: ColumnSubset, aux: AuxModel,
                        epsilon0: float) -> SubsetRiskSummary:
    if not 0.0 < epsilon0 <= 1.0:
        raise InvalidEpsilon0(f"epsilon0 must be in (0, 1], got {epsilon0}")
    baseline = build_partition(dataset, aux.subset(dataset))
    numerator = build_partition(dataset, subset.union(dataset, aux.known_columns))
    eps, already = record_epsilons(numerator, baseline)
    return summarize_epsilons(eps, already, epsilon0)
