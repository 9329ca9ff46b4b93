import json
import random
from pathlib import Path

import pytest

from entropylens.dataset import ColumnClass, ColumnMeta, Dataset, load_dataset

DATA = Path(__file__).parent / "data"

TOY6_ROWS = [
    ("111-11-1111", "90210", "M", "34"),
    ("222-22-2222", "90210", "M", "34"),
    ("333-33-3333", "90210", "F", "29"),
    ("444-44-4444", "10001", "F", "29"),
    ("555-55-5555", "10001", "F", "41"),
    ("666-66-6666", "10001", "M", "41"),
]


def toy6_columns():
    return [
        ColumnMeta("ssn", ColumnClass.DIRECT),
        ColumnMeta("zip", ColumnClass.QUASI),
        ColumnMeta("sex", ColumnClass.QUASI),
        ColumnMeta("age", ColumnClass.QUASI),
    ]


@pytest.fixture
def toy6() -> Dataset:
    return Dataset(toy6_columns(), TOY6_ROWS, name="toy6")


@pytest.fixture
def toy6_hier() -> Dataset:
    schema = json.loads((DATA / "toy6_hier.schema.json").read_text())
    return load_dataset(DATA / "toy6.csv", schema, name="toy6")


@pytest.fixture
def employer() -> Dataset:
    schema = json.loads((DATA / "employer.schema.json").read_text())
    return load_dataset(DATA / "employer.csv", schema, name="employer")


@pytest.fixture
def data_dir() -> Path:
    return DATA


def random_dataset(rng: random.Random, n_rows: int | None = None,
                   n_quasi: int | None = None,
                   alphabet: int | None = None) -> Dataset:
    """Small random table of quasi columns for property tests."""
    n_rows = n_rows or rng.randint(2, 50)
    n_quasi = n_quasi or rng.randint(1, 6)
    alphabet = alphabet or rng.randint(1, 5)
    columns = [ColumnMeta(f"q{i}", ColumnClass.QUASI) for i in range(n_quasi)]
    rows = [
        tuple(f"v{rng.randrange(alphabet)}" for _ in range(n_quasi))
        for _ in range(n_rows)
    ]
    return Dataset(columns, rows, name="random")
