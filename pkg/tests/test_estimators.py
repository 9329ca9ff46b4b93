import math

import pandas as pd
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from entropylens.dataset import ColumnClass, Dataset
from entropylens.estimators import (
    ConsentMinimizer,
    DirectIdentifierHider,
    Generalizer,
    RiskAnalyzer,
    as_dataset,
)


TOY6_FRAME = pd.DataFrame({
    "ssn": ["111-11-1111", "222-22-2222", "333-33-3333",
            "444-44-4444", "555-55-5555", "666-66-6666"],
    "zip": ["90210", "90210", "90210", "10001", "10001", "10001"],
    "sex": ["M", "M", "F", "F", "F", "M"],
    "age": ["34", "34", "29", "29", "41", "41"],
})
TOY6_CLASSES = {"ssn": "direct"}


class TestAsDataset:
    def test_dataset_passthrough(self, toy6):
        assert as_dataset(toy6) is toy6

    def test_dataframe_coercion(self):
        d = as_dataset(TOY6_FRAME, TOY6_CLASSES)
        assert d.column_names == ("ssn", "zip", "sex", "age")
        assert d.meta("ssn").column_class is ColumnClass.DIRECT
        assert d.meta("age").column_class is ColumnClass.QUASI
        assert list(d.column_values("age")) == ["34", "34", "29", "29",
                                                "41", "41"]

    def test_dataframe_numeric_cells_become_text(self):
        frame = pd.DataFrame({"n": [1, 2, 2]})
        d = as_dataset(frame)
        assert list(d.column_values("n")) == ["1", "2", "2"]

    def test_rejects_other_types(self):
        with pytest.raises(TypeError):
            as_dataset([[1, 2], [3, 4]])

    def test_hierarchy_attached(self):
        d = as_dataset(TOY6_FRAME, TOY6_CLASSES, hierarchies={
            "age": {"kind": "numeric_bins", "widths": [10, 20]},
        })
        assert d.meta("age").hierarchy is not None
        assert d.meta("age").hierarchy.n_levels == 4


class TestRiskAnalyzer:
    def test_params_round_trip(self):
        est = RiskAnalyzer(epsilon0=0.4, k_max=3)
        params = est.get_params()
        assert params["epsilon0"] == 0.4
        assert params["k_max"] == 3
        est.set_params(epsilon0=0.9)
        assert est.epsilon0 == 0.9

    def test_clone_keeps_params_drops_state(self, toy6):
        est = RiskAnalyzer(epsilon0=0.4, k_max=3).fit(toy6)
        fresh = clone(est)
        assert fresh.get_params() == est.get_params()
        assert not hasattr(fresh, "bundle_")

    def test_fit_exposes_minimal_risky(self, toy6):
        est = RiskAnalyzer(epsilon0=0.4, k_max=3).fit(toy6)
        families = {tuple(sorted(s)) for s in est.minimal_risky_}
        assert families == {("age",), ("sex", "zip")}
        assert est.n_records_ == 6

    def test_predict_flags_at_risk_records(self, toy6):
        est = RiskAnalyzer(epsilon0=0.4, k_max=3).fit(toy6)
        # every record sits in a size-2 age block (epsilon ~0.387 <= 0.4)
        assert est.predict() == [True] * 6

    def test_predict_unique_records_only(self, toy6):
        # at 0.2 only singleton blocks qualify; each quasi pair isolates a
        # different couple of records and their union is r2..r5
        est = RiskAnalyzer(epsilon0=0.2, k_max=3).fit(toy6)
        assert est.predict() == [False, False, True, True, True, True]

    def test_predict_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            RiskAnalyzer().predict()

    def test_dataframe_input(self):
        est = RiskAnalyzer(epsilon0=0.4, k_max=3)
        est.fit(TOY6_FRAME, column_classes=TOY6_CLASSES)
        families = {tuple(sorted(s)) for s in est.minimal_risky_}
        assert families == {("age",), ("sex", "zip")}

    def test_refit_replaces_state(self, toy6):
        est = RiskAnalyzer(epsilon0=0.4, k_max=3).fit(toy6)
        est.set_params(epsilon0=0.2).fit(toy6)
        families = {tuple(sorted(s)) for s in est.minimal_risky_}
        assert families == {("age", "sex"), ("age", "zip"), ("sex", "zip")}


class TestGeneralizer:
    def test_transform_dataset_with_hierarchy(self, toy6_hier):
        out = Generalizer(column="age", level=2).fit(toy6_hier) \
            .transform(toy6_hier)
        assert list(out.column_values("age")) == \
            ["[20-39]"] * 4 + ["[40-59]"] * 2

    def test_transform_dataframe_with_inline_hierarchy(self):
        est = Generalizer(column="age", level=1,
                          hierarchy={"kind": "numeric_bins", "widths": [10]})
        out = est.transform(TOY6_FRAME, column_classes=TOY6_CLASSES)
        assert isinstance(out, Dataset)
        assert list(out.column_values("age")) == \
            ["[30-39]", "[30-39]", "[20-29]", "[20-29]", "[40-49]", "[40-49]"]

    def test_inline_hierarchy_overrides_dataset(self, toy6):
        est = Generalizer(column="age", level=1,
                          hierarchy={"kind": "numeric_bins", "widths": [20]})
        out = est.transform(toy6)
        assert set(out.column_values("age")) == {"[20-39]", "[40-59]"}


class TestConsentMinimizer:
    def test_strips_non_consented(self, toy6):
        meta = toy6.meta("age")
        flagged = toy6.with_meta("age", type(meta)(
            meta.name, meta.column_class, consented=False,
            hierarchy=meta.hierarchy))
        out = ConsentMinimizer().fit(flagged).transform(flagged)
        assert "age" not in out.column_names
        assert out.column_names == ("ssn", "zip", "sex")

    def test_all_consented_is_identity(self, toy6):
        out = ConsentMinimizer().transform(toy6)
        assert out.column_names == toy6.column_names


class TestDirectIdentifierHider:
    def test_working_table_has_surrogate(self, toy6):
        est = DirectIdentifierHider(seed=7)
        working = est.transform(toy6)
        assert "ssn" not in working.column_names
        assert "local_id" in working.column_names
        assert "ssn" in est.vault_.column_names

    def test_round_trip_through_vault(self, toy6):
        est = DirectIdentifierHider(seed=7)
        working = est.transform(toy6)
        vault = est.vault_
        mapping = dict(zip(vault.column_values("local_id"),
                           vault.column_values("ssn")))
        restored = [mapping[t] for t in working.column_values("local_id")]
        assert restored == list(toy6.column_values("ssn"))

    def test_seed_determinism(self, toy6):
        a = DirectIdentifierHider(seed=3).transform(toy6)
        b = DirectIdentifierHider(seed=3).transform(toy6)
        assert list(a.column_values("local_id")) == \
            list(b.column_values("local_id"))
