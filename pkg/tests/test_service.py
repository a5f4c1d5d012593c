"""Registry behavior and the JSON/TSV result builders."""
from __future__ import annotations

import threading

import pytest

from relsearch.deql import LabelFilter
from relsearch.errors import VariableError
from relsearch.ingest import load_manifest
from relsearch.service import (
    DatasetRegistry,
    NotApplicableError,
    UnknownDatasetError,
    dataset_info,
    export_tsv,
    list_datasets,
    run_compare,
    run_crosstab,
    run_freq,
    run_query,
)
from relsearch.state import QueryState


@pytest.fixture()
def registry(demo_ds, golden_ds, fig_ds, compare_pair):
    reg = DatasetRegistry()
    for ds in (demo_ds, golden_ds, fig_ds, *compare_pair):
        reg.add_dataset(ds)
    return reg


class TestRegistry:
    def test_unknown_dataset(self, registry):
        with pytest.raises(UnknownDatasetError):
            registry.get("nope")

    def test_lazy_load_and_cache(self, demo_files):
        reg = DatasetRegistry(load_manifest(demo_files["manifest"]))
        loaded = reg.get("demo")
        assert loaded.dataset.dataset_id == "demo"
        assert loaded.load_seconds >= 0
        assert reg.get("demo") is loaded

    def test_concurrent_get_loads_once(self, demo_files):
        reg = DatasetRegistry(load_manifest(demo_files["manifest"]))
        results = []
        barrier = threading.Barrier(8)

        def grab():
            barrier.wait()
            results.append(reg.get("demo"))

        threads = [threading.Thread(target=grab) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len({id(r.dataset) for r in results}) == 1

    def test_dataset_info_fields(self, registry):
        info = dataset_info(registry.get("demo"))
        assert info["documents"] == 2
        assert info["sentences"] == 4
        assert info["tokens"] == 25
        assert info["relations"] == 4
        assert info["has_signals"] is True
        assert info["disrpt_labels"] == ["CONDITION", "ELABORATION",
                                         "PURPOSE"]
        assert info["metadata_keys"] == ["genre", "split"]

    def test_list_datasets(self, registry):
        ids = [d["dataset_id"] for d in list_datasets(registry)]
        assert set(ids) == {"demo", "golden", "skew", "cmp_a", "cmp_b"}


class TestRunQuery:
    def test_payload_shape(self, registry):
        out = run_query(registry, QueryState(dataset_id="demo", query="if"))
        assert out["total_hits"] == 1
        assert out["offset"] == 0
        assert out["elapsed_ms"] >= 0
        (m,) = out["matches"]
        assert m["rel_id"] == "demo#0"
        assert m["disrpt_label"] == "CONDITION"
        assert m["metadata"]["genre"] == "news"

    def test_match_tokens_annotated(self, registry):
        out = run_query(registry, QueryState(dataset_id="demo", query="if"))
        tokens = out["matches"][0]["tokens"]
        by_pos = {t["pos"]: t for t in tokens}
        assert by_pos[0]["match"] is True
        assert by_pos[0]["role"] == "arg1"
        assert by_pos[0]["signal_type"] == "dm"
        assert by_pos[5]["match"] is False
        assert by_pos[5]["role"] == "arg2"
        assert by_pos[3]["role"] == "inter"
        assert by_pos[7]["role"] == "post"
        assert len(tokens) == 8  # the full first sentence, nothing more

    def test_pagination_window(self, registry):
        state = QueryState(dataset_id="demo", query="", page_size=3)
        page1 = run_query(registry, state)
        assert page1["total_hits"] == 4
        assert len(page1["matches"]) == 3
        page2 = run_query(registry, QueryState(dataset_id="demo", query="",
                                               page_size=3, offset=3))
        assert len(page2["matches"]) == 1
        ids = [m["rel_id"] for m in page1["matches"] + page2["matches"]]
        assert ids == [f"demo#{i}" for i in range(4)]

    def test_filters_apply(self, registry):
        state = QueryState(dataset_id="demo",
                           label=LabelFilter("CONDITION", negated=True))
        assert run_query(registry, state)["total_hits"] == 2


class TestRunFreq:
    def test_categorical(self, registry):
        out = run_freq(registry, QueryState(dataset_id="demo",
                                            variable="disrpt_label"))
        assert out["kind"] == "freq"
        assert out["rows"][0] == {"value": "CONDITION", "count": 2,
                                  "percent": 50.0}

    def test_numeric_becomes_box(self, registry):
        out = run_freq(registry, QueryState(dataset_id="demo",
                                            variable="arg1_len"))
        assert out["kind"] == "box"
        assert out["box"]["n"] == 4
        assert out["box"]["max"] == 3.0

    def test_variable_required(self, registry):
        with pytest.raises(VariableError):
            run_freq(registry, QueryState(dataset_id="demo"))

    def test_query_narrows_rows(self, registry):
        out = run_freq(registry, QueryState(dataset_id="demo", query="if",
                                            variable="disrpt_label"))
        assert out["total"] == 1


class TestRunCrosstab:
    def test_categorical_pair(self, registry):
        out = run_crosstab(registry, QueryState(
            dataset_id="skew", variable="disrpt_label",
            crosstab_variable="filter_match:signal_type=dm"))
        assert out["kind"] == "crosstab"
        assert out["applicable"] is True
        assert out["row_values"][0] == "CAUSAL"
        assert "residuals" in out and "sig" in out

    def test_not_applicable_carries_payload(self, registry):
        with pytest.raises(NotApplicableError) as exc:
            run_crosstab(registry, QueryState(
                dataset_id="skew", variable="disrpt_label",
                crosstab_variable="direction"))
        assert exc.value.payload["applicable"] is False
        assert exc.value.payload["observed"]

    def test_numeric_pair_scatters(self, registry):
        out = run_crosstab(registry, QueryState(
            dataset_id="demo", variable="arg1_len",
            crosstab_variable="arg2_len"))
        assert out["kind"] == "scatter"
        assert len(out["points"]) == 4

    def test_mixed_pair_groups_boxes(self, registry):
        out = run_crosstab(registry, QueryState(
            dataset_id="demo", variable="disrpt_label",
            crosstab_variable="arg1_len"))
        assert out["kind"] == "box_groups"
        assert out["variable"] == "arg1_len"
        assert out["group_var"] == "disrpt_label"
        assert out["groups"][0]["group"] == "CONDITION"


class TestRunCompare:
    def test_categorical_compare(self, registry):
        out = run_compare(registry, QueryState(
            dataset_id="cmp_a", compare_dataset="cmp_b",
            variable="disrpt_label"))
        assert out["kind"] == "compare"
        by_value = {r["value"]: r for r in out["rows"]}
        assert by_value["CONJUNCTION"]["percent_a"] == 60.0
        assert by_value["CONJUNCTION"]["percent_b"] == 20.0

    def test_numeric_compare(self, registry):
        out = run_compare(registry, QueryState(
            dataset_id="cmp_a", compare_dataset="cmp_b",
            variable="arg1_len"))
        assert out["kind"] == "compare_box"
        assert out["box_a"]["n"] == 10

    def test_lenient_filters_between_datasets(self, registry):
        # PURPOSE exists in demo only; comparing against cmp_a must not 400.
        out = run_compare(registry, QueryState(
            dataset_id="demo", compare_dataset="cmp_a",
            variable="disrpt_label", label=LabelFilter("PURPOSE")))
        assert out["total_a"] == 1
        assert out["total_b"] == 0

    def test_union_vocabulary_for_query_parse(self, registry, demo_ds,
                                              compare_pair):
        # "conj" is a deprel only in the cmp corpora; parsing must still
        # classify it when demo is the primary dataset.
        assert "conj" not in demo_ds.deprel_vocab
        out = run_compare(registry, QueryState(
            dataset_id="demo", compare_dataset="cmp_a", query="|conj",
            variable="disrpt_label"))
        assert out["total_a"] == 0
        assert out["total_b"] == 10

    def test_compare_dataset_required(self, registry):
        from relsearch.errors import FormatError
        with pytest.raises(FormatError):
            run_compare(registry, QueryState(dataset_id="demo",
                                             variable="disrpt_label"))


class TestExport:
    def test_matches_export_ignores_pagination(self, registry):
        state = QueryState(dataset_id="demo", query="", page_size=1,
                           offset=3)
        name, text = export_tsv(registry, state)
        assert name == "matches_demo.tsv"
        assert text.count("\n") == 5  # header + all four relations

    def test_freq_export(self, registry):
        name, text = export_tsv(registry, QueryState(
            dataset_id="demo", view="freq", variable="disrpt_label"))
        assert name == "freq_demo.tsv"
        assert text.splitlines()[1] == "CONDITION\t2\t50.0000"

    def test_crosstab_export_when_not_applicable(self, registry):
        name, text = export_tsv(registry, QueryState(
            dataset_id="skew", view="crosstab", variable="disrpt_label",
            crosstab_variable="direction"))
        assert "\t\t" in text  # empty test columns, no crash

    def test_compare_export(self, registry):
        _, text = export_tsv(registry, QueryState(
            dataset_id="cmp_a", compare_dataset="cmp_b", view="compare",
            variable="disrpt_label"))
        assert text.splitlines()[0].startswith("disrpt_label\tcount_a")
