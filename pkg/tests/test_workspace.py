import json

import pytest

from rpyscope import (
    CitingRecord,
    ImportConfig,
    aggregate,
    annotate,
    info,
    load_workspace,
    remove_by_ncr,
    replay_history,
    save_workspace,
)
from rpyscope.errors import WorkspaceIntegrityError, WorkspaceVersionError
from rpyscope.exports import cr_table_csv, graph_csv, read_cr_table, write_cr_table

from oracle_counts import census


def rec(record_id: str, crs: list[str], py: int | None = 1970) -> CitingRecord:
    return CitingRecord(record_id=record_id, py=py, source_title="J", raw_cr_lines=tuple(crs))


SMALL_FIXTURE = [
    # 5 records, 12 CR lines, 9 distinct strings; record r1 repeats s1
    rec("r1", ["s1, 1950, J, V1, P1", "s1, 1950, J, V1, P1", "s2, 1951, J, V1, P1"]),
    rec("r2", ["s2, 1951, J, V1, P1", "s3, 1952, J, V1, P1"]),
    rec("r3", ["s4, 1953, J, V1, P1", "s5, 1954, J, V1, P1", "s6, 1955, J, V1, P1"]),
    rec("r4", ["s7, 1956, J, V1, P1", "s8, 1957, J, V1, P1"]),
    rec("r5", ["s9, 1958, J, V1, P1", "s1, 1950, J, V1, P1"]),
]


class TestAggregate:
    def test_exact_string_aggregation(self):
        ws = aggregate([rec("a", ["S, 1950, J"]), rec("b", ["S, 1950, J"])])
        assert len(ws.variants) == 1
        assert ws.variants[0].ncr == 2

    def test_repeat_within_record_counts_once(self):
        ws = aggregate([rec("a", ["S, 1950, J", "S, 1950, J"])])
        assert ws.variants[0].ncr == 1

    def test_small_fixture_counts(self):
        ws = aggregate(SMALL_FIXTURE)
        assert len(ws.variants) == 9
        assert sum(v.ncr for v in ws.variants) == 11
        i = info(ws)
        assert i.records == 5
        assert i.cr_mentions == 12
        assert i.distinct_variants == 9

    def test_empty_record_list_gives_empty_workspace(self):
        ws = aggregate([])
        assert ws.variants == ()
        i = info(ws)
        assert (i.records, i.cr_mentions, i.distinct_variants) == (0, 0, 0)
        assert i.rpy_span is None

    def test_history_starts_with_import(self):
        ws = aggregate(SMALL_FIXTURE)
        assert ws.history[0].op == "import"

    def test_corpus_ncr_matches_census_oracle(self, open_workspace, corpus_text):
        oracle = census(corpus_text)
        got = {v.raw: v.ncr for v in open_workspace.variants}
        assert got == oracle["ncr_per_string"]
        assert len(open_workspace.variants) == oracle["distinct_strings"]

    def test_sum_ncr_bounded_by_mentions(self, open_workspace):
        mentions = sum(len(r.raw_cr_lines) for r in open_workspace.records)
        assert sum(v.ncr for v in open_workspace.variants) <= mentions

    def test_citing_ids_all_exist_in_records(self, open_workspace):
        record_ids = {r.record_id for r in open_workspace.records}
        for v in open_workspace.variants:
            assert v.citing_ids <= record_ids


class TestRemoveByNcr:
    def test_removes_inclusive_range(self):
        ws = aggregate(
            [
                rec("r1", ["a, 1950, J", "b, 1950, J", "c, 1950, J", "d, 1950, J"]),
                rec("r2", ["b, 1950, J", "c, 1950, J", "d, 1950, J"]),
                rec("r3", ["d, 1950, J", "c, 1950, J"]),
            ]
        )
        # ncrs: a=1, b=2, c=3, d=3
        out = remove_by_ncr(ws, 0, 1)
        assert sorted(v.ncr for v in out.variants) == [2, 3, 3]
        assert out.records == ws.records

    def test_remove_zero_zero_is_identity(self, open_workspace):
        out = remove_by_ncr(open_workspace, 0, 0)
        assert out.variants == open_workspace.variants

    def test_idempotent_for_fixed_range(self, open_workspace):
        once = remove_by_ncr(open_workspace, 0, 1)
        twice = remove_by_ncr(once, 0, 1)
        assert twice.variants == once.variants

    def test_inverted_range_rejected(self, open_workspace):
        with pytest.raises(ValueError):
            remove_by_ncr(open_workspace, 2, 1)

    def test_history_appended(self, open_workspace):
        out = remove_by_ncr(open_workspace, 0, 1)
        assert out.history[-1].op == "remove_ncr"
        assert out.history[-1].args == {"lo": 0, "hi": 1}


class TestPersistence:
    def test_save_load_round_trip(self, open_workspace, tmp_path):
        path = tmp_path / "ws.rpys.json"
        ws = annotate(open_workspace, open_workspace.variants[0].variant_id, "seminal")
        save_workspace(ws, path)
        loaded = load_workspace(path)
        assert loaded == ws

    def test_truncated_file_is_an_integrity_error(self, open_workspace, tmp_path):
        path = tmp_path / "ws.rpys.json"
        save_workspace(open_workspace, path)
        blob = path.read_text(encoding="utf-8")
        path.write_text(blob[: len(blob) // 2], encoding="utf-8")
        with pytest.raises(WorkspaceIntegrityError):
            load_workspace(path)

    def test_version_mismatch_is_explicit(self, open_workspace, tmp_path):
        path = tmp_path / "ws.rpys.json"
        save_workspace(open_workspace, path)
        doc = json.loads(path.read_text(encoding="utf-8"))
        doc["version"] = 99
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(WorkspaceVersionError):
            load_workspace(path)

    def test_non_workspace_json_rejected(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text('{"hello": "world"}', encoding="utf-8")
        with pytest.raises(WorkspaceIntegrityError):
            load_workspace(path)

    def test_replay_reproduces_loaded_workspace(self, open_records, open_config, tmp_path):
        ws = aggregate(list(open_records), open_config)
        ws = remove_by_ncr(ws, 0, 1)
        path = tmp_path / "ws.rpys.json"
        save_workspace(ws, path)
        loaded = load_workspace(path)
        replayed = replay_history(list(open_records), loaded.history)
        assert replayed.variants == loaded.variants


class TestCsvExports:
    def test_single_variant_cr_table(self):
        ws = aggregate([rec("a", ["Liu BYH, 1960, SOLAR ENERGY, V4, P1"])])
        lines = cr_table_csv(ws).splitlines()
        assert len(lines) == 2  # header + one data row
        assert lines[0].startswith("variant_id,raw,")

    def test_graph_row_count_is_window_size(self, windowed_workspace):
        lines = graph_csv(windowed_workspace).splitlines()
        assert len(lines) == 1 + (1995 - 1900 + 1)

    def test_graph_needs_nonempty_workspace(self, open_config):
        with pytest.raises(ValueError):
            graph_csv(aggregate([], open_config))

    def test_cr_table_reload_is_lossless(self, open_workspace, tmp_path):
        path = tmp_path / "cr.csv"
        write_cr_table(open_workspace, path)
        rows = read_cr_table(path)
        expect = []
        for v in open_workspace.variants:
            d = v.to_dict()
            d["ncr"] = v.ncr
            d.pop("citing_ids")
            expect.append(d)
        assert rows == expect
