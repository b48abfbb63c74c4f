import threading

import pytest
from fastapi.testclient import TestClient

from rpyscope import aggregate, replay_history
from rpyscope.exports import cr_table_csv, graph_csv
from rpyscope.ingest import parse_export
from rpyscope.service import create_app
from rpyscope.workspace import HistoryEntry, workspace_from_dict

from oracle_counts import census

CONFIG_BODY = {
    "rpy": {"lo": 1900, "hi": 1995, "keep_missing": False},
    "py": {"lo": 1962, "hi": 2018, "keep_missing": False},
    "max_cr": 0,
}

MARKER_BODY = {"author": "Liu", "rpy": 1960, "volume": "4", "page": "1"}


@pytest.fixture()
def client():
    app = create_app(max_upload_bytes=2_000_000)
    with TestClient(app) as c:
        yield c


@pytest.fixture()
def session(client, corpus_text):
    resp = client.post("/sessions", json={"export_text": corpus_text, "config": CONFIG_BODY})
    assert resp.status_code == 201, resp.text
    return resp.json()


class TestSessionLifecycle:
    def test_create_reports_fixture_counts(self, session, corpus_text):
        oracle = census(corpus_text)
        assert session["version"] == 1
        info = session["info"]
        assert info["records"] == oracle["records"] - 2  # two records sit outside the PY window
        assert info["distinct_variants"] == 277
        assert info["cr_mentions"] == 382

    def test_unknown_session_is_404(self, client):
        assert client.get("/sessions/doesnotexist").status_code == 404

    def test_create_requires_exactly_one_source(self, client, corpus_text):
        assert client.post("/sessions", json={}).status_code == 422
        both = {"export_text": corpus_text, "workspace": {"format": "x"}}
        assert client.post("/sessions", json=both).status_code == 422

    def test_bad_export_text_is_422(self, client):
        resp = client.post("/sessions", json={"export_text": "not a tagged export"})
        assert resp.status_code == 422

    def test_oversized_upload_is_413(self, client):
        resp = client.post("/sessions", json={"export_text": "FN x\n" + "x" * 2_100_000})
        assert resp.status_code == 413

    def test_create_from_workspace_document(self, client, session):
        doc = client.get(f"/sessions/{session['session_id']}/export?type=workspace").json()
        resp = client.post("/sessions", json={"workspace": doc})
        assert resp.status_code == 201
        assert resp.json()["info"] == session["info"]

    def test_corrupt_workspace_document_is_422(self, client):
        resp = client.post("/sessions", json={"workspace": {"format": "nope"}})
        assert resp.status_code == 422


class TestReads:
    def test_spectrum_defaults_to_config_window(self, client, session):
        points = client.get(f"/sessions/{session['session_id']}/spectrum").json()
        assert len(points) == 96
        assert points[0]["rpy"] == 1900
        assert points[-1]["rpy"] == 1995

    def test_spectrum_window_override(self, client, session):
        points = client.get(f"/sessions/{session['session_id']}/spectrum?lo=1960&hi=1970").json()
        assert [p["rpy"] for p in points] == list(range(1960, 1971))

    def test_spectrum_inverted_range_is_422(self, client, session):
        resp = client.get(f"/sessions/{session['session_id']}/spectrum?lo=1990&hi=1960")
        assert resp.status_code == 422

    def test_year_drilldown_shares(self, client, session):
        body = client.get(f"/sessions/{session['session_id']}/years/1977/refs").json()
        assert body["total_ncr"] == 10
        shares = [r["share"] for r in body["refs"]]
        assert shares == [0.7, 0.2, 0.1]
        tops = [r["top"] for r in body["refs"]]
        assert tops == [True, True, False]  # strictly-greater rule at the 10% threshold

    def test_peaks_include_top_refs(self, client, session):
        peaks = client.get(f"/sessions/{session['session_id']}/peaks?min_dev=1").json()
        years = [p["rpy"] for p in peaks]
        assert 1960 in years
        spike = next(p for p in peaks if p["rpy"] == 1960)
        assert any(ref["ncr"] == 30 for ref in spike["top_refs"])

    def test_history_lists_operations(self, client, session):
        body = client.get(f"/sessions/{session['session_id']}/history").json()
        assert body["version"] == 1
        assert body["history"][0]["op"] == "import"


class TestMutations:
    def test_cluster_merge_mutation(self, client, session):
        sid = session["session_id"]
        resp = client.post(
            f"/sessions/{sid}/cluster",
            json={"threshold": 0.75, "use_volume": True, "use_page": True,
                  "expected_version": 1},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["version"] == 2
        assert body["info"]["distinct_variants"] == 273

    def test_read_your_writes_after_merge(self, client, session):
        sid = session["session_id"]
        year = client.get(f"/sessions/{sid}/years/1924/refs").json()
        ids = [r["variant_id"] for r in year["refs"] if r["first_author"].startswith("Ang")]
        assert len(ids) == 2
        before = {r["variant_id"]: r["ncr"] for r in year["refs"]}
        resp = client.post(
            f"/sessions/{sid}/merge", json={"variant_ids": ids, "expected_version": 1}
        )
        assert resp.status_code == 200
        after = client.get(f"/sessions/{sid}/years/1924/refs").json()
        merged_rows = [r for r in after["refs"] if r["variant_id"] in ids]
        assert len(merged_rows) == 1
        assert merged_rows[0]["ncr"] == 10  # union of 8 and 3 with one shared citer
        assert merged_rows[0]["merged"] is True
        assert sum(before.values()) == after["total_ncr"] + 1  # one double-counted citer folded

    def test_split_restores_members(self, client, session):
        sid = session["session_id"]
        year = client.get(f"/sessions/{sid}/years/1924/refs").json()
        ids = [r["variant_id"] for r in year["refs"] if r["first_author"].startswith("Ang")]
        client.post(f"/sessions/{sid}/merge", json={"variant_ids": ids, "expected_version": 1})
        merged = client.get(f"/sessions/{sid}/years/1924/refs").json()
        product = next(r["variant_id"] for r in merged["refs"] if r["merged"])
        resp = client.post(
            f"/sessions/{sid}/split", json={"variant_id": product, "expected_version": 2}
        )
        assert resp.status_code == 200
        restored = client.get(f"/sessions/{sid}/years/1924/refs").json()
        assert {r["variant_id"] for r in restored["refs"]} >= set(ids)

    def test_stale_version_conflict(self, client, session):
        sid = session["session_id"]
        ok = client.post(f"/sessions/{sid}/remove-ncr",
                         json={"lo": 0, "hi": 1, "expected_version": 1})
        assert ok.status_code == 200
        stale = client.post(f"/sessions/{sid}/remove-ncr",
                            json={"lo": 0, "hi": 1, "expected_version": 1})
        assert stale.status_code == 409
        assert stale.json()["detail"]["current_version"] == 2

    def test_concurrent_mutations_one_wins(self, client, session):
        sid = session["session_id"]
        statuses = []
        barrier = threading.Barrier(2)

        def attempt():
            barrier.wait()
            resp = client.post(f"/sessions/{sid}/remove-ncr",
                               json={"lo": 0, "hi": 1, "expected_version": 1})
            statuses.append(resp.status_code)

        threads = [threading.Thread(target=attempt) for _ in range(2)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(statuses) == [200, 409]

    def test_filter_mutation(self, client, session):
        sid = session["session_id"]
        resp = client.post(
            f"/sessions/{sid}/filter",
            json={"markers": [MARKER_BODY], "mode": "any", "expected_version": 1},
        )
        assert resp.status_code == 200
        assert resp.json()["info"]["records"] == 30

    def test_invalid_threshold_is_422_with_field_message(self, client, session):
        sid = session["session_id"]
        resp = client.post(
            f"/sessions/{sid}/cluster", json={"threshold": 1.5, "expected_version": 1}
        )
        assert resp.status_code == 422
        detail = resp.json()["detail"]
        assert isinstance(detail, list) and detail[0]["field"]

    def test_cross_year_merge_is_422(self, client, session):
        sid = session["session_id"]
        y60 = client.get(f"/sessions/{sid}/years/1960/refs").json()["refs"]
        y77 = client.get(f"/sessions/{sid}/years/1977/refs").json()["refs"]
        resp = client.post(
            f"/sessions/{sid}/merge",
            json={"variant_ids": [y60[0]["variant_id"], y77[0]["variant_id"]],
                  "expected_version": 1},
        )
        assert resp.status_code == 422

    def test_annotation_survives_workspace_round_trip(self, client, session):
        sid = session["session_id"]
        vid = client.get(f"/sessions/{sid}/years/1960/refs").json()["refs"][0]["variant_id"]
        resp = client.post(
            f"/sessions/{sid}/annotate",
            json={"variant_id": vid, "text": "the marker paper", "expected_version": 1},
        )
        assert resp.status_code == 200
        doc = client.get(f"/sessions/{sid}/export?type=workspace").json()
        resp2 = client.post("/sessions", json={"workspace": doc})
        sid2 = resp2.json()["session_id"]
        refs = client.get(f"/sessions/{sid2}/years/1960/refs").json()["refs"]
        assert next(r for r in refs if r["variant_id"] == vid)["annotation"] == "the marker paper"


class TestExports:
    def test_export_bytes_equal_library_exports(self, client, session, corpus_text):
        sid = session["session_id"]
        client.post(
            f"/sessions/{sid}/cluster",
            json={"threshold": 0.75, "use_volume": True, "use_page": True,
                  "expected_version": 1},
        )
        from rpyscope.ingest import ImportConfig, YearWindow

        cfg = ImportConfig(
            rpy_window=YearWindow(1900, 1995, False),
            py_window=YearWindow(1962, 2018, False),
        )
        records, _ = parse_export(corpus_text, cfg)
        ws = aggregate(records, cfg)
        from rpyscope.dedupe import ClusterParams, cluster, merge

        ws, asg = cluster(ws, ClusterParams(0.75, use_volume=True, use_page=True))
        ws = merge(ws, asg)

        got_cr = client.get(f"/sessions/{sid}/export?type=CSV_CR")
        assert got_cr.status_code == 200
        assert got_cr.text == cr_table_csv(ws)
        got_graph = client.get(f"/sessions/{sid}/export?type=CSV_GRAPH")
        assert got_graph.text == graph_csv(ws)

    def test_bad_export_type_is_422(self, client, session):
        resp = client.get(f"/sessions/{session['session_id']}/export?type=XML")
        assert resp.status_code == 422

    def test_history_replay_reproduces_workspace(self, client, session, corpus_text):
        sid = session["session_id"]
        client.post(
            f"/sessions/{sid}/cluster",
            json={"threshold": 0.75, "use_volume": True, "use_page": True,
                  "expected_version": 1},
        )
        client.post(f"/sessions/{sid}/remove-ncr", json={"lo": 0, "hi": 1, "expected_version": 2})
        history = [HistoryEntry.from_dict(h)
                   for h in client.get(f"/sessions/{sid}/history").json()["history"]]
        doc = client.get(f"/sessions/{sid}/export?type=workspace").json()
        current = workspace_from_dict(doc)
        from rpyscope.ingest import ImportConfig, YearWindow

        cfg = ImportConfig(
            rpy_window=YearWindow(1900, 1995, False),
            py_window=YearWindow(1962, 2018, False),
        )
        records, _ = parse_export(corpus_text, cfg)
        replayed = replay_history(records, history)
        assert replayed.variants == current.variants
