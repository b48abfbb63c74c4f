"""Re-execute a workspace's history against its original records.

Every mutating operation appends a history entry with enough arguments to be
re-run deterministically, so replaying the history on the same records must
reproduce the variant table exactly. Tests and the analysis service use this
to verify that sessions are reproducible.
"""

from . import dedupe, spectra, workspace as store
from .ingest import CitingRecord, ImportConfig
from .workspace import HistoryEntry, Workspace


def replay_history(
    records: list[CitingRecord], history: list[HistoryEntry] | tuple[HistoryEntry, ...]
) -> Workspace:
    if not history or history[0].op != "import":
        raise ValueError("history must start with the import entry")
    config = ImportConfig.from_dict(history[0].args.get("config", {}))
    ws = store.aggregate(list(records), config)
    assignment = None
    for entry in history[1:]:
        if entry.op == "cluster":
            params = dedupe.ClusterParams(
                threshold=entry.args["threshold"],
                use_volume=entry.args["volume"],
                use_page=entry.args["page"],
                use_doi=entry.args["doi"],
            )
            ws, assignment = dedupe.cluster(ws, params)
        elif entry.op == "merge":
            if assignment is None:
                raise ValueError("history has a merge entry with no preceding cluster")
            ws = dedupe.merge(ws, assignment)
            assignment = None
        elif entry.op == "manual_merge":
            ws = dedupe.manual_merge(ws, entry.args["variant_ids"])
        elif entry.op == "manual_split":
            ws = dedupe.manual_split(ws, entry.args["variant_id"])
        elif entry.op == "remove_ncr":
            ws = store.remove_by_ncr(ws, entry.args["lo"], entry.args["hi"])
        elif entry.op == "cocite":
            markers = [spectra.MarkerSpec.from_dict(m) for m in entry.args["markers"]]
            ws = spectra.cocitation_filter(ws, markers, entry.args["mode"])
        elif entry.op == "annotate":
            ws = store.annotate(ws, entry.args["variant_id"], entry.args["text"])
        else:
            raise ValueError(f"history contains an unknown operation {entry.op!r}")
    return ws
