"""Analysis workspace: aggregated reference variants, history, persistence.

The workspace is treated as an immutable snapshot: every operation returns a
new Workspace and appends to its replayable history. Mutating operations
therefore never leave a half-updated state behind, which is what the script
engine's command atomicity and the service's read-your-writes rely on.
"""

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import WorkspaceIntegrityError, WorkspaceVersionError
from .ingest import CitedRefFields, CitingRecord, ImportConfig, parse_reference_string

WORKSPACE_FORMAT = "rpyscope-workspace"
WORKSPACE_VERSION = 1


def variant_id_for(raw: str) -> str:
    """Stable opaque token for a raw reference string."""
    return "v" + hashlib.sha1(raw.encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True)
class ReferenceVariant:
    """One distinct cited-reference string with its citing-record evidence."""

    variant_id: str
    fields: CitedRefFields
    citing_ids: frozenset[str]
    cluster_id: str | None = None

    @property
    def raw(self) -> str:
        return self.fields.raw

    @property
    def ncr(self) -> int:
        """Number of distinct citing records referencing this variant."""
        return len(self.citing_ids)

    def to_dict(self) -> dict:
        f = self.fields
        return {
            "variant_id": self.variant_id,
            "raw": f.raw,
            "first_author": f.first_author,
            "rpy": f.rpy,
            "source": f.source,
            "volume": f.volume,
            "start_page": f.start_page,
            "doi": f.doi,
            "citing_ids": sorted(self.citing_ids),
            "cluster_id": self.cluster_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReferenceVariant":
        fields_ = CitedRefFields(
            raw=data["raw"],
            first_author=data.get("first_author"),
            rpy=data.get("rpy"),
            source=data.get("source"),
            volume=data.get("volume"),
            start_page=data.get("start_page"),
            doi=data.get("doi"),
        )
        return cls(
            variant_id=data["variant_id"],
            fields=fields_,
            citing_ids=frozenset(data["citing_ids"]),
            cluster_id=data.get("cluster_id"),
        )


def variant_sort_key(v: ReferenceVariant) -> tuple:
    """Canonical table order: by year (missing years last), then raw string."""
    return (v.fields.rpy is None, v.fields.rpy or 0, v.raw)


@dataclass(frozen=True)
class HistoryEntry:
    op: str
    args: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"op": self.op, "args": self.args}

    @classmethod
    def from_dict(cls, data: dict) -> "HistoryEntry":
        return cls(op=data["op"], args=data.get("args", {}))


@dataclass(frozen=True)
class Workspace:
    records: tuple[CitingRecord, ...]
    variants: tuple[ReferenceVariant, ...]
    config: ImportConfig
    history: tuple[HistoryEntry, ...]
    annotations: tuple[tuple[str, str], ...] = ()

    def variant_by_id(self, variant_id: str) -> ReferenceVariant | None:
        for v in self.variants:
            if v.variant_id == variant_id:
                return v
        return None

    def annotation_map(self) -> dict[str, str]:
        return dict(self.annotations)

    def merged_variant_ids(self) -> set[str]:
        """Ids of variants that are products of a merge recorded in history."""
        products: set[str] = set()
        restored: set[str] = set()
        for entry in self.history:
            if entry.op == "merge":
                for group in entry.args.get("merged", []):
                    products.add(group["product"])
            elif entry.op == "manual_merge":
                products.add(entry.args["product"])
            elif entry.op == "manual_split":
                restored.add(entry.args["variant_id"])
        live = {v.variant_id for v in self.variants}
        return (products - restored) & live

    def with_history(self, entry: HistoryEntry) -> "Workspace":
        return replace(self, history=self.history + (entry,))


@dataclass(frozen=True)
class WorkspaceInfo:
    records: int
    cr_mentions: int
    distinct_variants: int
    rpy_span: tuple[int, int] | None

    def to_dict(self) -> dict:
        return {
            "records": self.records,
            "cr_mentions": self.cr_mentions,
            "distinct_variants": self.distinct_variants,
            "rpy_span": list(self.rpy_span) if self.rpy_span else None,
        }


def aggregate(records: list[CitingRecord], config: ImportConfig | None = None) -> Workspace:
    """Build a workspace: one variant per distinct raw reference string.

    A record citing the same raw string twice contributes one citing id,
    so ncr counts distinct citing records, not raw mentions.
    """
    return _aggregate_with_history(
        records,
        config or ImportConfig(),
        (HistoryEntry("import", {"config": (config or ImportConfig()).to_dict()}),),
    )


def _aggregate_variants(records: list[CitingRecord] | tuple[CitingRecord, ...]) -> tuple[ReferenceVariant, ...]:
    citing: dict[str, set[str]] = {}
    for rec in records:
        for raw in rec.raw_cr_lines:
            citing.setdefault(raw, set()).add(rec.record_id)
    variants = [
        ReferenceVariant(
            variant_id=variant_id_for(raw),
            fields=parse_reference_string(raw),
            citing_ids=frozenset(ids),
        )
        for raw, ids in citing.items()
    ]
    variants.sort(key=variant_sort_key)
    return tuple(variants)


def _aggregate_with_history(
    records, config: ImportConfig, history: tuple[HistoryEntry, ...]
) -> Workspace:
    return Workspace(
        records=tuple(records),
        variants=_aggregate_variants(records),
        config=config,
        history=history,
    )


def remove_by_ncr(ws: Workspace, lo: int, hi: int) -> Workspace:
    """Drop variants whose ncr falls inside [lo, hi]; records are untouched."""
    if lo > hi:
        raise ValueError(f"remove_by_ncr: lo {lo} exceeds hi {hi}")
    kept = tuple(v for v in ws.variants if not (lo <= v.ncr <= hi))
    kept_ids = {v.variant_id for v in kept}
    return replace(
        ws,
        variants=kept,
        annotations=tuple((k, t) for k, t in ws.annotations if k in kept_ids),
        history=ws.history + (HistoryEntry("remove_ncr", {"lo": lo, "hi": hi}),),
    )


def info(ws: Workspace) -> WorkspaceInfo:
    """Corpus statistics computed from the current state."""
    rpys = [v.fields.rpy for v in ws.variants if v.fields.rpy is not None]
    return WorkspaceInfo(
        records=len(ws.records),
        cr_mentions=sum(len(r.raw_cr_lines) for r in ws.records),
        distinct_variants=len(ws.variants),
        rpy_span=(min(rpys), max(rpys)) if rpys else None,
    )


def annotate(ws: Workspace, variant_id: str, text: str) -> Workspace:
    """Attach (or clear, with empty text) analyst notes to one variant."""
    if ws.variant_by_id(variant_id) is None:
        raise KeyError(f"unknown variant_id {variant_id!r}")
    notes = {k: t for k, t in ws.annotations if k != variant_id}
    if text:
        notes[variant_id] = text
    return replace(
        ws,
        annotations=tuple(sorted(notes.items())),
        history=ws.history + (HistoryEntry("annotate", {"variant_id": variant_id, "text": text}),),
    )


def workspace_to_dict(ws: Workspace) -> dict:
    return {
        "format": WORKSPACE_FORMAT,
        "version": WORKSPACE_VERSION,
        "config": ws.config.to_dict(),
        "records": [
            {
                "record_id": r.record_id,
                "py": r.py,
                "source_title": r.source_title,
                "raw_cr_lines": list(r.raw_cr_lines),
            }
            for r in ws.records
        ],
        "variants": [v.to_dict() for v in ws.variants],
        "history": [h.to_dict() for h in ws.history],
        "annotations": {k: t for k, t in ws.annotations},
    }


def workspace_from_dict(data: dict) -> Workspace:
    if not isinstance(data, dict) or data.get("format") != WORKSPACE_FORMAT:
        raise WorkspaceIntegrityError("not a workspace document (missing format marker)")
    if data.get("version") != WORKSPACE_VERSION:
        raise WorkspaceVersionError(
            f"unsupported workspace version {data.get('version')!r}; this build reads version {WORKSPACE_VERSION}"
        )
    try:
        records = tuple(
            CitingRecord(
                record_id=r["record_id"],
                py=r["py"],
                source_title=r["source_title"],
                raw_cr_lines=tuple(r["raw_cr_lines"]),
            )
            for r in data["records"]
        )
        variants = tuple(ReferenceVariant.from_dict(v) for v in data["variants"])
        history = tuple(HistoryEntry.from_dict(h) for h in data["history"])
        config = ImportConfig.from_dict(data["config"])
        annotations = tuple(sorted(data.get("annotations", {}).items()))
    except (KeyError, TypeError, ValueError) as exc:
        raise WorkspaceIntegrityError(f"workspace document is structurally invalid: {exc}") from exc
    return Workspace(
        records=records, variants=variants, config=config, history=history, annotations=annotations
    )


def save_workspace(ws: Workspace, path) -> None:
    Path(path).write_text(
        json.dumps(workspace_to_dict(ws), ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )


def load_workspace(path) -> Workspace:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WorkspaceIntegrityError(f"workspace file is not valid JSON: {exc}") from exc
    return workspace_from_dict(data)
