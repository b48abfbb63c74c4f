"""Reference-variant disambiguation: normalized similarity, blocking, merging.

Variants are blocked by reference publication year (a cluster never spans two
years), linked inside a block when the normalized author+source strings reach
the similarity threshold and every enabled field constraint (volume, starting
page, DOI) agrees whenever both sides carry a value, and finally clustered as
connected components (single linkage). Merging collapses each multi-member
cluster onto its highest-ncr member and unions the citing-record evidence.
"""

import unicodedata
from collections import Counter
from dataclasses import dataclass, replace

from .errors import ConsistencyError, MergeError
from .ingest import CitedRefFields
from .workspace import HistoryEntry, ReferenceVariant, Workspace, variant_sort_key


def fold_text(text: str) -> str:
    """Casefold, strip diacritics, collapse internal whitespace."""
    decomposed = unicodedata.normalize("NFKD", text)
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    return " ".join(stripped.casefold().split())


def normalize(fields: CitedRefFields) -> str:
    """Canonical comparison key: folded first author plus folded source.

    Volume, page, and DOI stay out of the key; they act as constraints, not
    as similarity inputs.
    """
    parts = [fold_text(fields.first_author or ""), fold_text(fields.source or "")]
    return " ".join(p for p in parts if p)


def levenshtein(a: str, b: str) -> int:
    """Classic edit distance (insert/delete/substitute, unit costs)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def similarity(a: str, b: str) -> float:
    """Normalized similarity: 1 - distance / max length; empty vs empty is 1."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _bag_distance(ca: Counter, cb: Counter) -> int:
    """Cheap lower bound on the edit distance from character multisets."""
    extra_a = sum((ca - cb).values())
    extra_b = sum((cb - ca).values())
    return max(extra_a, extra_b)


def _levenshtein_capped(a: str, b: str, cap: int) -> int:
    """Edit distance, allowed to return any value > cap once it exceeds cap."""
    if len(a) < len(b):
        a, b = b, a
    if len(a) - len(b) > cap:
        return cap + 1
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        row_min = i
        for j, cb in enumerate(b, start=1):
            cell = min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            current.append(cell)
            if cell < row_min:
                row_min = cell
        if row_min > cap:
            return cap + 1
        previous = current
    return previous[-1]


@dataclass(frozen=True)
class ClusterParams:
    threshold: float = 0.75
    use_volume: bool = True
    use_page: bool = True
    use_doi: bool = False

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "volume": self.use_volume,
            "page": self.use_page,
            "doi": self.use_doi,
        }


@dataclass(frozen=True)
class ClusterAssignment:
    """Partition of the workspace's variants into same-work clusters."""

    clusters: tuple[tuple[str, ...], ...]  # member variant_ids, each sorted
    params: ClusterParams

    def cluster_id_of(self, members: tuple[str, ...]) -> str:
        return "c" + min(members)[1:]

    def by_variant(self) -> dict[str, str]:
        mapping = {}
        for members in self.clusters:
            cid = self.cluster_id_of(members)
            for vid in members:
                mapping[vid] = cid
        return mapping


def _constraints_agree(a: CitedRefFields, b: CitedRefFields, p: ClusterParams) -> bool:
    pairs = []
    if p.use_volume:
        pairs.append((a.volume, b.volume))
    if p.use_page:
        pairs.append((a.start_page, b.start_page))
    if p.use_doi:
        pairs.append((a.doi, b.doi))
    for x, y in pairs:
        if x is not None and y is not None and x.strip() != y.strip():
            return False
    return True


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def cluster(ws: Workspace, p: ClusterParams) -> tuple[Workspace, ClusterAssignment]:
    """Group same-work variants; returns the stamped workspace and the partition.

    The returned workspace carries each variant's cluster id and a history
    entry with the parameters; pass the assignment to merge() to collapse it.
    """
    if not 0.0 <= p.threshold <= 1.0:
        raise ValueError(f"threshold must be within [0, 1], got {p.threshold}")

    blocks: dict[int | None, list[ReferenceVariant]] = {}
    for v in ws.variants:
        blocks.setdefault(v.fields.rpy, []).append(v)

    uf = _UnionFind([v.variant_id for v in ws.variants])
    for members in blocks.values():
        if len(members) < 2:
            continue
        keys = [normalize(v.fields) for v in members]
        bags = [Counter(k) for k in keys]
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if uf.find(members[i].variant_id) == uf.find(members[j].variant_id):
                    continue
                if not _constraints_agree(members[i].fields, members[j].fields, p):
                    continue
                if _link(keys[i], keys[j], bags[i], bags[j], p.threshold):
                    uf.union(members[i].variant_id, members[j].variant_id)

    groups: dict[str, list[str]] = {}
    for v in ws.variants:
        groups.setdefault(uf.find(v.variant_id), []).append(v.variant_id)
    clusters = tuple(sorted(tuple(sorted(g)) for g in groups.values()))
    assignment = ClusterAssignment(clusters=clusters, params=p)

    mapping = assignment.by_variant()
    stamped = tuple(replace(v, cluster_id=mapping[v.variant_id]) for v in ws.variants)
    new_ws = replace(
        ws,
        variants=stamped,
        history=ws.history + (HistoryEntry("cluster", p.to_dict()),),
    )
    return new_ws, assignment


def _link(key_a: str, key_b: str, bag_a: Counter, bag_b: Counter, threshold: float) -> bool:
    """similarity(key_a, key_b) >= threshold, with cheap early rejection."""
    longest = max(len(key_a), len(key_b))
    if longest == 0:
        return True
    cap = int((1.0 - threshold) * longest) + 2
    if abs(len(key_a) - len(key_b)) > cap or _bag_distance(bag_a, bag_b) > cap:
        return False
    dist = _levenshtein_capped(key_a, key_b, cap)
    if dist > cap:
        return False
    return 1.0 - dist / longest >= threshold


def _pick_representative(members: list[ReferenceVariant]) -> ReferenceVariant:
    return min(members, key=lambda v: (-v.ncr, v.raw))


def _merge_group(
    members: list[ReferenceVariant], cluster_id: str | None, notes: dict[str, str]
) -> tuple[ReferenceVariant, dict]:
    """Collapse members onto the representative; returns (product, history record)."""
    rep = _pick_representative(members)
    union: frozenset[str] = frozenset().union(*(v.citing_ids for v in members))
    product = replace(rep, citing_ids=union, cluster_id=cluster_id)
    snapshot = {
        "product": rep.variant_id,
        "members": [v.to_dict() for v in sorted(members, key=lambda v: v.variant_id)],
    }
    carried = notes.get(rep.variant_id)
    if not carried:
        for v in sorted(members, key=lambda v: v.variant_id):
            if notes.get(v.variant_id):
                carried = notes[v.variant_id]
                break
    for v in members:
        notes.pop(v.variant_id, None)
    if carried:
        notes[product.variant_id] = carried
    return product, snapshot


def merge(ws: Workspace, asg: ClusterAssignment) -> Workspace:
    """Collapse every multi-member cluster of the assignment.

    The merged variant takes the raw string and parsed fields of the member
    with the highest ncr (ties: lexicographically smallest raw) and the union
    of the members' citing ids, so a record citing two variants of one work
    counts once.
    """
    by_id = {v.variant_id: v for v in ws.variants}
    assigned = {vid for members in asg.clusters for vid in members}
    unknown = assigned - set(by_id)
    missing = set(by_id) - assigned
    if unknown:
        raise ConsistencyError(f"assignment references unknown variant ids: {sorted(unknown)[:3]}")
    if missing:
        raise ConsistencyError(f"assignment does not cover variant ids: {sorted(missing)[:3]}")

    notes = ws.annotation_map()
    merged_variants: list[ReferenceVariant] = []
    merge_records: list[dict] = []
    for members_ids in asg.clusters:
        members = [by_id[vid] for vid in members_ids]
        cid = asg.cluster_id_of(members_ids)
        if len(members) == 1:
            merged_variants.append(replace(members[0], cluster_id=cid))
            continue
        product, snapshot = _merge_group(members, cid, notes)
        merged_variants.append(product)
        merge_records.append(snapshot)

    merged_variants.sort(key=variant_sort_key)
    return replace(
        ws,
        variants=tuple(merged_variants),
        annotations=tuple(sorted(notes.items())),
        history=ws.history + (HistoryEntry("merge", {"merged": merge_records}),),
    )


def manual_merge(ws: Workspace, variant_ids: list[str]) -> Workspace:
    """Merge an analyst-chosen set of variants (all must share one rpy)."""
    unique_ids = sorted(set(variant_ids))
    if len(unique_ids) <= 1:
        return ws
    by_id = {v.variant_id: v for v in ws.variants}
    missing = [vid for vid in unique_ids if vid not in by_id]
    if missing:
        raise MergeError(f"unknown variant ids: {missing}")
    members = [by_id[vid] for vid in unique_ids]
    rpys = {v.fields.rpy for v in members}
    if len(rpys) > 1:
        raise MergeError(
            f"refusing to merge across reference publication years {sorted(str(y) for y in rpys)}; "
            "variants of one work share a year"
        )

    notes = ws.annotation_map()
    product, snapshot = _merge_group(members, members[0].cluster_id, notes)
    remaining = [v for v in ws.variants if v.variant_id not in set(unique_ids)]
    remaining.append(product)
    remaining.sort(key=variant_sort_key)
    entry = HistoryEntry(
        "manual_merge",
        {"variant_ids": unique_ids, "product": snapshot["product"], "members": snapshot["members"]},
    )
    return replace(
        ws,
        variants=tuple(remaining),
        annotations=tuple(sorted(notes.items())),
        history=ws.history + (entry,),
    )


def _find_merge_record(ws: Workspace, variant_id: str) -> dict | None:
    """Most recent merge that produced variant_id and was not already undone."""
    splits_pending = 0
    for entry in reversed(ws.history):
        if entry.op == "manual_split" and entry.args.get("variant_id") == variant_id:
            splits_pending += 1
            continue
        produced = None
        if entry.op == "manual_merge" and entry.args.get("product") == variant_id:
            produced = {"members": entry.args["members"]}
        elif entry.op == "merge":
            for group in entry.args.get("merged", []):
                if group["product"] == variant_id:
                    produced = {"members": group["members"]}
                    break
        if produced is not None:
            if splits_pending:
                splits_pending -= 1
                continue
            return produced
    return None


def manual_split(ws: Workspace, variant_id: str) -> Workspace:
    """Undo one merge: restore the pre-merge member variants from history."""
    if ws.variant_by_id(variant_id) is None:
        raise MergeError(f"variant {variant_id!r} is not present in the workspace")
    record = _find_merge_record(ws, variant_id)
    if record is None:
        raise MergeError(f"variant {variant_id!r} is not a merge product recorded in history")
    members = [ReferenceVariant.from_dict(d) for d in record["members"]]
    existing = {v.variant_id for v in ws.variants} - {variant_id}
    collisions = [v.variant_id for v in members if v.variant_id in existing]
    if collisions:
        raise MergeError(f"cannot split: member ids already present: {collisions}")

    remaining = [v for v in ws.variants if v.variant_id != variant_id]
    remaining.extend(members)
    remaining.sort(key=variant_sort_key)
    return replace(
        ws,
        variants=tuple(remaining),
        history=ws.history + (HistoryEntry("manual_split", {"variant_id": variant_id}),),
    )
