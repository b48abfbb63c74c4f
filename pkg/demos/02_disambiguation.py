"""Cluster and merge spelling variants of the same cited work.

Shows the normalized-similarity machinery on its own, then runs the full
cluster + merge step over the bundled corpus and undoes one merge manually.
"""

from pathlib import Path

from rpyscope import (
    ClusterParams,
    ImportConfig,
    YearWindow,
    aggregate,
    cluster,
    import_file,
    manual_merge,
    manual_split,
    merge,
    normalize,
    parse_reference_string,
    similarity,
)

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "data" / "synthetic_corpus.txt"

# --- similarity on normalized keys ------------------------------------------
a = parse_reference_string("Angstrom A, 1924, Q J ROY METEOR SOC, V50, P121")
b = parse_reference_string("Angström A, 1924, QUART J ROY METEOROL SOC, V50, P121")
print("keys     :", repr(normalize(a)), "vs", repr(normalize(b)))
print("similarity:", round(similarity(normalize(a), normalize(b)), 4), "(threshold 0.75)")

# Volume and page act as constraints, not similarity inputs: equal text with
# different volumes must stay apart when the volume constraint is enabled.
c1 = parse_reference_string("Haurwitz B, 1945, J METEOROL, V2, P154")
c2 = parse_reference_string("Haurwitz B, 1945, J METEOROL, V3, P154")
print("same key, volumes", c1.volume, "vs", c2.volume, "-> kept apart by the constraint")

# --- cluster + merge over the corpus -----------------------------------------
config = ImportConfig(
    rpy_window=YearWindow(1900, 1995, keep_missing=False),
    py_window=YearWindow(1962, 2018, keep_missing=False),
)
records, _ = import_file(CORPUS, config)
ws = aggregate(records, config)

params = ClusterParams(threshold=0.75, use_volume=True, use_page=True, use_doi=False)
ws, assignment = cluster(ws, params)
groups = [members for members in assignment.clusters if len(members) > 1]
print(f"\n{len(assignment.clusters)} clusters, {len(groups)} with more than one member:")
by_id = {v.variant_id: v for v in ws.variants}
for members in groups:
    for vid in members:
        print("   ", by_id[vid].raw)
    print()

merged = merge(ws, assignment)
print(f"variants {len(ws.variants)} -> {len(merged.variants)} after merging")

# --- analyst-driven merge and split ------------------------------------------
y1924 = [v.variant_id for v in merged.variants if v.fields.rpy == 1924]
manual = manual_merge(merged, y1924)
product = next(v for v in manual.variants if v.fields.rpy == 1924)
print(f"\nmanually merged 1924 variants -> ncr {product.ncr}")
undone = manual_split(manual, product.variant_id)
print(f"split restores {len(undone.variants)} variants (was {len(manual.variants)})")
