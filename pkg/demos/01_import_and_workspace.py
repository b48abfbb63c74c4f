"""Import a tagged export file and explore the aggregated workspace.

Walks the first half of a typical session: parse the bundled synthetic
corpus with year windows, look at the parse report, aggregate identical
reference strings into variants, and write the CSV exports.
"""

from pathlib import Path

from rpyscope import (
    ImportConfig,
    YearWindow,
    aggregate,
    import_file,
    info,
    remove_by_ncr,
    save_workspace,
)
from rpyscope.exports import write_cr_table, write_graph

HERE = Path(__file__).resolve().parent
CORPUS = HERE.parent / "tests" / "data" / "synthetic_corpus.txt"
OUT = HERE / "out"
OUT.mkdir(exist_ok=True)

# Reference years 1900-1995, citing records 1962-2018, no cap on references
# per record. References without a parseable year are dropped.
config = ImportConfig(
    rpy_window=YearWindow(1900, 1995, keep_missing=False),
    py_window=YearWindow(1962, 2018, keep_missing=False),
    max_cr_per_record=0,
)

records, report = import_file(CORPUS, config)
print(f"read     : {report.records_read} records, {report.cr_lines_read} CR lines")
print(f"dropped  : {report.records_dropped_by_window} records outside the PY window")
print(f"           {report.cr_lines_dropped_by_window} CR lines outside the RPY window")
print(f"           {report.cr_lines_in_dropped_records} CR lines inside dropped records")

ws = aggregate(records, config)
stats = info(ws)
print(f"workspace: {stats.records} records, {stats.cr_mentions} mentions, "
      f"{stats.distinct_variants} distinct variants, years {stats.rpy_span}")

# The most-cited reference strings, straight from the variant table
top = sorted(ws.variants, key=lambda v: -v.ncr)[:5]
print("\nmost cited:")
for v in top:
    print(f"  ncr={v.ncr:<3d} {v.raw}")

# Noise removal: drop everything cited only once, as a batch pipeline would
reduced = remove_by_ncr(ws, 0, 1)
print(f"\nafter removing singletons: {info(reduced).distinct_variants} variants")

write_cr_table(reduced, OUT / "variants.csv")
write_graph(reduced, OUT / "per_year.csv")
save_workspace(reduced, OUT / "session.rpys.json")
print(f"wrote {OUT / 'variants.csv'}, {OUT / 'per_year.csv'}, {OUT / 'session.rpys.json'}")
