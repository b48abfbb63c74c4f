"""Deterministic CSV exports of the variant table, spectrum, and peaks.

Dialect, fixed for byte-exact golden testing: comma delimiter, minimal
quoting, LF newlines, UTF-8, one header row. Missing values are empty
cells; deviations print as integers when integral, else with one decimal
(window medians only ever produce halves).
"""

import csv
import io
from pathlib import Path

from .spectra import PeakReport, SpectrumPoint, spectrum
from .workspace import Workspace

CSV_CR_COLUMNS = [
    "variant_id",
    "raw",
    "first_author",
    "rpy",
    "source",
    "volume",
    "start_page",
    "doi",
    "ncr",
    "cluster_id",
]

CSV_GRAPH_COLUMNS = ["rpy", "ncr", "distinct_variants", "median_dev"]

CSV_PEAKS_COLUMNS = ["rpy", "ncr", "median_dev"]


def _cell(value) -> str:
    if value is None:
        return ""
    return str(value)


def _writer(buf):
    return csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)


def cr_table_csv(ws: Workspace) -> str:
    """CSV_CR: the full variant table in canonical order."""
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(CSV_CR_COLUMNS)
    for v in ws.variants:
        f = v.fields
        w.writerow(
            [
                v.variant_id,
                f.raw,
                _cell(f.first_author),
                _cell(f.rpy),
                _cell(f.source),
                _cell(f.volume),
                _cell(f.start_page),
                _cell(f.doi),
                v.ncr,
                _cell(v.cluster_id),
            ]
        )
    return buf.getvalue()


def graph_csv(ws: Workspace, rpy_lo: int | None = None, rpy_hi: int | None = None) -> str:
    """CSV_GRAPH: one row per year of the RPY window, dense, with zero fills."""
    if not ws.variants:
        raise ValueError("graph export needs a non-empty workspace")
    lo = ws.config.rpy_window.lo if rpy_lo is None else rpy_lo
    hi = ws.config.rpy_window.hi if rpy_hi is None else rpy_hi
    points = spectrum(ws, lo, hi)
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(CSV_GRAPH_COLUMNS)
    for p in points:
        w.writerow([p.rpy, p.ncr, p.distinct, p.median_dev])
    return buf.getvalue()


def peaks_csv(points: list[SpectrumPoint], peak_years: list[int]) -> str:
    """Peaks export: (rpy, ncr, median_dev) for each detected peak year."""
    by_year = {p.rpy: p for p in points}
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(CSV_PEAKS_COLUMNS)
    for year in peak_years:
        p = by_year[year]
        w.writerow([p.rpy, p.ncr, p.median_dev])
    return buf.getvalue()


def top_refs_csv(rows: list[tuple], rpy: int) -> str:
    """Top contributors of one year: (variant, share) pairs from the spectroscopy module."""
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["variant_id", "raw", "rpy", "ncr", "share"])
    for variant, share in rows:
        w.writerow([variant.variant_id, variant.raw, rpy, variant.ncr, share])
    return buf.getvalue()


def comparison_csv(comparison) -> str:
    """Aligned multi-spectrum table, one row per year."""
    rows = comparison.rows()
    buf = io.StringIO()
    w = _writer(buf)
    if rows:
        header = list(rows[0].keys())
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(row[k]) for k in header])
    return buf.getvalue()


def write_cr_table(ws: Workspace, path) -> None:
    Path(path).write_text(cr_table_csv(ws), encoding="utf-8", newline="")


def write_graph(ws: Workspace, path, rpy_lo: int | None = None, rpy_hi: int | None = None) -> None:
    Path(path).write_text(graph_csv(ws, rpy_lo, rpy_hi), encoding="utf-8", newline="")


def write_peaks(points: list[SpectrumPoint], peak_years: list[int], path) -> None:
    Path(path).write_text(peaks_csv(points, peak_years), encoding="utf-8", newline="")


def read_cr_table(path) -> list[dict]:
    """Load a CSV_CR file back into typed row dicts (for round-trip checks)."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for row in reader:
            rows.append(
                {
                    "variant_id": row["variant_id"],
                    "raw": row["raw"],
                    "first_author": row["first_author"] or None,
                    "rpy": int(row["rpy"]) if row["rpy"] else None,
                    "source": row["source"] or None,
                    "volume": row["volume"] or None,
                    "start_page": row["start_page"] or None,
                    "doi": row["doi"] or None,
                    "ncr": int(row["ncr"]),
                    "cluster_id": row["cluster_id"] or None,
                }
            )
        return rows
