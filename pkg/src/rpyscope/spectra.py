"""Citation spectrograms: marker filtering, per-year aggregates, peak analysis.

The spectrogram plots, per reference publication year, the number of cited
references (ncr) and its deviation from the local 5-year median (the window
spans the two preceding and the two following years, truncated at the range
boundaries; an even-sized window takes the mean of the two middle values).
"""

import warnings
from dataclasses import dataclass, replace
from statistics import median

from .errors import EmptyFilterWarning, RangeMismatchWarning
from .ingest import CitedRefFields, parse_reference_string
from .workspace import (
    HistoryEntry,
    ReferenceVariant,
    Workspace,
    _aggregate_variants,
)


@dataclass(frozen=True)
class MarkerSpec:
    """Identity of a marker paper, matched against parsed reference fields."""

    rpy: int
    first_author_prefix: str | None = None
    volume: str | None = None
    start_page: str | None = None
    doi: str | None = None

    def __post_init__(self):
        if self.first_author_prefix is None and self.doi is None:
            raise ValueError("a marker needs an author prefix or a DOI alongside its year")

    def to_dict(self) -> dict:
        return {
            "rpy": self.rpy,
            "first_author_prefix": self.first_author_prefix,
            "volume": self.volume,
            "start_page": self.start_page,
            "doi": self.doi,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MarkerSpec":
        return cls(
            rpy=int(data["rpy"]),
            first_author_prefix=data.get("first_author_prefix"),
            volume=data.get("volume"),
            start_page=data.get("start_page"),
            doi=data.get("doi"),
        )

    @classmethod
    def from_string(cls, text: str) -> "MarkerSpec":
        """Parse the CLI marker syntax: ``author=Liu,rpy=1960,volume=4,page=1,doi=...``."""
        fields: dict[str, str] = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise ValueError(f"marker field {part!r} is not key=value")
            key, value = part.split("=", 1)
            fields[key.strip().lower()] = value.strip()
        known = {"author", "rpy", "volume", "page", "doi"}
        unknown = set(fields) - known
        if unknown:
            raise ValueError(f"unknown marker fields {sorted(unknown)}; expected {sorted(known)}")
        if "rpy" not in fields:
            raise ValueError("marker needs rpy=<year>")
        return cls(
            rpy=int(fields["rpy"]),
            first_author_prefix=fields.get("author"),
            volume=fields.get("volume"),
            start_page=fields.get("page"),
            doi=fields.get("doi"),
        )


@dataclass(frozen=True)
class SpectrumPoint:
    rpy: int
    ncr: int
    distinct: int
    median_dev: int | float

    def to_dict(self) -> dict:
        return {
            "rpy": self.rpy,
            "ncr": self.ncr,
            "distinct": self.distinct,
            "median_dev": self.median_dev,
        }


@dataclass(frozen=True)
class PeakReport:
    rpy: int
    ncr: int
    median_dev: int | float
    top_refs: tuple[tuple[str, int, float], ...]  # (variant_id, ncr, share)

    def to_dict(self) -> dict:
        return {
            "rpy": self.rpy,
            "ncr": self.ncr,
            "median_dev": self.median_dev,
            "top_refs": [
                {"variant_id": vid, "ncr": n, "share": share} for vid, n, share in self.top_refs
            ],
        }


def _fields_match_marker(fields: CitedRefFields, m: MarkerSpec) -> bool:
    if fields.rpy != m.rpy:
        return False
    if m.first_author_prefix is not None:
        if fields.first_author is None:
            return False
        if not fields.first_author.casefold().startswith(m.first_author_prefix.casefold()):
            return False
    if m.volume is not None:
        if fields.volume is None or fields.volume.strip() != m.volume.strip():
            return False
    if m.start_page is not None:
        if fields.start_page is None or fields.start_page.strip() != m.start_page.strip():
            return False
    if m.doi is not None:
        if fields.doi is None or fields.doi.lower() != m.doi.lower():
            return False
    return True


def matches_marker(v: ReferenceVariant, m: MarkerSpec) -> bool:
    """True iff the year matches and every field present on the marker matches."""
    return _fields_match_marker(v.fields, m)


def cocitation_filter(ws: Workspace, markers: list[MarkerSpec], mode: str = "any") -> Workspace:
    """Keep citing records whose own reference list cites the marker(s).

    mode "any" keeps records citing at least one marker (union of citing
    sets); mode "all" keeps records citing every marker (intersection).
    Variants are re-aggregated from the retained records.
    """
    if not markers:
        raise ValueError("cocitation_filter needs at least one marker")
    if mode not in ("any", "all"):
        raise ValueError(f"mode must be 'any' or 'all', got {mode!r}")

    retained = []
    for rec in ws.records:
        parsed = [parse_reference_string(line) for line in rec.raw_cr_lines]
        hits = [any(_fields_match_marker(f, m) for f in parsed) for m in markers]
        if (mode == "any" and any(hits)) or (mode == "all" and all(hits)):
            retained.append(rec)

    if not retained:
        warnings.warn("marker filter matched no citing records", EmptyFilterWarning, stacklevel=2)

    variants = _aggregate_variants(retained)
    kept_ids = {v.variant_id for v in variants}
    entry = HistoryEntry(
        "cocite", {"markers": [m.to_dict() for m in markers], "mode": mode}
    )
    return replace(
        ws,
        records=tuple(retained),
        variants=variants,
        annotations=tuple((k, t) for k, t in ws.annotations if k in kept_ids),
        history=ws.history + (entry,),
    )


def _window_median(series: list[int], index: int) -> int | float:
    lo = max(0, index - 2)
    hi = min(len(series), index + 3)
    return median(series[lo:hi])


def _as_count(x: int | float) -> int | float:
    """Collapse float-but-integral deviations to int for stable formatting."""
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return x


def build_spectrum(
    ncr_by_year: dict[int, int], distinct_by_year: dict[int, int], rpy_lo: int, rpy_hi: int
) -> list[SpectrumPoint]:
    """Dense spectrum over [rpy_lo, rpy_hi]; absent years count as zero."""
    if rpy_lo > rpy_hi:
        raise ValueError(f"inverted year range {rpy_lo}..{rpy_hi}")
    years = list(range(rpy_lo, rpy_hi + 1))
    series = [ncr_by_year.get(y, 0) for y in years]
    points = []
    for i, y in enumerate(years):
        dev = _as_count(series[i] - _window_median(series, i))
        points.append(
            SpectrumPoint(rpy=y, ncr=series[i], distinct=distinct_by_year.get(y, 0), median_dev=dev)
        )
    return points


def spectrum(ws: Workspace, rpy_lo: int, rpy_hi: int) -> list[SpectrumPoint]:
    """Re-bin the variant table into one SpectrumPoint per year."""
    ncr_by_year: dict[int, int] = {}
    distinct_by_year: dict[int, int] = {}
    for v in ws.variants:
        y = v.fields.rpy
        if y is None or not rpy_lo <= y <= rpy_hi:
            continue
        ncr_by_year[y] = ncr_by_year.get(y, 0) + v.ncr
        distinct_by_year[y] = distinct_by_year.get(y, 0) + 1
    return build_spectrum(ncr_by_year, distinct_by_year, rpy_lo, rpy_hi)


def detect_peaks(spec: list[SpectrumPoint], min_dev: int | float = 1) -> list[int]:
    """Years whose ncr is a strict local maximum and whose deviation clears min_dev.

    A plateau of equal values flanked by strictly smaller neighbors reports
    its leftmost year. The input must be dense and ordered by year.
    """
    for prev, cur in zip(spec, spec[1:]):
        if cur.rpy != prev.rpy + 1:
            raise ValueError("spectrum must be dense and ordered by year")
    n = len(spec)
    peaks = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and spec[j + 1].ncr == spec[i].ncr:
            j += 1
        left_ok = i == 0 or spec[i - 1].ncr < spec[i].ncr
        right_ok = j == n - 1 or spec[j + 1].ncr < spec[i].ncr
        if left_ok and right_ok and spec[i].median_dev >= min_dev:
            peaks.append(spec[i].rpy)
        i = j + 1
    return peaks


def top_contributors(
    ws: Workspace, rpy: int, share_threshold: float
) -> list[tuple[ReferenceVariant, float]]:
    """Variants of the year whose ncr share strictly exceeds the threshold."""
    if not 0.0 <= share_threshold < 1.0:
        raise ValueError(f"share_threshold must be in [0, 1), got {share_threshold}")
    year_variants = [v for v in ws.variants if v.fields.rpy == rpy]
    total = sum(v.ncr for v in year_variants)
    if total == 0:
        return []
    ranked = sorted(year_variants, key=lambda v: (-v.ncr, v.raw))
    return [(v, v.ncr / total) for v in ranked if v.ncr / total > share_threshold]


def peak_reports(
    ws: Workspace,
    spec: list[SpectrumPoint],
    min_dev: int | float = 1,
    share_threshold: float = 0.1,
) -> list[PeakReport]:
    """Detected peaks with their main contributing references."""
    by_year = {p.rpy: p for p in spec}
    reports = []
    for year in detect_peaks(spec, min_dev):
        point = by_year[year]
        top = tuple(
            (v.variant_id, v.ncr, share) for v, share in top_contributors(ws, year, share_threshold)
        )
        reports.append(
            PeakReport(rpy=year, ncr=point.ncr, median_dev=point.median_dev, top_refs=top)
        )
    return reports


@dataclass(frozen=True)
class SpectrumComparison:
    """Aligned per-year view of several named spectra, for overlay plotting."""

    names: tuple[str, ...]
    years: tuple[int, ...]
    ncr: dict[str, tuple[int, ...]]
    median_dev: dict[str, tuple[int | float, ...]]
    delta_ncr: dict[str, tuple[int, ...]]  # each non-first spectrum minus the first

    def rows(self) -> list[dict]:
        out = []
        first = self.names[0]
        for i, year in enumerate(self.years):
            row: dict = {"rpy": year}
            for name in self.names:
                row[f"{name}_ncr"] = self.ncr[name][i]
                row[f"{name}_median_dev"] = self.median_dev[name][i]
            for name in self.names[1:]:
                row[f"{name}_minus_{first}_ncr"] = self.delta_ncr[name][i]
            out.append(row)
        return out


def compare_spectra(specs: list[tuple[str, list[SpectrumPoint]]]) -> SpectrumComparison:
    """Align named spectra year by year; mismatched ranges shrink to the intersection."""
    if len(specs) < 2:
        raise ValueError("need at least two spectra to compare")
    names = tuple(name for name, _ in specs)
    if len(set(names)) != len(names):
        raise ValueError("spectrum names must be unique")
    ranges = [(points[0].rpy, points[-1].rpy) if points else None for _, points in specs]
    if any(r is None for r in ranges):
        raise ValueError("cannot compare an empty spectrum")
    lo = max(r[0] for r in ranges)
    hi = min(r[1] for r in ranges)
    if lo > hi:
        raise ValueError("spectra have no overlapping years")
    if len(set(ranges)) > 1:
        warnings.warn(
            f"spectra cover different year ranges; comparing the intersection {lo}..{hi}",
            RangeMismatchWarning,
            stacklevel=2,
        )

    years = tuple(range(lo, hi + 1))
    ncr: dict[str, tuple[int, ...]] = {}
    dev: dict[str, tuple[int | float, ...]] = {}
    for name, points in specs:
        window = [p for p in points if lo <= p.rpy <= hi]
        ncr[name] = tuple(p.ncr for p in window)
        dev[name] = tuple(p.median_dev for p in window)
    first = names[0]
    delta = {
        name: tuple(ncr[name][i] - ncr[first][i] for i in range(len(years)))
        for name in names[1:]
    }
    return SpectrumComparison(names=names, years=years, ncr=ncr, median_dev=dev, delta_ncr=delta)
