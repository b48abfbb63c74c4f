"""Tagged bibliographic export parsing and cited-reference field extraction.

Export format (documented byte-exactly in docs/formats.md):

    FN <producer>            file header, required first significant line
    VR 1.0                   optional format version line
    UT <record id>           one block per citing record
    PY <year>
    SO <source title>
    CR <first cited reference>
       <next cited reference>    continuation: exactly three leading spaces
    ER                       end of record
                             (blank line between records is conventional)
    EF                       end of file

Tags occupy columns 1-2, column 3 is a space, the value starts at column 4.
Every cited reference occupies exactly one line; no joining across lines.
Unknown tags are tolerated and ignored. Input is decoded as UTF-8 with
lossy replacement before it reaches this module.
"""

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, TextIO

from .errors import FormatError, TruncationError

_TAG_RE = re.compile(r"^([A-Z][A-Z0-9])(?: (.*))?$")
_CONTINUATION_PREFIX = "   "
_YEAR_SEGMENT_RE = re.compile(r"^\d{4}$")
_VOLUME_RE = re.compile(r"^V(\S+)$")
_PAGE_RE = re.compile(r"^P(\S+)$")
_DOI_RE = re.compile(r"^DOI[ :]\s*(\S.*)$", re.IGNORECASE)

RPY_MIN = 1000
RPY_MAX = 2999


@dataclass(frozen=True)
class YearWindow:
    """Inclusive year interval plus the keep-or-drop rule for missing years."""

    lo: int
    hi: int
    keep_missing: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"window lower bound {self.lo} exceeds upper bound {self.hi}")

    def admits(self, year: int | None) -> bool:
        if year is None:
            return self.keep_missing
        return self.lo <= year <= self.hi


#: Window that never drops anything; handy for round-trip parsing.
OPEN_WINDOW = YearWindow(RPY_MIN, RPY_MAX, keep_missing=True)


@dataclass(frozen=True)
class ImportConfig:
    """Import-time filters: reference-year window, record-year window, CR cap."""

    rpy_window: YearWindow = OPEN_WINDOW
    py_window: YearWindow = OPEN_WINDOW
    max_cr_per_record: int = 0  # 0 means unlimited

    def __post_init__(self):
        if self.max_cr_per_record < 0:
            raise ValueError("max_cr_per_record must be >= 0")

    def to_dict(self) -> dict:
        return {
            "rpy": [self.rpy_window.lo, self.rpy_window.hi, self.rpy_window.keep_missing],
            "py": [self.py_window.lo, self.py_window.hi, self.py_window.keep_missing],
            "max_cr": self.max_cr_per_record,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ImportConfig":
        rpy = data.get("rpy", [RPY_MIN, RPY_MAX, True])
        py = data.get("py", [RPY_MIN, RPY_MAX, True])
        return cls(
            rpy_window=YearWindow(int(rpy[0]), int(rpy[1]), bool(rpy[2])),
            py_window=YearWindow(int(py[0]), int(py[1]), bool(py[2])),
            max_cr_per_record=int(data.get("max_cr", 0)),
        )


@dataclass(frozen=True)
class CitingRecord:
    """One publication from the export file with its raw cited-reference lines."""

    record_id: str
    py: int | None
    source_title: str
    raw_cr_lines: tuple[str, ...]


@dataclass(frozen=True)
class CitedRefFields:
    """Structured view of one cited-reference string; raw is always preserved."""

    raw: str
    first_author: str | None = None
    rpy: int | None = None
    source: str | None = None
    volume: str | None = None
    start_page: str | None = None
    doi: str | None = None


@dataclass
class ParseReport:
    """Bookkeeping for one import run; counts reconcile exactly with the corpus.

    cr_lines_read = retained mentions + cr_lines_in_dropped_records
                  + cr_lines_truncated + cr_lines_dropped_by_window
    """

    records_read: int = 0
    records_dropped_by_window: int = 0
    cr_lines_read: int = 0
    cr_lines_in_dropped_records: int = 0
    cr_lines_truncated: int = 0
    cr_lines_dropped_by_window: int = 0
    malformed_lines: list[tuple[int, str]] = field(default_factory=list)


def parse_reference_string(raw: str) -> CitedRefFields:
    """Split a cited-reference line into fields. Total: never raises.

    Comma-separated segments are consumed at most once, in this order:
    segment 0 is the first author; the first all-digit four-character
    segment inside [1000, 2999] is the reference publication year; the
    segment immediately after the year is the source; of the remaining
    segments, the first ``V<token>`` is the volume, the first ``P<token>``
    the starting page, and the first ``DOI <value>`` the DOI (lowercased).
    Anything else is ignored.
    """
    segments = [s.strip() for s in raw.split(",")]
    first_author = segments[0] if segments[0] else None

    rpy = None
    rpy_index = None
    for i, seg in enumerate(segments):
        if _YEAR_SEGMENT_RE.match(seg) and RPY_MIN <= int(seg) <= RPY_MAX:
            rpy = int(seg)
            rpy_index = i
            break

    source = None
    source_index = None
    if rpy_index is not None and rpy_index + 1 < len(segments):
        source_index = rpy_index + 1
        source = segments[source_index] or None

    volume = start_page = doi = None
    for i, seg in enumerate(segments):
        if i == 0 or i == rpy_index or i == source_index or not seg:
            continue
        if volume is None:
            m = _VOLUME_RE.match(seg)
            if m:
                volume = m.group(1)
                continue
        if start_page is None:
            m = _PAGE_RE.match(seg)
            if m:
                start_page = m.group(1)
                continue
        if doi is None:
            m = _DOI_RE.match(seg)
            if m:
                doi = m.group(1).lower()

    return CitedRefFields(
        raw=raw,
        first_author=first_author,
        rpy=rpy,
        source=source,
        volume=volume,
        start_page=start_page,
        doi=doi,
    )


def apply_rpy_window(refs: list[CitedRefFields], cfg: ImportConfig) -> list[CitedRefFields]:
    """Keep references whose year falls inside the configured window."""
    return [r for r in refs if cfg.rpy_window.admits(r.rpy)]


def _iter_lines(source: str | TextIO | Iterable[str]) -> Iterable[str]:
    if isinstance(source, str):
        return source.splitlines()
    return (line.rstrip("\n").rstrip("\r") for line in source)


def parse_export(source: str | TextIO, cfg: ImportConfig) -> tuple[list[CitingRecord], ParseReport]:
    """Parse a tagged export into citing records, applying the import filters.

    Records outside the PY window are dropped whole; each surviving record's
    CR list is truncated to max_cr_per_record (when nonzero) and then
    filtered by the RPY window. The report reconciles every drop.
    """
    report = ParseReport()
    records: list[CitingRecord] = []

    header_seen = False
    eof_seen = False
    in_record = False
    record_start_line = 0
    last_tag: str | None = None
    ut: str | None = None
    py: int | None = None
    so = ""
    cr_lines: list[str] = []
    last_line_no = 0

    def finalize_record():
        report.records_read += 1
        record_id = ut if ut else f"R{report.records_read:04d}"
        if not cfg.py_window.admits(py):
            report.records_dropped_by_window += 1
            report.cr_lines_in_dropped_records += len(cr_lines)
            return
        kept = cr_lines
        if cfg.max_cr_per_record and len(kept) > cfg.max_cr_per_record:
            report.cr_lines_truncated += len(kept) - cfg.max_cr_per_record
            kept = kept[: cfg.max_cr_per_record]
        retained = [line for line in kept if cfg.rpy_window.admits(parse_reference_string(line).rpy)]
        report.cr_lines_dropped_by_window += len(kept) - len(retained)
        records.append(
            CitingRecord(record_id=record_id, py=py, source_title=so, raw_cr_lines=tuple(retained))
        )

    for line_no, line in enumerate(_iter_lines(source), start=1):
        last_line_no = line_no
        if eof_seen:
            break
        if not line.strip():
            last_tag = None
            continue

        if line.startswith(_CONTINUATION_PREFIX) and in_record:
            if last_tag == "CR":
                value = line[3:].strip()
                if value:
                    report.cr_lines_read += 1
                    cr_lines.append(value)
            continue

        m = _TAG_RE.match(line)
        if not m:
            if not header_seen:
                raise FormatError(f"line {line_no}: expected FN header, got {line[:40]!r}")
            report.malformed_lines.append((line_no, "not a tag line or continuation"))
            last_tag = None
            continue

        tag, value = m.group(1), m.group(2) or ""
        if not header_seen:
            if tag != "FN":
                raise FormatError(f"line {line_no}: file must start with an FN header, got {tag!r}")
            header_seen = True
            continue

        if tag == "EF":
            if in_record:
                raise TruncationError("record block not terminated before EF", record_start_line)
            eof_seen = True
            continue
        if tag == "ER":
            if not in_record:
                report.malformed_lines.append((line_no, "ER outside a record block"))
                continue
            finalize_record()
            in_record = False
            last_tag = None
            continue
        if tag in ("VR", "FN"):
            last_tag = tag
            continue

        if not in_record:
            in_record = True
            record_start_line = line_no
            ut, py, so, cr_lines = None, None, "", []

        last_tag = tag
        if tag == "UT":
            ut = value.strip() or None
        elif tag == "PY":
            try:
                py = int(value.strip())
            except ValueError:
                report.malformed_lines.append((line_no, f"unparseable PY value {value!r}"))
                py = None
        elif tag == "SO":
            so = value.strip()
        elif tag == "CR":
            value = value.strip()
            if value:
                report.cr_lines_read += 1
                cr_lines.append(value)
        # other tags: tolerated and ignored

    if not header_seen:
        raise FormatError("missing FN header: input is empty or not a tagged export")
    if in_record:
        raise TruncationError("record block not terminated at end of input", record_start_line)
    if not eof_seen:
        report.malformed_lines.append((last_line_no, "missing EF end-of-file tag"))

    return records, report


def serialize_export(records: list[CitingRecord], producer: str = "rpyscope export") -> str:
    """Write records back to the tagged export format (canonical field order)."""
    out: list[str] = [f"FN {producer}", "VR 1.0"]
    for rec in records:
        out.append(f"UT {rec.record_id}")
        if rec.py is not None:
            out.append(f"PY {rec.py}")
        if rec.source_title:
            out.append(f"SO {rec.source_title}")
        for i, cr in enumerate(rec.raw_cr_lines):
            out.append(f"CR {cr}" if i == 0 else f"   {cr}")
        out.append("ER")
        out.append("")
    out.append("EF")
    return "\n".join(out) + "\n"


def import_file(path, cfg: ImportConfig) -> tuple[list[CitingRecord], ParseReport]:
    """Read and parse an export file, decoding UTF-8 with lossy replacement."""
    with open(path, encoding="utf-8", errors="replace") as fh:
        return parse_export(fh, cfg)


def strip_record_to_window(record: CitingRecord, cfg: ImportConfig) -> CitingRecord:
    """Re-filter one record's CR lines against a (possibly narrower) RPY window."""
    retained = tuple(
        line for line in record.raw_cr_lines if cfg.rpy_window.admits(parse_reference_string(line).rpy)
    )
    return replace(record, raw_cr_lines=retained)
