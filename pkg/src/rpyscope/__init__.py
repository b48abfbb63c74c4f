"""rpyscope: reference publication year spectroscopy workbench.

Parses tagged bibliographic export files, aggregates and disambiguates
cited references, computes citation spectrograms with 5-year-median
deviations, surfaces peak years and their main contributing references,
and drives the whole pipeline from scripts, a CLI, or a local HTTP service.
"""

from .dedupe import (
    ClusterAssignment,
    ClusterParams,
    cluster,
    levenshtein,
    manual_merge,
    manual_split,
    merge,
    normalize,
    similarity,
)
from .ingest import (
    CitedRefFields,
    CitingRecord,
    ImportConfig,
    ParseReport,
    YearWindow,
    apply_rpy_window,
    import_file,
    parse_export,
    parse_reference_string,
    serialize_export,
)
from .replay import replay_history
from .spectra import (
    MarkerSpec,
    PeakReport,
    SpectrumPoint,
    cocitation_filter,
    compare_spectra,
    detect_peaks,
    matches_marker,
    peak_reports,
    spectrum,
    top_contributors,
)
from .workspace import (
    ReferenceVariant,
    Workspace,
    WorkspaceInfo,
    aggregate,
    annotate,
    info,
    load_workspace,
    remove_by_ncr,
    save_workspace,
)

__version__ = "0.1.0"

__all__ = [
    "CitedRefFields",
    "CitingRecord",
    "ClusterAssignment",
    "ClusterParams",
    "ImportConfig",
    "MarkerSpec",
    "ParseReport",
    "PeakReport",
    "ReferenceVariant",
    "SpectrumPoint",
    "Workspace",
    "WorkspaceInfo",
    "YearWindow",
    "aggregate",
    "annotate",
    "apply_rpy_window",
    "cluster",
    "cocitation_filter",
    "compare_spectra",
    "detect_peaks",
    "import_file",
    "info",
    "levenshtein",
    "load_workspace",
    "manual_merge",
    "manual_split",
    "matches_marker",
    "merge",
    "normalize",
    "parse_export",
    "parse_reference_string",
    "peak_reports",
    "remove_by_ncr",
    "replay_history",
    "save_workspace",
    "serialize_export",
    "similarity",
    "spectrum",
    "top_contributors",
]
