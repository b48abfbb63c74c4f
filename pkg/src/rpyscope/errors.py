"""Exception types shared across the package."""


class RpyscopeError(Exception):
    """Base class for all package-specific errors."""


class FormatError(RpyscopeError):
    """Input file is not in the expected tagged export format."""


class TruncationError(FormatError):
    """A record block ended without its end-of-record tag."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (record starting at line {line})")
        self.line = line


class WorkspaceIntegrityError(RpyscopeError):
    """A workspace file is corrupt or structurally invalid."""


class WorkspaceVersionError(WorkspaceIntegrityError):
    """A workspace file uses an unsupported format version."""


class ConsistencyError(RpyscopeError):
    """A cluster assignment does not match the workspace it is applied to."""


class MergeError(RpyscopeError):
    """A manual merge or split request violates its preconditions."""


class EmptyFilterWarning(UserWarning):
    """A marker filter matched no citing records."""


class RangeMismatchWarning(UserWarning):
    """Spectra compared over different year ranges; re-windowed to the intersection."""
