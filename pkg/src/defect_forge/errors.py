"""Exception types shared across the package.

The CLI maps these onto its exit codes: ``ArgumentError`` -> 2,
``RangeError`` -> 3.
"""


class DefectForgeError(Exception):
    pass


class ArgumentError(DefectForgeError, ValueError):
    """Bad argument value (zero limit, threshold out of range, arity mismatch)."""


class RangeError(DefectForgeError, IndexError):
    """Query outside the range covered by a complexity table."""


class ResourceError(DefectForgeError, MemoryError):
    pass


class TableFormatError(DefectForgeError, ValueError):
    """A table cache file failed validation."""


class ValidationError(DefectForgeError, ValueError):
    """A deserialized polynomial or cover violates a structural invariant."""


class HorizonError(DefectForgeError, RuntimeError):
    """An enumeration could not be certified complete within the table limit."""
