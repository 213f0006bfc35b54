"""Exception hierarchy shared across the package."""


class RelayCfError(Exception):
    """Base class for all errors raised by this package."""


class VariableError(RelayCfError, ValueError):
    """Unknown, duplicated, or overlapping tensor variables."""


class NormalizationError(RelayCfError, ValueError):
    """A distribution does not sum to 1, or a kernel slice is not stochastic."""


class ShapeError(RelayCfError, ValueError):
    """Array dimensions inconsistent with the declared alphabets."""


class ArityError(RelayCfError, ValueError):
    """An evaluator was called with an unsupported number of relays."""


class SizeLimitError(RelayCfError, ValueError):
    """A brute-force oracle was asked to exceed its hard size cap."""


class LpFailure(RelayCfError, RuntimeError):
    """The simplex solver hit a numerical problem; carries diagnostics."""


class InputFormatError(RelayCfError, ValueError):
    """Malformed input file: missing key, bad type, or non-stochastic data."""


class InputShapeError(RelayCfError, ValueError):
    """Input file arrays have lengths inconsistent with the declared sizes."""


class OracleMismatch(RelayCfError, RuntimeError):
    """An independent oracle disagreed with the main implementation."""
