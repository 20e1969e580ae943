"""Error taxonomy shared by the library and the command line tool.

Every failure mode that a caller might want to branch on gets its own
exception class.  The classes are grouped by exit code so the CLI can map
any library error to a process status without a lookup table:

  1  precondition or hypothesis violations (bad inputs, bounds not met)
  2  numerical failures (branch cuts, missing spectral gaps, singular paths)
  3  input/output and syntax problems
"""

from __future__ import annotations

from typing import Any


class QrepError(Exception):
    """Base class for all library errors.

    ``details`` carries named quantities describing the failure, e.g. the
    offending norm and the bound it violated.  The message is built from
    them so diagnostics stay greppable.
    """

    exit_code = 1

    def __init__(self, message: str, **details: Any):
        self.details = details
        if details:
            extras = ", ".join(f"{k}={v!r}" for k, v in details.items())
            message = f"{message} ({extras})"
        super().__init__(message)


# -- exit code 1: violated preconditions ------------------------------------

class NotUnitary(QrepError):
    """Matrix failed the unitarity check at the requested tolerance."""


class NotHermitian(QrepError):
    """Matrix failed the self-adjointness check at the requested tolerance."""


class DimensionMismatch(QrepError):
    """Operands have incompatible shapes."""


class RadiusTooLarge(QrepError):
    """Requested perturbation radius exceeds the representable range."""


class DefectTooLarge(QrepError):
    """Almost-projection defect too large for a well-defined rank."""


class NotALoop(QrepError):
    """Determinant path does not close up at 1, so no winding number."""


class HypothesisViolated(QrepError):
    """Quantitative hypotheses of a stability statement do not hold."""


class UnboundGenerator(QrepError):
    """A word uses a symbol with no assigned matrix."""


class StrategyUndefined(QrepError):
    """Evaluation strategy cannot handle the given word or presentation."""


class PresentationMismatch(QrepError):
    """Operation requires structurally compatible presentations."""


# -- exit code 2: numerical failures ----------------------------------------

class NumericalError(QrepError):
    exit_code = 2


class BranchCut(NumericalError):
    """Spectrum touches the negative real axis; principal log undefined."""


class NoSpectralGap(NumericalError):
    """Eigenvalues inside the forbidden band around the threshold."""


class PathSingular(NumericalError):
    """Determinant path passed too close to zero to track its argument."""


# -- exit code 3: I/O and syntax ---------------------------------------------

class InputError(QrepError):
    exit_code = 3


class WordSyntaxError(InputError):
    """Unparseable word; ``offset`` locates the error in the input string."""

    def __init__(self, message: str, offset: int):
        super().__init__(message, offset=offset)
        self.offset = offset


class FormatError(InputError):
    """Malformed serialized object (matrix, quasi-representation, report)."""
