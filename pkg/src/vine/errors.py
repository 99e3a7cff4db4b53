"""Exception and warning types shared across the package.

Every error carries an ``exit_code`` used by the CLI: 2 for bad input,
3 for oracle/model-process failures, 4 for internal errors.
"""

from __future__ import annotations


class VineError(Exception):
    exit_code = 4


class InputError(VineError):
    """Problems with user-supplied data or configuration."""

    exit_code = 2


class OracleFailure(VineError):
    """Problems talking to the prediction oracle."""

    exit_code = 3


# --- dataset ---------------------------------------------------------------

class MissingTarget(InputError):
    pass


class MissingValue(InputError):
    def __init__(self, row: int, col: str):
        super().__init__(f"missing value at data row {row}, column {col!r}")
        self.row = row
        self.col = col


class NonNumericTarget(InputError):
    pass


class EmptyDataset(InputError):
    pass


class ConstantFeature(InputError):
    pass


# --- model / oracle --------------------------------------------------------

class ShapeMismatch(OracleFailure):
    pass


class ProcessSpawnFailure(OracleFailure):
    pass


class ProtocolViolation(OracleFailure):
    pass


class ChildExited(OracleFailure):
    pass


# --- curves / clustering / explanations ------------------------------------

class DegenerateGrid(VineError):
    pass


class KTooLarge(InputError):
    pass


class DegenerateSplit(VineError):
    pass


class EmptySeries(VineError):
    pass


class NoClusters(VineError):
    pass


# --- cli -------------------------------------------------------------------

class PortInUse(InputError):
    pass


# --- warnings --------------------------------------------------------------

class TooFewRowsWarning(UserWarning):
    """Training set too small to split; the model degenerates to a constant."""


class ZeroDenominatorWarning(UserWarning):
    """A normalizing denominator was zero; a documented fallback was used."""
