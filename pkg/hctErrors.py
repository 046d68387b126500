#  hctErrors.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# Exception family raised by pyHCT.  The command line catches HCTError, prints
# the message and exits with status 1.


class HCTError(Exception):
    """Base class for every error pyHCT raises on purpose."""


class DatasetError(HCTError, ValueError):
    """Bad input data: parse failures, ragged rows, zero-norm rows, isolated nodes, bad parameters."""


class SimilarityError(HCTError, ValueError):
    """Invalid subset for a cut, or a zero denominator in conductance / expansion."""


class EigenSolverError(HCTError, RuntimeError):
    """The Jacobi eigensolver did not converge within its sweep cap."""


class SweepError(HCTError, ValueError):
    """Every candidate prefix of a sweep had a zero denominator."""


class ModeError(HCTError, ValueError):
    """Rule / data mode mismatch, a query on a non-queryable tree, or a dimension mismatch."""


class TreeFormatError(HCTError, ValueError):
    """A tree file could not be decoded (corrupt payload)."""


class TreeVersionError(TreeFormatError):
    """A tree file carries a format version this build does not understand."""


class AnomalyError(HCTError, ValueError):
    """Label/table drift, or a degenerate hold-out specification."""
