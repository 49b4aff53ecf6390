"""Exact toolkit for holomorphic Engel structures on C^4."""

__version__ = "0.1.0"

from .distcalc import EngelFlag, FlagFailure, VectorField, DiffForm, check_engel, lie_bracket
from .exactnum import GaussianRational, gq, parse_gaussian
from .horizontal import HorizontalDisc, integrate_horizontal_D, remark_line
from .obstacles import ShellSet, disc_avoids, shell_membership
from .poly import MultiPoly, PolyCurve, UniPoly

__all__ = [
    "__version__",
    "DiffForm",
    "EngelFlag",
    "FlagFailure",
    "GaussianRational",
    "HorizontalDisc",
    "MultiPoly",
    "PolyCurve",
    "ShellSet",
    "UniPoly",
    "VectorField",
    "check_engel",
    "disc_avoids",
    "gq",
    "integrate_horizontal_D",
    "lie_bracket",
    "parse_gaussian",
    "remark_line",
    "shell_membership",
]
