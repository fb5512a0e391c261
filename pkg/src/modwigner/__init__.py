"""Hilbert C*-modules over M_d(C) and recovery of maps preserving |[f, g]|."""

from . import algebra, hmodule, opalgebra, serialization, wigner
from .algebra import DEFAULT_TOL
from .errors import *  # noqa: F401,F403
from .opalgebra import ModuleOperator
from .wigner import decompose, synthesize

__version__ = "0.1.0"
