"""Quantum illumination target detection: error bounds and receiver models."""

from ._qillum import *  # noqa: F401,F403
from ._qillum import __doc__  # noqa: F401
