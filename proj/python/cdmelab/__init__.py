"""Spectral hierarchy, exact Monte Carlo, and master-equation reduction for
creation/pair-annihilation reaction-diffusion on the unit interval."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
