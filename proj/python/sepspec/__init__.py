"""Semiclassical spectrum of 1D double-well Schrodinger operators near the
barrier top, with a finite-difference eigensolver reference."""

from ._sepspec import *  # noqa: F401,F403
from ._sepspec import __doc__  # noqa: F401
