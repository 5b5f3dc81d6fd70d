"""Exact numerics for the alternating kicked Ising model."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
