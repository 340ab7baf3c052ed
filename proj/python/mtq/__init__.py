"""Markov-type measures with complete overlaps on graph-directed fractals.

Words are tuples of 1-based letters; lifted letters i+ are written i + N.
"""

from ._mtq import *  # noqa: F401,F403
from ._mtq import __doc__  # noqa: F401

__version__ = "0.1.0"
