"""Optimal ordered reduced BDD classifiers learned with SAT and MaxSAT."""

from ._bddlearn import *  # noqa: F401,F403
from ._bddlearn import __version__  # noqa: F401
